#include "catsim/thresholds.hpp"

#include "catsim/core.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace catsim {

std::string_view to_string(ThresholdSource source) {
    switch (source) {
    case ThresholdSource::published: return "published";
    case ThresholdSource::heuristic: return "heuristic";
    case ThresholdSource::table: return "table";
    }
    return "?";
}

std::uint32_t SplitThresholds::first_level(std::uint32_t max_levels) const {
    return max_levels - static_cast<std::uint32_t>(values.size());
}

std::uint32_t SplitThresholds::at_level(std::uint32_t level, std::uint32_t max_levels) const {
    const auto first = first_level(max_levels);
    if (level < first || level >= max_levels)
        throw std::out_of_range("no split threshold for level " + std::to_string(level));
    return values[level - first];
}

void check_thresholds(const SplitThresholds& th, std::uint32_t max_levels, std::uint32_t refresh_threshold) {
    if (th.values.empty())
        throw std::invalid_argument("threshold list is empty");
    if (th.values.size() > max_levels)
        throw std::invalid_argument("threshold list longer than max_levels");
    if (th.values.back() != refresh_threshold)
        throw std::invalid_argument("last threshold must equal the refresh threshold");
    std::uint32_t prev = 0;
    for (auto v : th.values) {
        if (v == 0)
            throw std::invalid_argument("thresholds must be positive");
        if (v < prev)
            throw std::invalid_argument("thresholds must be non-decreasing");
        if (v > refresh_threshold)
            throw std::invalid_argument("thresholds must not exceed the refresh threshold");
        prev = v;
    }
}

bool has_published_thresholds(std::uint32_t m, std::uint32_t l, std::uint32_t t) {
    if (m == 64 && l == 10 && t == 32768)
        return true;
    if (m == 4 && (l == 3 || l == 4) && t >= 4)
        return true;
    if (m == 2 && l == 2 && t >= 2)
        return true;
    return false;
}

SplitThresholds published_thresholds(std::uint32_t m, std::uint32_t l, std::uint32_t t) {
    SplitThresholds th;
    th.source = ThresholdSource::published;
    if (m == 64 && l == 10 && t == 32768) {
        th.values = {5155, 10309, 12886, 16384, 32768};
    } else if (m == 4 && (l == 3 || l == 4) && t >= 4) {
        th.values = {t / 4, t / 2, t};
    } else if (m == 2 && l == 2 && t >= 2) {
        th.values = {t / 2, t};
    } else {
        throw UnsupportedConfigError("no published split thresholds for (M=" + std::to_string(m) +
                                     ", L=" + std::to_string(l) + ", T=" + std::to_string(t) + ")");
    }
    return th;
}

SplitThresholds heuristic_thresholds(std::uint32_t m, std::uint32_t l, std::uint32_t t) {
    if (!is_power_of_two(m) || l == 0 || t == 0)
        throw std::invalid_argument("heuristic_thresholds: invalid (M, L, T)");
    std::vector<double> level(l, 0.0);
    level[l - 1] = t;
    if (l >= 2) {
        level[l - 2] = t / 2.0;
        const std::uint32_t m_log = log2_exact(m);
        const std::uint32_t s = m_log == 0 ? 0 : m_log - 1;
        std::uint32_t halving_from = l - 2; // levels below this halve
        if (s + 1 < l - 2) {
            const std::uint32_t lo = s + 1, hi = l - 2;
            for (std::uint32_t k = lo; k <= hi; ++k) {
                const double frac = static_cast<double>(k - lo) / static_cast<double>(hi - lo);
                level[k] = (t / 4.0) * std::pow(2.0, frac);
            }
            halving_from = lo;
        } else if (s + 1 == l - 2) {
            halving_from = l - 2;
        } else {
            halving_from = std::min(s, l - 2);
        }
        for (std::uint32_t k = halving_from; k-- > 0;)
            level[k] = level[k + 1] / 2.0;
    }
    SplitThresholds th;
    th.source = ThresholdSource::heuristic;
    th.values.reserve(l);
    std::uint32_t prev = 1;
    for (double v : level) {
        auto iv = static_cast<std::uint32_t>(std::floor(v));
        iv = std::max(iv, prev);
        th.values.push_back(iv);
        prev = iv;
    }
    th.values.back() = t;
    return th;
}

ThresholdTable ThresholdTable::from_json_text(std::string_view text) {
    ThresholdTable table;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("threshold table: ") + e.what());
    }
    if (!doc.contains("tables") || !doc["tables"].is_array())
        throw ConfigError("threshold table: missing 'tables' array");
    for (const auto& entry : doc["tables"]) {
        try {
            table.insert(entry.at("m_counters").get<std::uint32_t>(), entry.at("max_levels").get<std::uint32_t>(),
                         entry.at("refresh_threshold").get<std::uint32_t>(),
                         entry.at("values").get<std::vector<std::uint32_t>>());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("threshold table entry: ") + e.what());
        }
    }
    return table;
}

ThresholdTable ThresholdTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open threshold table '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void ThresholdTable::insert(std::uint32_t m, std::uint32_t l, std::uint32_t t, std::vector<std::uint32_t> values) {
    SplitThresholds th{values, ThresholdSource::table};
    try {
        check_thresholds(th, l, t);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("threshold table entry (M=" + std::to_string(m) + ", L=" + std::to_string(l) +
                          ", T=" + std::to_string(t) + "): " + e.what());
    }
    entries_[{m, l, t}] = std::move(values);
}

std::optional<SplitThresholds> ThresholdTable::lookup(std::uint32_t m, std::uint32_t l, std::uint32_t t) const {
    auto it = entries_.find({m, l, t});
    if (it == entries_.end())
        return std::nullopt;
    return SplitThresholds{it->second, ThresholdSource::table};
}

SplitThresholds select_thresholds(std::uint32_t m, std::uint32_t l, std::uint32_t t, const ThresholdTable* table) {
    if (table) {
        if (auto th = table->lookup(m, l, t))
            return *th;
    }
    if (has_published_thresholds(m, l, t))
        return published_thresholds(m, l, t);
    return heuristic_thresholds(m, l, t);
}

double cost_sca(const CostInputs& in) { return in.w * in.R / in.T; }

double cost_cat(const CostInputs& in) {
    const double w = in.w;
    const double alpha = in.R / (in.x + 4.0 * w);
    const double bracket = (2.0 * w) * (2.0 * w) + w * w + (w / 2.0) * (w / 2.0) + (in.x + w / 2.0) * (w / 2.0);
    return bracket * alpha / in.T;
}

double critical_bias(double w) { return 3.0 * w; }

} // namespace catsim
