#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace catsim {

enum class ThresholdSource { published, heuristic, table };

std::string_view to_string(ThresholdSource source);

/// Split thresholds for the deepest `values.size()` tree levels. The last
/// entry belongs to level L-1 and equals the refresh threshold T; entry k
/// belongs to level L - size + k.
struct SplitThresholds {
    std::vector<std::uint32_t> values;
    ThresholdSource source = ThresholdSource::published;

    std::uint32_t first_level(std::uint32_t max_levels) const;
    std::uint32_t at_level(std::uint32_t level, std::uint32_t max_levels) const;

    friend bool operator==(const SplitThresholds&, const SplitThresholds&) = default;
};

class UnsupportedConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless the list is non-empty, non-decreasing,
/// positive, bounded by T, ends with T, and has at most `max_levels` entries.
void check_thresholds(const SplitThresholds& th, std::uint32_t max_levels, std::uint32_t refresh_threshold);

/// Published threshold values. Covers (64, 10, 32768), the four-counter rule
/// [T/4, T/2, T] for M = 4 with L in {3, 4}, and [T/2, T] for (2, 2).
/// Anything else throws UnsupportedConfigError.
SplitThresholds published_thresholds(std::uint32_t m_counters, std::uint32_t max_levels,
                                 std::uint32_t refresh_threshold);

bool has_published_thresholds(std::uint32_t m_counters, std::uint32_t max_levels,
                          std::uint32_t refresh_threshold);

/// Heuristic thresholds for every level 0..L-1.
///
/// Anchors: T_{L-1} = T, T_{L-2} = T/2. With s = log2(M) - 1 the level of the
/// balanced pre-split leaves, T_{s+1} = T/4 (when s+1 < L-2) and levels s+1..L-2
/// are geometrically spaced between T/4 and T/2. T_s = T_{s+1}/2, and every level
/// shallower than s halves again. This reproduces the four-counter example
/// exactly and keeps the doubling between the two shallowest split levels that
/// makes uniform traffic converge to a balanced tree.
SplitThresholds heuristic_thresholds(std::uint32_t m_counters, std::uint32_t max_levels,
                                     std::uint32_t refresh_threshold);

/// Externally supplied thresholds keyed by (M, L, T), loaded from JSON:
///   {"tables": [{"m_counters": 64, "max_levels": 10, "refresh_threshold": 32768,
///                "values": [5155, 10309, 12886, 16384, 32768]}]}
class ThresholdTable {
  public:
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;

    static ThresholdTable from_json_text(std::string_view text);
    static ThresholdTable from_file(const std::string& path);

    void insert(std::uint32_t m, std::uint32_t l, std::uint32_t t, std::vector<std::uint32_t> values);
    std::optional<SplitThresholds> lookup(std::uint32_t m, std::uint32_t l, std::uint32_t t) const;
    bool empty() const { return entries_.empty(); }

  private:
    std::map<Key, std::vector<std::uint32_t>> entries_;
};

/// Table entry, then published values, then the heuristic.
SplitThresholds select_thresholds(std::uint32_t m_counters, std::uint32_t max_levels,
                                  std::uint32_t refresh_threshold, const ThresholdTable* table = nullptr);

/// Inputs of the four-counter refresh-cost model.
struct CostInputs {
    double w = 0;  // rows per unit group (N/4)
    double R = 0;  // references per refresh interval
    double T = 0;  // refresh threshold
    double x = 0;  // extra references to the hot group
};

/// Rows refreshed by the balanced four-counter tree: w * R / T.
double cost_sca(const CostInputs& in);

/// Rows refreshed by the unbalanced tree (leaves 2w, w, w/2, w/2):
/// ((2w)^2 + w^2 + (w/2)^2 + (x + w/2) w/2) * alpha / T with alpha = R / (x + 4w).
double cost_cat(const CostInputs& in);

/// Bias above which the unbalanced tree refreshes fewer rows: 3w.
double critical_bias(double w);

} // namespace catsim
