#include "catsim/cat_tree.hpp"

#include <algorithm>
#include <sstream>

namespace catsim {

namespace {

std::string ref_name(ChildRef r) { return (r.leaf ? "C" : "I") + std::to_string(r.index); }

} // namespace

CatTree::CatTree(const BankConfig& cfg, SplitThresholds th) : cfg_(validate_config(cfg)), th_(std::move(th)) {
    try {
        check_thresholds(th_, cfg_.max_levels, cfg_.refresh_threshold);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("split thresholds: ") + e.what());
    }
    first_level_ = th_.first_level(cfg_.max_levels);
    if (cfg_.m_counters > 1 && first_level_ > cfg_.presplit_levels - 1)
        throw ConfigError("split thresholds must cover levels presplit_levels-1 .. max_levels-1");
    build_initial();
}

void CatTree::build_initial() {
    const std::uint32_t m = cfg_.m_counters;
    nodes_.assign(m - 1, IntermediateNode{});
    counters_.assign(m, CounterSlot{});
    presplit_depth_ = cfg_.presplit_levels - 1;
    const std::uint32_t k = 1u << presplit_depth_;
    skeleton_ = k - 1;
    if (k == 1) {
        root_ = {0, true};
    } else {
        root_ = {0, false};
        const std::uint32_t inner = (k >> 1) - 1;  // skeleton nodes with node children
        for (std::uint32_t i = 0; i < skeleton_; ++i) {
            auto& n = nodes_[i];
            n.in_use = true;
            if (i < inner) {
                n.left = {2 * i + 1, false};
                n.right = {2 * i + 2, false};
            } else {
                const std::uint32_t q = i - inner;
                n.left = {2 * q, true};
                n.right = {2 * q + 1, true};
            }
        }
    }
    for (std::uint32_t c = 0; c < k; ++c) {
        counters_[c].active = true;
        counters_[c].level = presplit_depth_;
    }
    active_ = k;
    if (active_ == m)
        saturate_levels();
}

CatTree CatTree::from_tables(const BankConfig& cfg, SplitThresholds th, ChildRef root,
                             std::vector<IntermediateNode> nodes, std::vector<CounterSlot> counters) {
    CatTree t(cfg, std::move(th));
    if (nodes.size() != cfg.m_counters - 1 || counters.size() != cfg.m_counters)
        throw InvariantError("from_tables: table sizes must be M-1 nodes and M counters");
    t.root_ = root;
    t.nodes_ = std::move(nodes);
    t.counters_ = std::move(counters);
    t.active_ = static_cast<std::uint32_t>(
        std::count_if(t.counters_.begin(), t.counters_.end(), [](const CounterSlot& s) { return s.active; }));
    t.check_invariants();
    return t;
}

std::uint32_t CatTree::nodes_in_use() const {
    return static_cast<std::uint32_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const IntermediateNode& n) { return n.in_use; }));
}

std::uint32_t CatTree::last_activated() const {
    for (std::uint32_t c = cfg_.m_counters; c-- > 0;)
        if (counters_[c].active)
            return c;
    return 0;
}

std::uint32_t CatTree::threshold_for(std::uint32_t level) const {
    if (level < first_level_ || level >= cfg_.max_levels)
        throw InvariantError("no split threshold for level " + std::to_string(level));
    return th_.values[level - first_level_];
}

void CatTree::saturate_levels() {
    for (auto& c : counters_)
        if (c.active)
            c.level = cfg_.max_levels - 1;
}

Located CatTree::locate(Row row) const {
    Located r;
    std::uint64_t low = 0, width = cfg_.n_rows;
    ChildRef cur = root_;
    if (skeleton_ > 0) {
        const std::uint32_t d = presplit_depth_ - 1;
        width = cfg_.n_rows >> d;
        const std::uint64_t q = row / width;
        low = q * width;
        cur = {static_cast<std::uint32_t>(((1u << d) - 1) + q), false};
        r.depth = d;
    }
    while (!cur.leaf) {
        if (cur.index >= nodes_.size() || !nodes_[cur.index].in_use)
            throw InvariantError("dangling node reference " + ref_name(cur));
        const auto& n = nodes_[cur.index];
        ++r.hops;
        width /= 2;
        r.parent = cur.index;
        if (row < low + width) {
            r.parent_right = false;
            cur = n.left;
        } else {
            r.parent_right = true;
            low += width;
            cur = n.right;
        }
        ++r.depth;
    }
    if (cur.index >= counters_.size() || !counters_[cur.index].active)
        throw InvariantError("dangling counter reference " + ref_name(cur));
    r.counter = cur.index;
    r.low = static_cast<Row>(low);
    r.high = static_cast<Row>(low + width - 1);
    return r;
}

std::optional<CatTree::Refresh> CatTree::record_access(Row row) {
    Located at = locate(row);
    ++counters_[at.counter].count;
    const std::uint32_t top = cfg_.max_levels - 1;
    while (true) {
        auto& c = counters_[at.counter];
        if (c.count < threshold_for(c.level))
            return std::nullopt;
        if (c.level < top) {
            if (active_ >= cfg_.m_counters || at.depth >= top)
                throw InvariantError("leaf at split threshold cannot split");
            split_located(at);
            at = locate(row);
            continue;
        }
        c.count = 0;
        return Refresh{at.counter, widened_range_refresh(at.low, at.high, cfg_.n_rows, RefreshCause::threshold_leaf)};
    }
}

std::optional<std::uint32_t> CatTree::lowest_free_counter() const {
    for (std::uint32_t c = 0; c < counters_.size(); ++c)
        if (!counters_[c].active)
            return c;
    return std::nullopt;
}

std::optional<std::uint32_t> CatTree::lowest_free_node() const {
    for (std::uint32_t i = 0; i < nodes_.size(); ++i)
        if (!nodes_[i].in_use)
            return i;
    return std::nullopt;
}

void CatTree::set_child(const Parent& p, ChildRef child) {
    if (!p.node) {
        root_ = child;
    } else if (p.right) {
        nodes_[*p.node].right = child;
    } else {
        nodes_[*p.node].left = child;
    }
}

std::uint32_t CatTree::split_located(const Located& at) {
    if (at.depth >= cfg_.max_levels - 1)
        throw InvariantError("split beyond max depth");
    auto fresh = lowest_free_counter();
    auto node = lowest_free_node();
    if (!fresh || !node)
        throw InvariantError("split with no free counter or node entry");

    nodes_[*node] = IntermediateNode{{at.counter, true}, {*fresh, true}, true};
    set_child(Parent{at.parent, at.parent_right}, {*node, false});

    auto& old = counters_[at.counter];
    old.level = std::min(old.level + 1, cfg_.max_levels - 1);
    auto& neu = counters_[*fresh];
    neu = CounterSlot{old.count, old.level, 0, true};
    ++active_;
    if (active_ == cfg_.m_counters)
        saturate_levels();
    return *fresh;
}

std::uint32_t CatTree::split(std::uint32_t counter) {
    if (counter >= counters_.size() || !counters_[counter].active)
        throw InvariantError("split of inactive counter");
    for (const auto& r : leaf_ranges()) {
        if (r.counter == counter)
            return split_located(locate(r.low));
    }
    throw InvariantError("active counter not reachable from root");
}

CatTree::Parent CatTree::find_parent(ChildRef target) const {
    if (root_ == target)
        return {};
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!n.in_use)
            continue;
        if (n.left == target)
            return {i, false};
        if (n.right == target)
            return {i, true};
    }
    throw InvariantError("no parent for " + ref_name(target));
}

void CatTree::merge(std::uint32_t node) {
    if (node >= nodes_.size() || !nodes_[node].in_use)
        throw InvariantError("merge of unused node");
    if (node < skeleton_)
        throw InvariantError("merge of a pre-split node");
    const auto n = nodes_[node];
    if (!n.left.leaf || !n.right.leaf)
        throw InvariantError("merge needs two leaf children");
    auto& keep = counters_[n.left.index];
    auto& drop = counters_[n.right.index];
    keep.count = std::max(keep.count, drop.count);
    keep.level = cfg_.max_levels - 1;
    drop = CounterSlot{};
    set_child(find_parent({node, false}), n.left);
    nodes_[node] = IntermediateNode{};
    --active_;
}

std::uint32_t CatTree::depth_of(std::uint32_t counter) const {
    for (const auto& r : leaf_ranges())
        if (r.counter == counter)
            return r.depth;
    throw InvariantError("counter " + std::to_string(counter) + " is not an active leaf");
}

std::vector<LeafRange> CatTree::leaf_ranges() const {
    struct Item {
        ChildRef ref;
        std::uint64_t low, width;
        std::uint32_t depth;
    };
    std::vector<LeafRange> out;
    out.reserve(active_);
    std::vector<Item> stack{{root_, 0, cfg_.n_rows, 0}};
    while (!stack.empty()) {
        auto it = stack.back();
        stack.pop_back();
        if (it.ref.leaf) {
            out.push_back({it.ref.index, static_cast<Row>(it.low), static_cast<Row>(it.low + it.width - 1), it.depth});
            continue;
        }
        const auto& n = nodes_.at(it.ref.index);
        const std::uint64_t half = it.width / 2;
        stack.push_back({n.right, it.low + half, half, it.depth + 1});
        stack.push_back({n.left, it.low, half, it.depth + 1});
    }
    return out;
}

void CatTree::reset() { build_initial(); }

void CatTree::clear_counts() {
    for (auto& c : counters_)
        c.count = 0;
}

std::string CatTree::dump() const {
    std::ostringstream os;
    struct Item {
        ChildRef ref;
        std::uint64_t low, width;
        std::uint32_t depth;
    };
    std::vector<Item> stack{{root_, 0, cfg_.n_rows, 0}};
    while (!stack.empty()) {
        auto it = stack.back();
        stack.pop_back();
        os << std::string(2 * it.depth, ' ') << ref_name(it.ref) << " [" << it.low << ','
           << it.low + it.width - 1 << ']';
        if (it.ref.leaf) {
            const auto& c = counters_[it.ref.index];
            os << " level=" << c.level << " count=" << c.count << " weight=" << unsigned{c.weight} << '\n';
            continue;
        }
        const auto& n = nodes_[it.ref.index];
        os << " -> " << ref_name(n.left) << ' ' << ref_name(n.right) << '\n';
        const std::uint64_t half = it.width / 2;
        stack.push_back({n.right, it.low + half, half, it.depth + 1});
        stack.push_back({n.left, it.low, half, it.depth + 1});
    }
    return os.str();
}

void CatTree::check_invariants() const {
    auto fail = [](const std::string& what) { throw InvariantError("cat tree: " + what); };
    std::vector<bool> seen_node(nodes_.size(), false), seen_leaf(counters_.size(), false);
    std::uint32_t leaves = 0, interior = 0;
    struct Item {
        ChildRef ref;
        std::uint64_t low, width;
        std::uint32_t depth;
    };
    std::vector<Item> stack{{root_, 0, cfg_.n_rows, 0}};
    std::uint64_t next_low = 0;
    while (!stack.empty()) {
        auto it = stack.back();
        stack.pop_back();
        if (it.depth > cfg_.max_levels - 1)
            fail("depth exceeds max_levels - 1");
        if (it.ref.leaf) {
            if (it.ref.index >= counters_.size() || !counters_[it.ref.index].active)
                fail("leaf reference to inactive counter " + ref_name(it.ref));
            if (seen_leaf[it.ref.index])
                fail("counter referenced twice: " + ref_name(it.ref));
            seen_leaf[it.ref.index] = true;
            const auto& c = counters_[it.ref.index];
            if (c.count > cfg_.refresh_threshold)
                fail("count above T at " + ref_name(it.ref));
            if (c.level > cfg_.max_levels - 1 || c.level < first_level_)
                fail("level out of range at " + ref_name(it.ref));
            if (c.weight > 3)
                fail("weight above 3 at " + ref_name(it.ref));
            if (it.low != next_low)
                fail("leaf ranges are not contiguous");
            next_low = it.low + it.width;
            ++leaves;
            continue;
        }
        if (it.ref.index >= nodes_.size() || !nodes_[it.ref.index].in_use)
            fail("reference to unused node " + ref_name(it.ref));
        if (seen_node[it.ref.index])
            fail("node referenced twice: " + ref_name(it.ref));
        seen_node[it.ref.index] = true;
        ++interior;
        const auto& n = nodes_[it.ref.index];
        const std::uint64_t half = it.width / 2;
        stack.push_back({n.right, it.low + half, half, it.depth + 1});
        stack.push_back({n.left, it.low, half, it.depth + 1});
    }
    if (next_low != cfg_.n_rows)
        fail("leaf ranges do not cover the bank");
    if (leaves != active_)
        fail("active counter count does not match reachable leaves");
    for (std::uint32_t c = 0; c < counters_.size(); ++c)
        if (counters_[c].active && !seen_leaf[c])
            fail("active counter unreachable: C" + std::to_string(c));
    if (interior + 1 != leaves)
        fail("interior nodes != leaves - 1");
    if (interior != nodes_in_use())
        fail("node entry in use but unreachable");
    if (skeleton_ > 0) {
        const std::uint32_t inner = ((skeleton_ + 1) >> 1) - 1;
        for (std::uint32_t i = 0; i < inner; ++i) {
            const auto& n = nodes_[i];
            if (n.left != ChildRef{2 * i + 1, false} || n.right != ChildRef{2 * i + 2, false})
                fail("pre-split skeleton is not heap ordered");
        }
        if (root_ != ChildRef{0, false})
            fail("pre-split skeleton root must be I0");
    }
}

} // namespace catsim
