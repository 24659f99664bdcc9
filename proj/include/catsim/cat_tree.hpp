#pragma once

#include "catsim/core.hpp"
#include "catsim/thresholds.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace catsim {

/// Reference to a child: an index into the counter table when `leaf` is set,
/// otherwise into the node table.
struct ChildRef {
    std::uint32_t index = 0;
    bool leaf = true;

    friend bool operator==(const ChildRef&, const ChildRef&) = default;
};

struct IntermediateNode {
    ChildRef left;
    ChildRef right;
    bool in_use = false;

    friend bool operator==(const IntermediateNode&, const IntermediateNode&) = default;
};

struct CounterSlot {
    std::uint32_t count = 0;
    std::uint32_t level = 0;  // index of the active split threshold
    std::uint8_t weight = 0;  // 2-bit reconfiguration weight
    bool active = false;

    friend bool operator==(const CounterSlot&, const CounterSlot&) = default;
};

struct LeafRange {
    std::uint32_t counter = 0;
    Row low = 0;
    Row high = 0;
    std::uint32_t depth = 0;

    friend bool operator==(const LeafRange&, const LeafRange&) = default;
};

struct Located {
    std::uint32_t counter = 0;
    Row low = 0;
    Row high = 0;
    std::uint32_t depth = 0;
    std::uint32_t hops = 0;  // interior-node reads
    // Slot that points at the leaf: nullopt when the leaf is the root.
    std::optional<std::uint32_t> parent;
    bool parent_right = false;
};

/// Counter-based adaptive tree over one bank.
///
/// Node and counter tables use the compact encoding: each interior node
/// holds two child references with leaf flags. With lambda >= 2 the
/// pre-split skeleton occupies node entries 0 .. 2^(lambda-1) - 2 in heap
/// order, so the node covering a row at depth lambda - 2 is found by index
/// arithmetic and the walk needs at most L - lambda + 1 node reads.
class CatTree {
  public:
    CatTree(const BankConfig& cfg, SplitThresholds th);

    /// Builds a tree from explicit tables. Parents, depths and the active
    /// set are derived by walking from `root`; the result is checked.
    static CatTree from_tables(const BankConfig& cfg, SplitThresholds th, ChildRef root,
                               std::vector<IntermediateNode> nodes, std::vector<CounterSlot> counters);

    const BankConfig& config() const { return cfg_; }
    const SplitThresholds& thresholds() const { return th_; }
    const std::vector<IntermediateNode>& nodes() const { return nodes_; }
    const std::vector<CounterSlot>& counters() const { return counters_; }
    ChildRef root() const { return root_; }

    std::uint32_t active_counters() const { return active_; }
    std::uint32_t nodes_in_use() const;
    /// Highest active counter index.
    std::uint32_t last_activated() const;
    bool fully_built() const { return active_ == cfg_.m_counters; }
    std::uint32_t skeleton_nodes() const { return skeleton_; }

    std::uint32_t threshold_for(std::uint32_t level) const;

    Located locate(Row row) const;

    /// Counts one activation. Returns the refreshed counter and the widened
    /// refresh range when a leaf reaches T at level L-1.
    struct Refresh {
        std::uint32_t counter = 0;
        RefreshEvent event;
    };
    std::optional<Refresh> record_access(Row row);

    /// Splits leaf `counter`: the old counter keeps the lower half, the
    /// lowest inactive counter takes the upper half with a cloned count.
    /// Throws InvariantError if the leaf is at depth L-1 or no counter is free.
    /// Returns the new counter index.
    std::uint32_t split(std::uint32_t counter);

    /// Replaces interior node `node` (whose children must both be leaves) by
    /// its left child. The promoted count is the max of both children, its
    /// level becomes L-1, and the right child and the node entry are freed.
    void merge(std::uint32_t node);

    /// Depth of an active leaf.
    std::uint32_t depth_of(std::uint32_t counter) const;

    std::vector<LeafRange> leaf_ranges() const;

    void reset();
    /// Zeroes every count; structure, levels and weights are kept.
    void clear_counts();

    CounterSlot& slot(std::uint32_t counter) { return counters_.at(counter); }

    /// Pre-order dump, one node per line.
    std::string dump() const;

    /// Throws InvariantError on any structural inconsistency.
    void check_invariants() const;

    friend bool operator==(const CatTree& a, const CatTree& b) {
        return a.cfg_ == b.cfg_ && a.th_.values == b.th_.values && a.root_ == b.root_ && a.nodes_ == b.nodes_ &&
               a.counters_ == b.counters_ && a.active_ == b.active_;
    }

  private:
    struct Parent {
        std::optional<std::uint32_t> node;
        bool right = false;
    };

    void build_initial();
    std::uint32_t split_located(const Located& at);
    Parent find_parent(ChildRef target) const;
    void set_child(const Parent& p, ChildRef child);
    std::optional<std::uint32_t> lowest_free_counter() const;
    std::optional<std::uint32_t> lowest_free_node() const;
    void saturate_levels();

    BankConfig cfg_;
    SplitThresholds th_;
    std::uint32_t first_level_ = 0;
    std::uint32_t skeleton_ = 0;
    std::uint32_t presplit_depth_ = 0;  // depth of the initial leaves
    ChildRef root_{0, true};
    std::vector<IntermediateNode> nodes_;
    std::vector<CounterSlot> counters_;
    std::uint32_t active_ = 0;
};

} // namespace catsim
