#pragma once

#include "catsim/cat_tree.hpp"
#include "catsim/core.hpp"
#include "catsim/prng.hpp"
#include "catsim/thresholds.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace catsim {

enum class Scheme { sca, pra, prcat, drcat };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// One mitigation policy instance, owned by one bank.
class MitigationPolicy {
  public:
    virtual ~MitigationPolicy() = default;

    virtual Scheme scheme() const = 0;

    /// Handles one activation at `now_ns`. Crossing into a new refresh
    /// interval applies the scheme's epoch behaviour first.
    std::optional<RefreshEvent> access(Row row, TimeNs now_ns);

    std::uint64_t epoch() const { return epoch_; }

  protected:
    explicit MitigationPolicy(const BankConfig& cfg) : cfg_(cfg) {}

    virtual std::optional<RefreshEvent> on_access(Row row) = 0;
    virtual void on_epoch() = 0;

    BankConfig cfg_;

  private:
    std::uint64_t epoch_ = 0;
};

/// Static counter assignment: M fixed groups of N/M rows.
class ScaPolicy final : public MitigationPolicy {
  public:
    explicit ScaPolicy(const BankConfig& cfg);

    Scheme scheme() const override { return Scheme::sca; }
    const std::vector<std::uint32_t>& group_counts() const { return counts_; }
    Row group_size() const { return group_size_; }

  protected:
    std::optional<RefreshEvent> on_access(Row row) override;
    void on_epoch() override;

  private:
    Row group_size_;
    std::vector<std::uint32_t> counts_;
};

/// Probabilistic neighbour refresh.
class PraPolicy final : public MitigationPolicy {
  public:
    PraPolicy(const BankConfig& cfg, double p, PrngKind kind, std::uint64_t seed);

    Scheme scheme() const override { return Scheme::pra; }
    double probability() const { return p_; }
    unsigned bits_per_access() const { return bits_per_decision(p_); }

  protected:
    std::optional<RefreshEvent> on_access(Row row) override;
    void on_epoch() override {}

  private:
    double p_;
    Prng prng_;
};

/// CAT rebuilt at every refresh interval.
class PrcatPolicy final : public MitigationPolicy {
  public:
    PrcatPolicy(const BankConfig& cfg, SplitThresholds th);

    Scheme scheme() const override { return Scheme::prcat; }
    const CatTree& tree() const { return tree_; }

  protected:
    std::optional<RefreshEvent> on_access(Row row) override;
    void on_epoch() override { tree_.reset(); }

  private:
    CatTree tree_;
};

struct DrcatStats {
    std::uint64_t reconfigurations = 0;
    std::uint64_t blocked_no_candidate = 0;  // weight hit 3 but nothing to merge
    std::uint64_t blocked_max_depth = 0;     // weight hit 3 at depth L-1
};

/// CAT with weight-driven merge/split reconfiguration. Counts are cleared
/// at each refresh interval; structure and weights persist.
class DrcatPolicy final : public MitigationPolicy {
  public:
    DrcatPolicy(const BankConfig& cfg, SplitThresholds th);
    DrcatPolicy(CatTree tree);

    Scheme scheme() const override { return Scheme::drcat; }
    const CatTree& tree() const { return tree_; }
    const DrcatStats& stats() const { return stats_; }

    /// Weight update and optional merge/split after `leaf` refreshed.
    void on_refresh(std::uint32_t leaf);

    /// +1 (cap 3) on `leaf`, -1 (floor 0) on every other active counter.
    /// Returns true when the leaf's weight reached 3.
    bool update_weights(std::uint32_t leaf);

    /// Merge the first cold pair and split `leaf` into the freed slot.
    /// Returns false (and counts why) when no change is possible.
    bool reconfigure(std::uint32_t leaf);

    /// Lowest-index non-skeleton node whose children are two zero-weight leaves.
    std::optional<std::uint32_t> merge_candidate() const;

  protected:
    std::optional<RefreshEvent> on_access(Row row) override;
    void on_epoch() override { tree_.clear_counts(); }

  private:
    CatTree tree_;
    DrcatStats stats_;
};

/// Everything needed to build a policy for one bank.
struct PolicySpec {
    Scheme scheme = Scheme::sca;
    std::string label;
    std::optional<std::uint32_t> m_counters;
    std::optional<std::uint32_t> max_levels;
    std::optional<std::uint32_t> presplit_levels;
    double p = 0.002;
    PrngKind prng = PrngKind::quality;
    std::uint64_t seed = 1;
    std::optional<SplitThresholds> thresholds;

    /// The label, or the scheme name with its counter count.
    std::string display_name(const BankConfig& base) const;
    /// Bank config with this spec's overrides applied.
    BankConfig apply(const BankConfig& base) const;
};

/// Thresholds the spec will use on `cfg` (explicit, else table, else
/// published, else heuristic). Only meaningful for CAT schemes.
SplitThresholds resolve_thresholds(const PolicySpec& spec, const BankConfig& cfg,
                                   const ThresholdTable* table = nullptr);

/// `cfg` must already have the spec's overrides applied.
std::unique_ptr<MitigationPolicy> make_policy(const PolicySpec& spec, const BankConfig& cfg,
                                              std::uint64_t seed, const ThresholdTable* table = nullptr);

} // namespace catsim
