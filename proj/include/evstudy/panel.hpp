#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evstudy {

/// Treatment group indicator D_i.
enum class Group { Control = 0, Treated = 1 };

/// Period index relative to treatment: period t = r + 1, treatment starts at t = 1.
using RelativeTime = int;

inline constexpr int kTreatmentPeriod = 1;

[[nodiscard]] constexpr int period_of(RelativeTime r) noexcept { return r + 1; }
[[nodiscard]] constexpr RelativeTime relative_time_of(int t) noexcept { return t - 1; }

enum class PanelErrorKind {
    EmptyInput,
    UnbalancedPanel,
    InconsistentTreatment,
    InvalidTreatment,
    DegenerateGroups,
    NonIntegerTime,
    NonFiniteOutcome,
    InsufficientPeriods,
    TimeOutOfRange,
};

[[nodiscard]] const char* to_string(PanelErrorKind kind) noexcept;

class PanelError : public std::runtime_error {
public:
    PanelError(PanelErrorKind kind, const std::string& what);
    [[nodiscard]] PanelErrorKind kind() const noexcept { return kind_; }

private:
    PanelErrorKind kind_;
};

/// One observation in long format, as read from a file or built in memory.
/// `time` is a real so that fractional periods can be rejected at validation.
struct PanelRow {
    std::string unit;
    double time = 0.0;
    int treated = 0;
    double outcome = 0.0;

    friend bool operator==(const PanelRow&, const PanelRow&) = default;
};

struct UnitInfo {
    std::string id;
    Group group = Group::Control;

    friend bool operator==(const UnitInfo&, const UnitInfo&) = default;
};

/**
 * Balanced panel with a common treatment date at period 1.
 *
 * Units are stored sorted by id; outcomes form a dense unit-major grid over the
 * inclusive period range [t_min, t_max] with t_min <= -1 and t_max >= 1.
 * Instances can only be produced by validation and are immutable afterwards.
 */
class PanelDataset {
public:
    /// Validates long-format rows. Throws PanelError.
    [[nodiscard]] static PanelDataset from_rows(std::span<const PanelRow> rows);

    /// Validates an already dense grid (unit-major, outcomes.size() == units * periods).
    /// Units are re-sorted by id together with their outcome rows.
    [[nodiscard]] static PanelDataset from_grid(std::vector<UnitInfo> units, int t_min, int t_max,
                                                std::vector<double> outcomes);

    [[nodiscard]] std::size_t num_units() const noexcept { return units_.size(); }
    [[nodiscard]] std::size_t num_periods() const noexcept {
        return static_cast<std::size_t>(t_max_ - t_min_ + 1);
    }
    [[nodiscard]] int t_min() const noexcept { return t_min_; }
    [[nodiscard]] int t_max() const noexcept { return t_max_; }
    /// Number of periods strictly before period 0 (the lower bar-T).
    [[nodiscard]] int pre_periods() const noexcept { return -t_min_; }
    [[nodiscard]] int post_periods() const noexcept { return t_max_; }
    [[nodiscard]] RelativeTime min_relative_time() const noexcept { return relative_time_of(t_min_); }
    [[nodiscard]] RelativeTime max_relative_time() const noexcept { return relative_time_of(t_max_); }

    [[nodiscard]] const std::vector<UnitInfo>& units() const noexcept { return units_; }
    [[nodiscard]] const UnitInfo& unit(std::size_t i) const { return units_.at(i); }
    [[nodiscard]] bool treated(std::size_t i) const { return units_.at(i).group == Group::Treated; }
    [[nodiscard]] std::size_t count(Group g) const noexcept {
        return g == Group::Treated ? n_treated_ : units_.size() - n_treated_;
    }

    [[nodiscard]] bool contains_period(int t) const noexcept { return t >= t_min_ && t <= t_max_; }
    /// Zero-based column of period t; t must be in range.
    [[nodiscard]] std::size_t column(int t) const noexcept { return static_cast<std::size_t>(t - t_min_); }

    [[nodiscard]] double outcome(std::size_t i, int t) const;
    /// Outcomes of unit i over all periods, ascending in t.
    [[nodiscard]] std::span<const double> unit_outcomes(std::size_t i) const;
    [[nodiscard]] std::span<const double> outcomes() const noexcept { return outcomes_; }

    /// Long-format rows, units in stored order and periods ascending.
    [[nodiscard]] std::vector<PanelRow> rows() const;

    /// Copy with every outcome replaced by f(unit index, period, outcome). Revalidated.
    template <typename F>
    [[nodiscard]] PanelDataset transformed(F&& f) const {
        std::vector<double> out(outcomes_.size());
        const std::size_t periods = num_periods();
        for (std::size_t i = 0; i < units_.size(); ++i) {
            for (std::size_t c = 0; c < periods; ++c) {
                out[i * periods + c] = f(i, t_min_ + static_cast<int>(c), outcomes_[i * periods + c]);
            }
        }
        return from_grid(units_, t_min_, t_max_, std::move(out));
    }

    friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

private:
    PanelDataset() = default;

    std::vector<UnitInfo> units_;
    int t_min_ = 0;
    int t_max_ = 0;
    std::size_t n_treated_ = 0;
    std::vector<double> outcomes_;
};

/// Arithmetic mean of Y_it over units in group `g` at period `t`.
/// Throws PanelError(TimeOutOfRange) if t is outside the panel.
[[nodiscard]] double group_mean(const PanelDataset& panel, int t, Group g);

/// Treated-minus-control difference in group means at period t.
[[nodiscard]] double group_gap(const PanelDataset& panel, int t);

}  // namespace evstudy
