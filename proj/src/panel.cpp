#include "evstudy/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace evstudy {

const char* to_string(PanelErrorKind kind) noexcept {
    switch (kind) {
        case PanelErrorKind::EmptyInput: return "EmptyInput";
        case PanelErrorKind::UnbalancedPanel: return "UnbalancedPanel";
        case PanelErrorKind::InconsistentTreatment: return "InconsistentTreatment";
        case PanelErrorKind::InvalidTreatment: return "InvalidTreatment";
        case PanelErrorKind::DegenerateGroups: return "DegenerateGroups";
        case PanelErrorKind::NonIntegerTime: return "NonIntegerTime";
        case PanelErrorKind::NonFiniteOutcome: return "NonFiniteOutcome";
        case PanelErrorKind::InsufficientPeriods: return "InsufficientPeriods";
        case PanelErrorKind::TimeOutOfRange: return "TimeOutOfRange";
    }
    return "Unknown";
}

PanelError::PanelError(PanelErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

namespace {

[[noreturn]] void fail(PanelErrorKind kind, const std::string& what) { throw PanelError(kind, what); }

void check_period_range(int t_min, int t_max) {
    if (t_min > -1 || t_max < kTreatmentPeriod) {
        std::ostringstream msg;
        msg << "periods [" << t_min << ", " << t_max
            << "] must include at least t=-1, t=0 and the treatment period t=1";
        fail(PanelErrorKind::InsufficientPeriods, msg.str());
    }
}

}  // namespace

PanelDataset PanelDataset::from_rows(std::span<const PanelRow> rows) {
    if (rows.empty()) fail(PanelErrorKind::EmptyInput, "no rows");

    std::map<std::string, Group> groups;
    int t_min = 0;
    int t_max = 0;
    bool first = true;
    for (const auto& row : rows) {
        if (!std::isfinite(row.time) || row.time != std::floor(row.time) ||
            std::abs(row.time) > 1e9) {
            std::ostringstream msg;
            msg << "unit '" << row.unit << "' has non-integer time " << row.time;
            fail(PanelErrorKind::NonIntegerTime, msg.str());
        }
        if (row.treated != 0 && row.treated != 1) {
            fail(PanelErrorKind::InvalidTreatment,
                 "unit '" + row.unit + "' has treated=" + std::to_string(row.treated) + " (expected 0 or 1)");
        }
        const Group g = row.treated == 1 ? Group::Treated : Group::Control;
        auto [it, inserted] = groups.emplace(row.unit, g);
        if (!inserted && it->second != g) {
            fail(PanelErrorKind::InconsistentTreatment, "unit '" + row.unit + "' switches treatment group");
        }
        const int t = static_cast<int>(row.time);
        t_min = first ? t : std::min(t_min, t);
        t_max = first ? t : std::max(t_max, t);
        first = false;
    }

    std::vector<UnitInfo> units;
    units.reserve(groups.size());
    std::map<std::string, std::size_t> index;
    for (const auto& [id, g] : groups) {
        index.emplace(id, units.size());
        units.push_back({id, g});
    }

    check_period_range(t_min, t_max);
    const auto periods = static_cast<std::size_t>(t_max - t_min + 1);
    std::vector<double> outcomes(units.size() * periods, 0.0);
    std::vector<unsigned char> seen(outcomes.size(), 0);
    for (const auto& row : rows) {
        const std::size_t cell = index.at(row.unit) * periods + static_cast<std::size_t>(static_cast<int>(row.time) - t_min);
        if (seen[cell]) {
            std::ostringstream msg;
            msg << "duplicate cell (unit '" << row.unit << "', time " << row.time << ")";
            fail(PanelErrorKind::UnbalancedPanel, msg.str());
        }
        seen[cell] = 1;
        outcomes[cell] = row.outcome;
    }
    for (std::size_t cell = 0; cell < seen.size(); ++cell) {
        if (!seen[cell]) {
            std::ostringstream msg;
            msg << "missing cell (unit '" << units[cell / periods].id << "', time "
                << t_min + static_cast<int>(cell % periods) << ")";
            fail(PanelErrorKind::UnbalancedPanel, msg.str());
        }
    }
    return from_grid(std::move(units), t_min, t_max, std::move(outcomes));
}

PanelDataset PanelDataset::from_grid(std::vector<UnitInfo> units, int t_min, int t_max,
                                     std::vector<double> outcomes) {
    if (units.empty()) fail(PanelErrorKind::EmptyInput, "no units");
    check_period_range(t_min, t_max);
    const auto periods = static_cast<std::size_t>(t_max - t_min + 1);
    if (outcomes.size() != units.size() * periods) {
        fail(PanelErrorKind::UnbalancedPanel, "outcome grid size does not match units x periods");
    }
    for (std::size_t cell = 0; cell < outcomes.size(); ++cell) {
        if (!std::isfinite(outcomes[cell])) {
            std::ostringstream msg;
            msg << "non-finite outcome for unit '" << units[cell / periods].id << "' at time "
                << t_min + static_cast<int>(cell % periods);
            fail(PanelErrorKind::NonFiniteOutcome, msg.str());
        }
    }

    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return units[a].id < units[b].id; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (units[order[k]].id == units[order[k - 1]].id) {
            fail(PanelErrorKind::UnbalancedPanel, "duplicate unit '" + units[order[k]].id + "'");
        }
    }

    PanelDataset panel;
    panel.t_min_ = t_min;
    panel.t_max_ = t_max;
    panel.units_.reserve(units.size());
    panel.outcomes_.reserve(outcomes.size());
    for (std::size_t src : order) {
        panel.units_.push_back(std::move(units[src]));
        const auto begin = outcomes.begin() + static_cast<std::ptrdiff_t>(src * periods);
        panel.outcomes_.insert(panel.outcomes_.end(), begin, begin + static_cast<std::ptrdiff_t>(periods));
    }
    panel.n_treated_ = static_cast<std::size_t>(std::count_if(
        panel.units_.begin(), panel.units_.end(), [](const UnitInfo& u) { return u.group == Group::Treated; }));
    if (panel.n_treated_ == 0 || panel.n_treated_ == panel.units_.size()) {
        fail(PanelErrorKind::DegenerateGroups, "need at least one treated and one untreated unit");
    }
    return panel;
}

double PanelDataset::outcome(std::size_t i, int t) const {
    if (!contains_period(t)) fail(PanelErrorKind::TimeOutOfRange, "time " + std::to_string(t));
    return outcomes_.at(i * num_periods() + column(t));
}

std::span<const double> PanelDataset::unit_outcomes(std::size_t i) const {
    const std::size_t periods = num_periods();
    return std::span<const double>(outcomes_).subspan(i * periods, periods);
}

std::vector<PanelRow> PanelDataset::rows() const {
    std::vector<PanelRow> out;
    out.reserve(outcomes_.size());
    const std::size_t periods = num_periods();
    for (std::size_t i = 0; i < units_.size(); ++i) {
        for (std::size_t c = 0; c < periods; ++c) {
            out.push_back({units_[i].id, static_cast<double>(t_min_ + static_cast<int>(c)),
                           units_[i].group == Group::Treated ? 1 : 0, outcomes_[i * periods + c]});
        }
    }
    return out;
}

double group_mean(const PanelDataset& panel, int t, Group g) {
    if (!panel.contains_period(t)) {
        fail(PanelErrorKind::TimeOutOfRange, "time " + std::to_string(t) + " outside [" +
                                                  std::to_string(panel.t_min()) + ", " +
                                                  std::to_string(panel.t_max()) + "]");
    }
    const std::size_t periods = panel.num_periods();
    const std::size_t col = panel.column(t);
    const auto y = panel.outcomes();
    double sum = 0.0;
    for (std::size_t i = 0; i < panel.num_units(); ++i) {
        if (panel.units()[i].group == g) sum += y[i * periods + col];
    }
    return sum / static_cast<double>(panel.count(g));
}

double group_gap(const PanelDataset& panel, int t) {
    return group_mean(panel, t, Group::Treated) - group_mean(panel, t, Group::Control);
}

}  // namespace evstudy
