#include "evstudy/oracle.hpp"

#include <string>
#include <utility>

namespace evstudy::oracle {

namespace {

[[noreturn]] void omitted(RelativeTime r) {
    throw OmittedCategory("relative time " + std::to_string(r) + " is the omitted category");
}

void check_in_range(RelativeTime r, int t_min) {
    if (period_of(r) < t_min) {
        throw std::invalid_argument("relative time " + std::to_string(r) + " precedes the panel");
    }
}

}  // namespace

double population_twfe(double gamma, RelativeTime r) {
    if (r == -1) omitted(r);
    return gamma * (r + 1);
}

double population_cs_dcdh(double gamma, RelativeTime r) { return r < 0 ? gamma : gamma * (r + 1); }

double population_cs_dcdh(double gamma, RelativeTime r, int t_min) {
    check_in_range(r, t_min);
    if (r == relative_time_of(t_min)) omitted(r);
    return population_cs_dcdh(gamma, r);
}

double population_bjs(double gamma, RelativeTime r, int t_min) {
    check_in_range(r, t_min);
    if (r == relative_time_of(t_min)) omitted(r);
    const double pre_periods = -t_min;
    return r < 0 ? gamma * (r + 1 + pre_periods) : gamma * (r + 1 + pre_periods / 2.0);
}

double population_bjs(double gamma, RelativeTime r, int t_min, int pre_coefficients) {
    check_in_range(r, t_min);
    if (r >= 0) return population_bjs(gamma, r, t_min);
    if (r < -pre_coefficients) omitted(r);
    // Mean of gamma * t over the pooled periods t_min .. -k.
    const double pooled_mean = gamma * (t_min - pre_coefficients) / 2.0;
    return gamma * (r + 1) - pooled_mean;
}

PopulationCurve population_curve(EstimatorTag estimator, double gamma, int t_min, int t_max,
                                 std::optional<int> bjs_pre_coefficients) {
    PopulationCurve curve{estimator, gamma, t_min, t_max, {}};
    const int k = bjs_pre_coefficients.value_or(-t_min);
    for (RelativeTime r = relative_time_of(t_min); r <= relative_time_of(t_max); ++r) {
        switch (estimator) {
            case EstimatorTag::Twfe:
            case EstimatorTag::CsDcdhUniversal:
                if (r != -1) curve.values[r] = population_twfe(gamma, r);
                break;
            case EstimatorTag::CsDcdhDefault:
                if (r != relative_time_of(t_min)) curve.values[r] = population_cs_dcdh(gamma, r, t_min);
                break;
            case EstimatorTag::Bjs:
                if (r >= -k) curve.values[r] = population_bjs(gamma, r, t_min, k);
                break;
        }
    }
    return curve;
}

double brute_force_did(const PanelDataset& panel, RelativeTime r_target, const BaseSpec& base) {
    const int target = period_of(r_target);
    int base_first = 0;
    int base_last = 0;
    if (const auto* p = std::get_if<BasePeriod>(&base)) {
        base_first = base_last = p->t;
    } else if (std::holds_alternative<BasePreMean>(base)) {
        base_first = panel.t_min();
        base_last = 0;
    } else if (std::holds_alternative<BasePriorPeriod>(base)) {
        base_first = base_last = r_target;
    } else {
        const auto& range = std::get<BasePeriodRange>(base);
        base_first = range.first;
        base_last = range.last;
    }
    for (int t : {target, base_first, base_last}) {
        if (t < panel.t_min() || t > panel.t_max()) {
            throw PanelError(PanelErrorKind::TimeOutOfRange, "oracle period " + std::to_string(t));
        }
    }
    if (base_first > base_last) throw std::invalid_argument("empty base range");

    // Index 0: control, 1: treated.
    double target_sum[2] = {0.0, 0.0};
    double target_n[2] = {0.0, 0.0};
    std::map<std::string, std::pair<double, double>> unit_base;  // sum, count
    std::map<std::string, int> unit_group;
    for (const PanelRow& row : panel.rows()) {
        const int t = static_cast<int>(row.time);
        unit_group[row.unit] = row.treated;
        if (t == target) {
            target_sum[row.treated] += row.outcome;
            target_n[row.treated] += 1.0;
        }
        if (t >= base_first && t <= base_last) {
            auto& acc = unit_base[row.unit];
            acc.first += row.outcome;
            acc.second += 1.0;
        }
    }
    double base_sum[2] = {0.0, 0.0};
    double base_n[2] = {0.0, 0.0};
    for (const auto& [unit, acc] : unit_base) {
        const int g = unit_group.at(unit);
        base_sum[g] += acc.first / acc.second;
        base_n[g] += 1.0;
    }
    const double treated_change = target_sum[1] / target_n[1] - base_sum[1] / base_n[1];
    const double control_change = target_sum[0] / target_n[0] - base_sum[0] / base_n[0];
    return treated_change - control_change;
}

BaseSpec matching_base(EstimatorTag estimator, RelativeTime r, const PanelDataset& panel,
                       std::optional<int> bjs_pre_coefficients) {
    switch (estimator) {
        case EstimatorTag::Twfe:
        case EstimatorTag::CsDcdhUniversal: return BasePeriod{0};
        case EstimatorTag::CsDcdhDefault: return r < 0 ? BaseSpec{BasePriorPeriod{}} : BaseSpec{BasePeriod{0}};
        case EstimatorTag::Bjs: {
            if (r >= 0) return BasePreMean{};
            const int k = bjs_pre_coefficients.value_or(panel.pre_periods());
            if (k == panel.pre_periods()) return BasePeriod{panel.t_min()};
            return BasePeriodRange{panel.t_min(), -k};
        }
    }
    throw std::invalid_argument("unknown estimator");
}

}  // namespace evstudy::oracle
