#include "evstudy/estimators.hpp"

#include <string>

namespace evstudy {

std::string_view to_string(EstimatorTag tag) noexcept {
    switch (tag) {
        case EstimatorTag::Twfe: return "twfe";
        case EstimatorTag::CsDcdhDefault: return "cs_dcdh_default";
        case EstimatorTag::CsDcdhUniversal: return "cs_dcdh_universal";
        case EstimatorTag::Bjs: return "bjs";
    }
    return "unknown";
}

EstimatorTag parse_estimator(std::string_view name) {
    for (EstimatorTag tag : kAllEstimators) {
        if (to_string(tag) == name) return tag;
    }
    throw UnknownEstimator("unknown estimator '" + std::string(name) +
                           "' (expected twfe, cs_dcdh_default, cs_dcdh_universal or bjs)");
}

namespace {

/// Treated-minus-control mean gap for every period, indexed by column.
std::vector<double> gaps_by_period(const PanelDataset& panel) {
    std::vector<double> gaps(panel.num_periods());
    for (int t = panel.t_min(); t <= panel.t_max(); ++t) gaps[panel.column(t)] = group_gap(panel, t);
    return gaps;
}

std::vector<double> treated_indicator(const PanelDataset& panel, int t) {
    std::vector<double> x(panel.num_units() * panel.num_periods(), 0.0);
    for (std::size_t i = 0; i < panel.num_units(); ++i) {
        if (panel.treated(i)) x[i * panel.num_periods() + panel.column(t)] = 1.0;
    }
    return x;
}

std::vector<unsigned char> untreated_mask(const PanelDataset& panel) {
    std::vector<unsigned char> mask(panel.num_units() * panel.num_periods(), 1);
    for (std::size_t i = 0; i < panel.num_units(); ++i) {
        if (!panel.treated(i)) continue;
        for (int t = kTreatmentPeriod; t <= panel.t_max(); ++t) mask[i * panel.num_periods() + panel.column(t)] = 0;
    }
    return mask;
}

TwoWayAbsorber untreated_absorber(const PanelDataset& panel) {
    return TwoWayAbsorber(panel.num_units(), panel.t_min(), panel.t_max(), untreated_mask(panel));
}

}  // namespace

int resolve_bjs_pre_coefficients(const PanelDataset& panel, const EstimatorOptions& options) {
    const int available = panel.pre_periods();
    const int k = options.bjs_pre_coefficients.value_or(available);
    if (k < 0 || k > available) {
        throw std::invalid_argument("BJS pre-treatment coefficient count " + std::to_string(k) + " outside [0, " +
                                    std::to_string(available) + "]");
    }
    return k;
}

EventStudyEstimate twfe_closed_form(const PanelDataset& panel) {
    const auto gaps = gaps_by_period(panel);
    const double base = gaps[panel.column(0)];
    EventStudyEstimate out;
    out.estimator = EstimatorTag::Twfe;
    out.omitted = {-1};
    for (RelativeTime r = panel.min_relative_time(); r <= panel.max_relative_time(); ++r) {
        if (r == -1) continue;
        out.coefficients[r] = gaps[panel.column(period_of(r))] - base;
    }
    return out;
}

EventStudyEstimate twfe_regression(const PanelDataset& panel) {
    const TwoWayAbsorber absorber(panel.num_units(), panel.t_min(), panel.t_max(),
                                  std::vector<unsigned char>(panel.num_units() * panel.num_periods(), 1));
    std::vector<RelativeTime> times;
    std::vector<std::vector<double>> regressors;
    for (RelativeTime r = panel.min_relative_time(); r <= panel.max_relative_time(); ++r) {
        if (r == -1) continue;
        times.push_back(r);
        regressors.push_back(treated_indicator(panel, period_of(r)));
    }
    const auto beta = absorbed_ols(absorber, panel.outcomes(), regressors);

    EventStudyEstimate out;
    out.estimator = EstimatorTag::Twfe;
    out.omitted = {-1};
    for (std::size_t j = 0; j < times.size(); ++j) out.coefficients[times[j]] = beta[j];
    return out;
}

EventStudyEstimate cs_dcdh_default(const PanelDataset& panel) {
    const auto gaps = gaps_by_period(panel);
    const double base = gaps[panel.column(0)];
    EventStudyEstimate out;
    out.estimator = EstimatorTag::CsDcdhDefault;
    out.omitted = {panel.min_relative_time()};
    for (RelativeTime r = panel.min_relative_time() + 1; r <= panel.max_relative_time(); ++r) {
        const double current = gaps[panel.column(period_of(r))];
        out.coefficients[r] = r < 0 ? current - gaps[panel.column(r)] : current - base;
    }
    return out;
}

EventStudyEstimate cs_dcdh_universal(const PanelDataset& panel) {
    const auto gaps = gaps_by_period(panel);
    const double base = gaps[panel.column(0)];
    EventStudyEstimate out;
    out.estimator = EstimatorTag::CsDcdhUniversal;
    out.omitted = {-1};
    for (RelativeTime r = panel.min_relative_time(); r <= panel.max_relative_time(); ++r) {
        if (r != -1) out.coefficients[r] = gaps[panel.column(period_of(r))] - base;
    }
    return out;
}

FixedEffectsFit fit_twfe_on_untreated(const PanelDataset& panel) {
    return untreated_absorber(panel).fit(panel.outcomes());
}

ImputationResult impute_treated_effects(const PanelDataset& panel) {
    ImputationResult out;
    out.fit = fit_twfe_on_untreated(panel);
    for (std::size_t i = 0; i < panel.num_units(); ++i) {
        if (!panel.treated(i)) continue;
        for (int t = kTreatmentPeriod; t <= panel.t_max(); ++t) {
            out.tau[{i, t}] = panel.outcome(i, t) - out.fit.predict(i, t);
        }
    }
    return out;
}

EventStudyEstimate bjs_imputation(const PanelDataset& panel, const EstimatorOptions& options) {
    const int k = resolve_bjs_pre_coefficients(panel, options);
    const TwoWayAbsorber absorber = untreated_absorber(panel);

    EventStudyEstimate out;
    out.estimator = EstimatorTag::Bjs;
    for (RelativeTime r = panel.min_relative_time(); r < -k; ++r) out.omitted.insert(r);

    // Pre-treatment: indicators for t = -k+1 .. 0 on treated units, fit on untreated cells.
    std::vector<RelativeTime> pre_times;
    std::vector<std::vector<double>> regressors;
    for (RelativeTime r = -k; r <= -1; ++r) {
        pre_times.push_back(r);
        regressors.push_back(treated_indicator(panel, period_of(r)));
    }
    const auto delta = absorbed_ols(absorber, panel.outcomes(), regressors);
    for (std::size_t j = 0; j < pre_times.size(); ++j) out.coefficients[pre_times[j]] = delta[j];

    // Post-treatment: average imputed effect per horizon.
    const FixedEffectsFit fit = absorber.fit(panel.outcomes());
    const auto n_treated = static_cast<double>(panel.count(Group::Treated));
    for (int t = kTreatmentPeriod; t <= panel.t_max(); ++t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < panel.num_units(); ++i) {
            if (panel.treated(i)) sum += panel.outcome(i, t) - fit.predict(i, t);
        }
        out.coefficients[relative_time_of(t)] = sum / n_treated;
    }
    return out;
}

EventStudyEstimate bjs_closed_form(const PanelDataset& panel, const EstimatorOptions& options) {
    const int k = resolve_bjs_pre_coefficients(panel, options);
    const auto gaps = gaps_by_period(panel);

    EventStudyEstimate out;
    out.estimator = EstimatorTag::Bjs;

    // Reference for pre coefficients: mean gap over the pooled periods t_min .. -k.
    double pooled = 0.0;
    int pooled_count = 0;
    for (int t = panel.t_min(); t <= -k; ++t) {
        pooled += gaps[panel.column(t)];
        ++pooled_count;
        out.omitted.insert(relative_time_of(t));
    }
    pooled /= pooled_count;
    for (RelativeTime r = -k; r <= -1; ++r) out.coefficients[r] = gaps[panel.column(period_of(r))] - pooled;

    double pre_mean = 0.0;
    for (int t = panel.t_min(); t <= 0; ++t) pre_mean += gaps[panel.column(t)];
    pre_mean /= static_cast<double>(panel.pre_periods() + 1);
    for (int t = kTreatmentPeriod; t <= panel.t_max(); ++t) {
        out.coefficients[relative_time_of(t)] = gaps[panel.column(t)] - pre_mean;
    }
    return out;
}

EventStudyEstimate estimate(const PanelDataset& panel, EstimatorTag tag, const EstimatorOptions& options) {
    switch (tag) {
        case EstimatorTag::Twfe: return twfe_regression(panel);
        case EstimatorTag::CsDcdhDefault: return cs_dcdh_default(panel);
        case EstimatorTag::CsDcdhUniversal: return cs_dcdh_universal(panel);
        case EstimatorTag::Bjs: return bjs_imputation(panel, options);
    }
    throw UnknownEstimator("unknown estimator tag");
}

}  // namespace evstudy
