#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evstudy/fixed_effects.hpp"
#include "evstudy/panel.hpp"

namespace evstudy {

enum class EstimatorTag {
    Twfe,             ///< dynamic two-way fixed effects, base period 0
    CsDcdhDefault,    ///< Callaway-Sant'Anna / de Chaisemartin-D'Haultfoeuille, varying base
    CsDcdhUniversal,  ///< same, universal base period 0
    Bjs,              ///< Borusyak-Jaravel-Spiess imputation
};

inline constexpr std::array<EstimatorTag, 4> kAllEstimators = {
    EstimatorTag::Twfe, EstimatorTag::CsDcdhDefault, EstimatorTag::CsDcdhUniversal, EstimatorTag::Bjs};

class UnknownEstimator : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

[[nodiscard]] std::string_view to_string(EstimatorTag tag) noexcept;
/// Accepts the canonical names (twfe, cs_dcdh_default, cs_dcdh_universal, bjs).
[[nodiscard]] EstimatorTag parse_estimator(std::string_view name);

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;

    friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

struct EventStudyEstimate {
    EstimatorTag estimator = EstimatorTag::Twfe;
    std::map<RelativeTime, double> coefficients;
    std::set<RelativeTime> omitted;
    std::optional<std::map<RelativeTime, double>> se;
    std::optional<std::map<RelativeTime, ConfidenceInterval>> ci;
    std::optional<double> ci_level;

    friend bool operator==(const EventStudyEstimate&, const EventStudyEstimate&) = default;
};

struct EstimatorOptions {
    /// Number of pre-treatment BJS coefficients (relative times -k..-1). Earlier
    /// periods pool into the omitted reference. Empty means all (-T_pre..-1).
    std::optional<int> bjs_pre_coefficients;
};

/// Treated cells (i, t >= 1) with their imputed effects Y_it - Yhat_it.
struct ImputationResult {
    std::map<std::pair<std::size_t, int>, double> tau;
    FixedEffectsFit fit;
};

// Dynamic TWFE. beta_r = [gap(r+1)] - [gap(0)] for r != -1, where gap(t) is the
// treated-minus-control difference in period-t means.
[[nodiscard]] EventStudyEstimate twfe_closed_form(const PanelDataset& panel);

/// Dynamic TWFE solved as a regression: relative-time indicators for treated
/// units are partialled out against unit and period effects by double
/// demeaning, then the small normal-equation system is solved.
[[nodiscard]] EventStudyEstimate twfe_regression(const PanelDataset& panel);

/// Short differences before treatment (r+1 vs r), long differences after (r+1 vs 0).
/// The earliest relative time has no prior period and is omitted.
[[nodiscard]] EventStudyEstimate cs_dcdh_default(const PanelDataset& panel);

/// Long differences against period 0 on both sides; omitted = {-1}.
[[nodiscard]] EventStudyEstimate cs_dcdh_universal(const PanelDataset& panel);

/// Two-way fixed effects fit on untreated cells: all control cells plus treated cells with t <= 0.
[[nodiscard]] FixedEffectsFit fit_twfe_on_untreated(const PanelDataset& panel);

[[nodiscard]] ImputationResult impute_treated_effects(const PanelDataset& panel);

/**
 * BJS event study computed the way the imputation procedure does it.
 *
 * Post-treatment: average of tau_it = Y_it - Yhat_it over treated units at t = r + 1,
 * with Yhat from fit_twfe_on_untreated.
 *
 * Pre-treatment: dynamic TWFE on untreated cells only, with indicators for the
 * last k pre-periods of treated units (k = all but the earliest by default).
 * The remaining earlier periods form the omitted reference.
 */
[[nodiscard]] EventStudyEstimate bjs_imputation(const PanelDataset& panel, const EstimatorOptions& options = {});

/// BJS via the difference-of-means reduction: pre coefficients compare period
/// r+1 with the (mean of the) omitted early periods, post coefficients compare
/// with each unit's average over t <= 0.
[[nodiscard]] EventStudyEstimate bjs_closed_form(const PanelDataset& panel, const EstimatorOptions& options = {});

/// Dispatch used by the bootstrap, Monte Carlo driver and CLI. TWFE and BJS run
/// through the regression / imputation algorithms.
[[nodiscard]] EventStudyEstimate estimate(const PanelDataset& panel, EstimatorTag tag,
                                          const EstimatorOptions& options = {});

/// Number of BJS pre-treatment coefficients implied by the options; throws
/// std::invalid_argument when out of [0, T_pre].
[[nodiscard]] int resolve_bjs_pre_coefficients(const PanelDataset& panel, const EstimatorOptions& options);

}  // namespace evstudy
