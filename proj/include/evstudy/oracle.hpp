#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <variant>

#include "evstudy/estimators.hpp"
#include "evstudy/panel.hpp"

namespace evstudy::oracle {

class OmittedCategory : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Population coefficients under the linear-violation, zero-effect design
// (treated mean gamma * t, control mean 0, treatment at t = 1).

/// gamma * (r + 1): a straight line through zero at r = -1. Throws OmittedCategory at r = -1.
[[nodiscard]] double population_twfe(double gamma, RelativeTime r);

/// gamma before treatment, gamma * (r + 1) after: a kink at r = 0.
/// The three-argument form throws OmittedCategory at the earliest relative time t_min - 1.
[[nodiscard]] double population_cs_dcdh(double gamma, RelativeTime r);
[[nodiscard]] double population_cs_dcdh(double gamma, RelativeTime r, int t_min);

/// gamma * (r + 1 + T_pre) before treatment, gamma * (r + 1 + T_pre / 2) after,
/// where T_pre = -t_min. The level drops by gamma * (T_pre / 2 - 1) at r = 0.
[[nodiscard]] double population_bjs(double gamma, RelativeTime r, int t_min);

/// BJS with only k pre-treatment coefficients: pre values are measured against
/// the mean of the pooled periods t_min .. -k.
[[nodiscard]] double population_bjs(double gamma, RelativeTime r, int t_min, int pre_coefficients);

struct PopulationCurve {
    EstimatorTag estimator = EstimatorTag::Twfe;
    double gamma = 0.0;
    int t_min = 0;
    int t_max = 0;
    std::map<RelativeTime, double> values;
};

/// Population values on exactly the relative times the estimator reports for a
/// panel spanning [t_min, t_max].
[[nodiscard]] PopulationCurve population_curve(EstimatorTag estimator, double gamma, int t_min, int t_max,
                                               std::optional<int> bjs_pre_coefficients = std::nullopt);

// Finite-sample oracle.

struct BasePeriod {
    int t;
};
struct BasePreMean {};
struct BasePriorPeriod {};
/// Mean over the inclusive period range [first, last].
struct BasePeriodRange {
    int first;
    int last;
};
using BaseSpec = std::variant<BasePeriod, BasePreMean, BasePriorPeriod, BasePeriodRange>;

/**
 * Difference-in-differences of period r_target + 1 against a base, computed by
 * literally walking every cell of the panel and accumulating group sums:
 *   BasePeriod{t0}      base is period t0
 *   BasePreMean         base is each unit's mean over t <= 0
 *   BasePriorPeriod     base is period r_target
 *   BasePeriodRange     base is each unit's mean over [first, last]
 * Throws PanelError(TimeOutOfRange) if a referenced period is missing.
 */
[[nodiscard]] double brute_force_did(const PanelDataset& panel, RelativeTime r_target, const BaseSpec& base);

/// Base specification that reproduces `estimator`'s coefficient at r.
[[nodiscard]] BaseSpec matching_base(EstimatorTag estimator, RelativeTime r, const PanelDataset& panel,
                                     std::optional<int> bjs_pre_coefficients = std::nullopt);

}  // namespace evstudy::oracle
