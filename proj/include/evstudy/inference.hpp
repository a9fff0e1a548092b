#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "evstudy/estimators.hpp"

namespace evstudy {

enum class IntervalMethod { NormalApproximation, Percentile };

struct BootstrapConfig {
    int replications = 999;
    std::uint64_t seed = 1;
    double level = 0.95;
    IntervalMethod method = IntervalMethod::NormalApproximation;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;
};

/// Throws std::invalid_argument when replications < 2 or level is outside (0, 1).
void validate(const BootstrapConfig& config);

/// Coefficients of every replicate, keyed by relative time; each vector has
/// `replications` entries in replicate order.
struct BootstrapDraws {
    EventStudyEstimate point;
    std::map<RelativeTime, std::vector<double>> replicates;
};

/// Stratified unit bootstrap: each replicate resamples n_treated treated units
/// and n_control control units with replacement and re-runs the estimator.
/// Replicate b draws its indices from derive_seed(seed, SeedStream::Bootstrap, b),
/// so the output does not depend on how replicates are scheduled.
[[nodiscard]] BootstrapDraws bootstrap_draws(const PanelDataset& panel, EstimatorTag tag,
                                             const BootstrapConfig& config, const EstimatorOptions& options = {});

/// Point estimate with se and ci computed from already drawn replicates.
[[nodiscard]] EventStudyEstimate summarize(const BootstrapDraws& draws, const BootstrapConfig& config);

/// Point estimate with se (replicate standard deviation) and ci filled in.
[[nodiscard]] EventStudyEstimate bootstrap(const PanelDataset& panel, EstimatorTag tag,
                                           const BootstrapConfig& config, const EstimatorOptions& options = {});

/// Sample standard deviation (n - 1 denominator).
[[nodiscard]] double sample_sd(const std::vector<double>& values);

/// Linear-interpolation quantile of unsorted values, p in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double p);

}  // namespace evstudy
