#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "evstudy/dgp.hpp"
#include "evstudy/estimators.hpp"

namespace evstudy {

struct McCoefficient {
    double mean = 0.0;
    double population = 0.0;
    double abs_deviation = 0.0;
    /// Standard deviation across draws divided by sqrt(draws).
    double mc_se = 0.0;
};

struct McEstimatorSummary {
    EstimatorTag estimator = EstimatorTag::Twfe;
    std::map<RelativeTime, McCoefficient> coefficients;
    double max_abs_deviation = 0.0;
    /// max over r of |mean - population| / mc_se.
    double max_deviation_in_se = 0.0;
};

struct McReport {
    int draws = 0;
    std::uint64_t master_seed = 0;
    DgpConfig dgp;
    std::vector<McEstimatorSummary> estimators;

    [[nodiscard]] const McEstimatorSummary& summary(EstimatorTag tag) const;
};

/**
 * Repeated simulation. Draw k simulates with the config's seed replaced by
 * derive_seed(master_seed, SeedStream::MonteCarlo, k) and runs every requested
 * estimator on it. Per-draw coefficient vectors are stored by draw index and
 * reduced in index order, so the report is independent of the schedule.
 * Throws std::invalid_argument when draws < 2.
 */
[[nodiscard]] McReport run_mc(const DgpConfig& dgp, const std::vector<EstimatorTag>& estimators, int draws,
                              std::uint64_t master_seed, const EstimatorOptions& options = {},
                              unsigned threads = 0);

}  // namespace evstudy
