#include "evstudy/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "evstudy/oracle.hpp"
#include "evstudy/parallel.hpp"
#include "evstudy/random.hpp"

namespace evstudy {

const McEstimatorSummary& McReport::summary(EstimatorTag tag) const {
    for (const auto& s : estimators) {
        if (s.estimator == tag) return s;
    }
    throw std::out_of_range("estimator not in report: " + std::string(to_string(tag)));
}

McReport run_mc(const DgpConfig& dgp, const std::vector<EstimatorTag>& estimators, int draws,
                std::uint64_t master_seed, const EstimatorOptions& options, unsigned threads) {
    if (draws < 2) throw std::invalid_argument("Monte Carlo needs at least 2 draws");
    if (estimators.empty()) throw std::invalid_argument("no estimators requested");
    validate(dgp);

    // per_draw[k][e] holds the coefficient vector of estimator e on draw k.
    const auto n_draws = static_cast<std::size_t>(draws);
    std::vector<std::vector<EventStudyEstimate>> per_draw(n_draws);
    parallel_for(n_draws, [&](std::size_t k) {
        DgpConfig config = dgp;
        config.seed = derive_seed(master_seed, SeedStream::MonteCarlo, k);
        const PanelDataset panel = simulate(config);
        auto& row = per_draw[k];
        row.reserve(estimators.size());
        for (EstimatorTag tag : estimators) row.push_back(estimate(panel, tag, options));
    }, threads);

    McReport report;
    report.draws = draws;
    report.master_seed = master_seed;
    report.dgp = dgp;
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        const auto curve = oracle::population_curve(estimators[e], dgp.gamma, dgp.t_min, dgp.t_max,
                                                    options.bjs_pre_coefficients);
        McEstimatorSummary summary;
        summary.estimator = estimators[e];
        for (const auto& [r, population] : curve.values) {
            double sum = 0.0;
            for (const auto& row : per_draw) sum += row[e].coefficients.at(r);
            const double mean = sum / static_cast<double>(draws);
            double ss = 0.0;
            for (const auto& row : per_draw) {
                const double d = row[e].coefficients.at(r) - mean;
                ss += d * d;
            }
            McCoefficient c;
            c.mean = mean;
            c.population = population;
            c.abs_deviation = std::abs(mean - population);
            c.mc_se = std::sqrt(ss / static_cast<double>(draws - 1)) / std::sqrt(static_cast<double>(draws));
            summary.max_abs_deviation = std::max(summary.max_abs_deviation, c.abs_deviation);
            if (c.mc_se > 0.0) summary.max_deviation_in_se = std::max(summary.max_deviation_in_se, c.abs_deviation / c.mc_se);
            summary.coefficients[r] = c;
        }
        report.estimators.push_back(std::move(summary));
    }
    return report;
}

}  // namespace evstudy
