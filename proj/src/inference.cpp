#include "evstudy/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "evstudy/parallel.hpp"
#include "evstudy/random.hpp"

namespace evstudy {

void validate(const BootstrapConfig& config) {
    if (config.replications < 2) throw std::invalid_argument("bootstrap needs at least 2 replications");
    if (!(config.level > 0.0 && config.level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
}

double sample_sd(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

PanelDataset resample(const PanelDataset& panel, std::uint64_t seed) {
    std::vector<std::size_t> treated;
    std::vector<std::size_t> control;
    for (std::size_t i = 0; i < panel.num_units(); ++i) (panel.treated(i) ? treated : control).push_back(i);

    std::mt19937_64 engine(seed);
    const std::size_t n = panel.num_units();
    const std::size_t periods = panel.num_periods();
    std::vector<UnitInfo> units;
    units.reserve(n);
    std::vector<double> outcomes;
    outcomes.reserve(n * periods);
    for (const auto* stratum : {&treated, &control}) {
        for (std::size_t draw = 0; draw < stratum->size(); ++draw) {
            const std::size_t src = (*stratum)[uniform_index(engine, stratum->size())];
            // Fresh ids keep duplicated units distinct and preserve draw order.
            std::string id = std::to_string(units.size());
            id.insert(0, 8 - std::min<std::size_t>(8, id.size()), '0');
            units.push_back({"b" + id, panel.unit(src).group});
            const auto y = panel.unit_outcomes(src);
            outcomes.insert(outcomes.end(), y.begin(), y.end());
        }
    }
    return PanelDataset::from_grid(std::move(units), panel.t_min(), panel.t_max(), std::move(outcomes));
}

}  // namespace

BootstrapDraws bootstrap_draws(const PanelDataset& panel, EstimatorTag tag, const BootstrapConfig& config,
                               const EstimatorOptions& options) {
    validate(config);
    BootstrapDraws out;
    out.point = estimate(panel, tag, options);

    const auto b_count = static_cast<std::size_t>(config.replications);
    std::vector<EventStudyEstimate> reps(b_count);
    parallel_for(b_count, [&](std::size_t b) {
        reps[b] = estimate(resample(panel, derive_seed(config.seed, SeedStream::Bootstrap, b)), tag, options);
    }, config.threads);

    for (const auto& [r, value] : out.point.coefficients) {
        auto& column = out.replicates[r];
        column.reserve(b_count);
        for (const auto& rep : reps) column.push_back(rep.coefficients.at(r));
    }
    return out;
}

EventStudyEstimate bootstrap(const PanelDataset& panel, EstimatorTag tag, const BootstrapConfig& config,
                             const EstimatorOptions& options) {
    return summarize(bootstrap_draws(panel, tag, config, options), config);
}

EventStudyEstimate summarize(const BootstrapDraws& draws, const BootstrapConfig& config) {
    validate(config);
    EventStudyEstimate out = draws.point;

    const boost::math::normal standard_normal;
    const double z = boost::math::quantile(standard_normal, 0.5 + config.level / 2.0);
    const double tail = (1.0 - config.level) / 2.0;

    std::map<RelativeTime, double> se;
    std::map<RelativeTime, ConfidenceInterval> ci;
    for (const auto& [r, column] : draws.replicates) {
        const double s = sample_sd(column);
        se[r] = s;
        const double point = out.coefficients.at(r);
        if (config.method == IntervalMethod::NormalApproximation) {
            ci[r] = {point - z * s, point + z * s};
        } else {
            ci[r] = {quantile(column, tail), quantile(column, 1.0 - tail)};
        }
    }
    out.se = std::move(se);
    out.ci = std::move(ci);
    out.ci_level = config.level;
    return out;
}

}  // namespace evstudy
