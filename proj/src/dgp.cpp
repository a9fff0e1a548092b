#include "evstudy/dgp.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "evstudy/random.hpp"

namespace evstudy {

void validate(const DgpConfig& config) {
    std::ostringstream msg;
    if (config.t_min > -1) msg << "t_min must be <= -1 (got " << config.t_min << "); ";
    if (config.t_max < 1) msg << "t_max must be >= 1 (got " << config.t_max << "); ";
    if (config.n_treated < 1) msg << "n_treated must be >= 1; ";
    if (config.n_control < 1) msg << "n_control must be >= 1; ";
    if (!(config.error_sd > 0.0) || !std::isfinite(config.error_sd)) msg << "error_sd must be positive and finite; ";
    if (!std::isfinite(config.gamma)) msg << "gamma must be finite; ";
    const std::string problems = msg.str();
    if (!problems.empty()) throw InvalidConfig("invalid DGP config: " + problems.substr(0, problems.size() - 2));
}

std::string simulated_unit_id(std::size_t index, std::size_t total) {
    std::size_t width = 4;
    for (std::size_t n = total; n >= 10000; n /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return "u" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

PanelDataset simulate(const DgpConfig& config) {
    validate(config);
    const auto n_units = static_cast<std::size_t>(config.n_treated + config.n_control);
    const auto periods = static_cast<std::size_t>(config.t_max - config.t_min + 1);

    std::vector<UnitInfo> units;
    units.reserve(n_units);
    std::vector<double> outcomes;
    outcomes.reserve(n_units * periods);

    NormalSource noise(derive_seed(config.seed, SeedStream::Dgp, 0));
    for (std::size_t i = 0; i < n_units; ++i) {
        const bool treated = i < static_cast<std::size_t>(config.n_treated);
        units.push_back({simulated_unit_id(i, n_units), treated ? Group::Treated : Group::Control});
        for (int t = config.t_min; t <= config.t_max; ++t) {
            const double trend = treated ? config.gamma * t : 0.0;
            outcomes.push_back(trend + config.error_sd * noise());
        }
    }
    return PanelDataset::from_grid(std::move(units), config.t_min, config.t_max, std::move(outcomes));
}

double expected_outcome(const DgpConfig& config, int t, Group g) {
    return g == Group::Treated ? config.gamma * t : 0.0;
}

}  // namespace evstudy
