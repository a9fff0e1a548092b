#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "evstudy/panel.hpp"

namespace evstudy {

/**
 * Linear parallel-trends violation with no treatment effect:
 *   treated:  Y_it = gamma * t + eps_it
 *   control:  Y_it = eps_it
 * with eps_it iid normal(0, error_sd^2), treatment beginning at t = 1.
 * Defaults reproduce the illustrative single-draw design.
 */
struct DgpConfig {
    double gamma = 0.5;
    int t_min = -15;
    int t_max = 10;
    int n_treated = 50;
    int n_control = 50;
    double error_sd = 1.0;
    std::uint64_t seed = 1;

    friend bool operator==(const DgpConfig&, const DgpConfig&) = default;
};

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InvalidConfig when an invariant does not hold.
void validate(const DgpConfig& config);

/// Simulated unit ids are zero-padded so lexicographic order equals draw order:
/// treated units come first, then controls.
[[nodiscard]] std::string simulated_unit_id(std::size_t index, std::size_t total);

/// Draws one panel. Noise is drawn unit by unit (id order), periods ascending,
/// from a generator seeded with derive_seed(seed, SeedStream::Dgp, 0).
[[nodiscard]] PanelDataset simulate(const DgpConfig& config);

/// E[Y_it | D_i = g] under the configuration.
[[nodiscard]] double expected_outcome(const DgpConfig& config, int t, Group g);

}  // namespace evstudy
