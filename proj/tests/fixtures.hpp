#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evstudy/panel.hpp"

namespace evstudy::fixtures {

/// Two units over t = -2..1. Treated outcomes (0, 1, 2, 4), control (0, 0, 0, 1).
inline PanelDataset four_cell_fixture() {
    const std::vector<PanelRow> rows = {
        {"treated", -2, 1, 0.0}, {"treated", -1, 1, 1.0}, {"treated", 0, 1, 2.0}, {"treated", 1, 1, 4.0},
        {"control", -2, 0, 0.0}, {"control", -1, 0, 0.0}, {"control", 0, 0, 0.0}, {"control", 1, 0, 1.0},
    };
    return PanelDataset::from_rows(rows);
}

struct FuzzShape {
    int t_min;
    int t_max;
    int n_treated;
    int n_control;
};

/// Random balanced panel with unit effects, period effects, group-specific
/// period shocks and noise, drawn from its own engine (independent of the DGP).
inline PanelDataset fuzz_panel(std::uint64_t seed, FuzzShape* shape_out = nullptr) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    auto unit_real = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };

    FuzzShape shape{-pick(1, 7), pick(1, 6), pick(1, 7), pick(1, 7)};
    if (shape_out) *shape_out = shape;
    const double scale = std::pow(10.0, pick(-2, 2));
    const int periods = shape.t_max - shape.t_min + 1;

    std::vector<double> period_effect(static_cast<std::size_t>(periods));
    std::vector<double> treated_shock(static_cast<std::size_t>(periods));
    for (int c = 0; c < periods; ++c) {
        period_effect[static_cast<std::size_t>(c)] = 3.0 * unit_real();
        treated_shock[static_cast<std::size_t>(c)] = 2.0 * unit_real();
    }
    std::vector<UnitInfo> units;
    std::vector<double> y;
    const int n = shape.n_treated + shape.n_control;
    for (int i = 0; i < n; ++i) {
        const bool treated = i < shape.n_treated;
        units.push_back({"f" + std::to_string(1000 + i), treated ? Group::Treated : Group::Control});
        const double unit_effect = 5.0 * unit_real();
        for (int c = 0; c < periods; ++c) {
            const double v = unit_effect + period_effect[static_cast<std::size_t>(c)] +
                             (treated ? treated_shock[static_cast<std::size_t>(c)] : 0.0) + unit_real();
            y.push_back(scale * v);
        }
    }
    return PanelDataset::from_grid(std::move(units), shape.t_min, shape.t_max, std::move(y));
}

/**
 * Dense least squares with explicit dummy columns: an intercept, N-1 unit
 * dummies, T-1 period dummies and the given extra regressors, restricted to
 * cells where include(i, t) holds. Solved by column-pivoting QR on the full
 * design. Returns the coefficients of the extra regressors.
 */
template <typename Include, typename Extra>
std::vector<double> dummy_variable_ols(const PanelDataset& panel, Include include, const std::vector<int>& extra_ids,
                                       Extra extra_value) {
    const auto n = static_cast<int>(panel.num_units());
    const auto t_count = static_cast<int>(panel.num_periods());
    const int k_extra = static_cast<int>(extra_ids.size());
    const int cols = 1 + (n - 1) + (t_count - 1) + k_extra;
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < n; ++i) {
        for (int t = panel.t_min(); t <= panel.t_max(); ++t) {
            if (!include(static_cast<std::size_t>(i), t)) continue;
            std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
            row[0] = 1.0;
            if (i > 0) row[static_cast<std::size_t>(i)] = 1.0;
            const int c = t - panel.t_min();
            if (c > 0) row[static_cast<std::size_t>(n - 1 + c)] = 1.0;
            for (int k = 0; k < k_extra; ++k) {
                row[static_cast<std::size_t>(n + t_count - 1 + k)] =
                    extra_value(static_cast<std::size_t>(i), t, extra_ids[static_cast<std::size_t>(k)]);
            }
            rows.push_back(std::move(row));
            y.push_back(panel.outcome(static_cast<std::size_t>(i), t));
        }
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), cols);
    Eigen::VectorXd yv(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < cols; ++c) x(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        yv(static_cast<Eigen::Index>(r)) = y[r];
    }
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(yv);
    std::vector<double> out;
    for (int k = 0; k < k_extra; ++k) out.push_back(beta(cols - k_extra + k));
    return out;
}

}  // namespace evstudy::fixtures
