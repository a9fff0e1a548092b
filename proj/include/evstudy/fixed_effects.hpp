#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace evstudy {

class SingularDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unit and period effects of Y_it = alpha_i + lambda_t + e_it.
/// Only alpha_i + lambda_t is identified; the earliest period's lambda is pinned to zero.
struct FixedEffectsFit {
    std::vector<double> alpha;   // indexed like PanelDataset::units()
    std::vector<double> lambda;  // indexed by period column, t = t_min + column
    int t_min = 0;
    std::string normalization;

    [[nodiscard]] double predict(std::size_t unit, int t) const {
        return alpha.at(unit) + lambda.at(static_cast<std::size_t>(t - t_min));
    }
};

/**
 * Least-squares projection onto unit + period dummies restricted to a subset of
 * cells of a units x periods grid.
 *
 * The unit effects are eliminated analytically, leaving a (periods-1) x (periods-1)
 * positive definite system for the period effects that is factored once and
 * reused for every right-hand side. When every cell is included the residuals
 * come from the closed-form double-demeaning pass instead.
 */
class TwoWayAbsorber {
public:
    /// `mask` is unit-major with size units * periods; nonzero marks an included cell.
    /// Throws SingularDesign if some unit or period has no cell, or the
    /// unit-period incidence graph is disconnected.
    TwoWayAbsorber(std::size_t units, int t_min, int t_max, std::vector<unsigned char> mask);

    [[nodiscard]] std::size_t units() const noexcept { return units_; }
    [[nodiscard]] std::size_t periods() const noexcept { return periods_; }
    [[nodiscard]] bool balanced() const noexcept { return balanced_; }
    [[nodiscard]] bool included(std::size_t unit, std::size_t column) const {
        return mask_[unit * periods_ + column] != 0;
    }

    /// Fits the two-way model to `values` (grid-shaped; excluded cells ignored).
    [[nodiscard]] FixedEffectsFit fit(std::span<const double> values) const;

    /// Residuals of the projection on included cells; excluded cells are zero.
    [[nodiscard]] std::vector<double> residualize(std::span<const double> values) const;

private:
    [[nodiscard]] Eigen::VectorXd solve_lambda(std::span<const double> values) const;
    [[nodiscard]] std::vector<double> double_demean(std::span<const double> values) const;

    std::size_t units_;
    std::size_t periods_;
    int t_min_;
    std::vector<unsigned char> mask_;
    std::vector<double> unit_count_;
    bool balanced_;
    Eigen::LLT<Eigen::MatrixXd> reduced_;
};

/// OLS of y on the two-way fixed effects plus extra regressor columns, all
/// restricted to the absorber's cells (Frisch-Waugh-Lovell). Returns the
/// coefficients on `regressors`, in order.
[[nodiscard]] std::vector<double> absorbed_ols(const TwoWayAbsorber& absorber, std::span<const double> y,
                                               const std::vector<std::vector<double>>& regressors);

}  // namespace evstudy
