#include "evstudy/fixed_effects.hpp"

#include <numeric>
#include <string>

#include <Eigen/Cholesky>

namespace evstudy {

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

}  // namespace

TwoWayAbsorber::TwoWayAbsorber(std::size_t units, int t_min, int t_max, std::vector<unsigned char> mask)
    : units_(units),
      periods_(static_cast<std::size_t>(t_max - t_min + 1)),
      t_min_(t_min),
      mask_(std::move(mask)),
      unit_count_(units, 0.0),
      balanced_(true) {
    if (units_ == 0 || t_max < t_min) throw SingularDesign("empty grid");
    if (mask_.size() != units_ * periods_) throw std::invalid_argument("mask size does not match grid");

    std::vector<double> period_count(periods_, 0.0);
    DisjointSets components(units_ + periods_);
    for (std::size_t i = 0; i < units_; ++i) {
        for (std::size_t c = 0; c < periods_; ++c) {
            if (!included(i, c)) {
                balanced_ = false;
                continue;
            }
            unit_count_[i] += 1.0;
            period_count[c] += 1.0;
            components.join(i, units_ + c);
        }
    }
    for (std::size_t i = 0; i < units_; ++i) {
        if (unit_count_[i] == 0.0) throw SingularDesign("unit " + std::to_string(i) + " has no included cell");
    }
    for (std::size_t c = 0; c < periods_; ++c) {
        if (period_count[c] == 0.0) {
            throw SingularDesign("period " + std::to_string(t_min + static_cast<int>(c)) + " has no included cell");
        }
    }
    const std::size_t root = components.find(0);
    for (std::size_t node = 1; node < units_ + periods_; ++node) {
        if (components.find(node) != root) throw SingularDesign("fixed effects are not connected");
    }

    // Normal equations for lambda after eliminating alpha; lambda at column 0 is pinned.
    const auto n = static_cast<Eigen::Index>(periods_);
    Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(n, n);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < units_; ++i) {
        cols.clear();
        for (std::size_t c = 0; c < periods_; ++c) {
            if (included(i, c)) cols.push_back(c);
        }
        const double w = 1.0 / unit_count_[i];
        for (std::size_t c : cols) {
            reduced(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) += 1.0;
            for (std::size_t s : cols) reduced(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) -= w;
        }
    }
    if (n > 1) {
        reduced_.compute(reduced.bottomRightCorner(n - 1, n - 1));
        if (reduced_.info() != Eigen::Success) throw SingularDesign("period-effect system is not positive definite");
    }
}

Eigen::VectorXd TwoWayAbsorber::solve_lambda(std::span<const double> values) const {
    const auto n = static_cast<Eigen::Index>(periods_);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
    if (n == 1) return lambda;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < units_; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < periods_; ++c) {
            if (included(i, c)) sum += values[i * periods_ + c];
        }
        const double mean = sum / unit_count_[i];
        for (std::size_t c = 0; c < periods_; ++c) {
            if (included(i, c)) rhs(static_cast<Eigen::Index>(c)) += values[i * periods_ + c] - mean;
        }
    }
    lambda.tail(n - 1) = reduced_.solve(rhs.tail(n - 1));
    return lambda;
}

FixedEffectsFit TwoWayAbsorber::fit(std::span<const double> values) const {
    if (values.size() != units_ * periods_) throw std::invalid_argument("values size does not match grid");
    const Eigen::VectorXd lambda = solve_lambda(values);

    FixedEffectsFit out;
    out.t_min = t_min_;
    out.normalization = "lambda[t=" + std::to_string(t_min_) + "] = 0";
    out.lambda.assign(lambda.data(), lambda.data() + lambda.size());
    out.alpha.resize(units_);
    for (std::size_t i = 0; i < units_; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < periods_; ++c) {
            if (included(i, c)) sum += values[i * periods_ + c] - out.lambda[c];
        }
        out.alpha[i] = sum / unit_count_[i];
    }
    return out;
}

std::vector<double> TwoWayAbsorber::double_demean(std::span<const double> values) const {
    std::vector<double> unit_mean(units_, 0.0);
    std::vector<double> period_mean(periods_, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < units_; ++i) {
        for (std::size_t c = 0; c < periods_; ++c) {
            const double v = values[i * periods_ + c];
            unit_mean[i] += v;
            period_mean[c] += v;
            grand += v;
        }
    }
    for (auto& m : unit_mean) m /= static_cast<double>(periods_);
    for (auto& m : period_mean) m /= static_cast<double>(units_);
    grand /= static_cast<double>(units_ * periods_);

    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < units_; ++i) {
        for (std::size_t c = 0; c < periods_; ++c) {
            out[i * periods_ + c] = values[i * periods_ + c] - unit_mean[i] - period_mean[c] + grand;
        }
    }
    return out;
}

std::vector<double> TwoWayAbsorber::residualize(std::span<const double> values) const {
    if (values.size() != units_ * periods_) throw std::invalid_argument("values size does not match grid");
    if (balanced_) return double_demean(values);

    const FixedEffectsFit fe = fit(values);
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 0; i < units_; ++i) {
        for (std::size_t c = 0; c < periods_; ++c) {
            if (included(i, c)) out[i * periods_ + c] = values[i * periods_ + c] - fe.alpha[i] - fe.lambda[c];
        }
    }
    return out;
}

std::vector<double> absorbed_ols(const TwoWayAbsorber& absorber, std::span<const double> y,
                                 const std::vector<std::vector<double>>& regressors) {
    const auto k = static_cast<Eigen::Index>(regressors.size());
    if (k == 0) return {};
    const std::size_t cells = absorber.units() * absorber.periods();

    Eigen::MatrixXd x(static_cast<Eigen::Index>(cells), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& raw = regressors[static_cast<std::size_t>(j)];
        const auto resid = absorber.residualize(raw);
        x.col(j) = Eigen::Map<const Eigen::VectorXd>(resid.data(), static_cast<Eigen::Index>(cells));
        double raw_sq = 0.0;
        for (double v : raw) raw_sq += v * v;
        if (!(x.col(j).squaredNorm() > 1e-20 * raw_sq)) {
            throw SingularDesign("regressor " + std::to_string(j) + " is absorbed by the fixed effects");
        }
    }
    const auto y_resid = absorber.residualize(y);
    const Eigen::Map<const Eigen::VectorXd> yv(y_resid.data(), static_cast<Eigen::Index>(cells));

    const Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-12) {
        throw SingularDesign("regressors are collinear with the fixed effects");
    }
    const Eigen::VectorXd beta = ldlt.solve(x.transpose() * yv);
    return {beta.data(), beta.data() + beta.size()};
}

}  // namespace evstudy
