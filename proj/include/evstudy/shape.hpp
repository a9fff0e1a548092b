#pragma once

#include <functional>
#include <map>

#include "evstudy/inference.hpp"

namespace evstudy::shape {

using Coefficients = std::map<RelativeTime, double>;

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

/// Least-squares line through the coefficients with lo <= r <= hi.
/// Throws std::invalid_argument with fewer than two points.
[[nodiscard]] Line fit_line(const Coefficients& coefficients, RelativeTime lo, RelativeTime hi);

/// Separate lines before and after treatment, both centered at r = -0.5:
/// level_break is the gap between the two lines at r = -0.5 (post minus pre),
/// slope_break the post slope minus the pre slope.
struct Break {
    double level_break = 0.0;
    double slope_break = 0.0;
};
[[nodiscard]] Break fit_break(const Coefficients& coefficients);

/// A statistic of the coefficient map with its bootstrap standard error.
struct Statistic {
    double value = 0.0;
    double se = 0.0;
};

[[nodiscard]] Statistic with_bootstrap_se(const BootstrapDraws& draws,
                                          const std::function<double(const Coefficients&)>& statistic);

}  // namespace evstudy::shape
