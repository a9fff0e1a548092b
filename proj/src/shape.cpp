#include "evstudy/shape.hpp"

#include <stdexcept>
#include <vector>

namespace evstudy::shape {

Line fit_line(const Coefficients& coefficients, RelativeTime lo, RelativeTime hi) {
    double n = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& [r, y] : coefficients) {
        if (r < lo || r > hi) continue;
        n += 1.0;
        sx += r;
        sy += y;
    }
    if (n < 2.0) throw std::invalid_argument("line fit needs at least two points");
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [r, y] : coefficients) {
        if (r < lo || r > hi) continue;
        sxx += (r - mx) * (r - mx);
        sxy += (r - mx) * (y - my);
    }
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

Break fit_break(const Coefficients& coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("no coefficients");
    const RelativeTime first = coefficients.begin()->first;
    const RelativeTime last = coefficients.rbegin()->first;
    const Line pre = fit_line(coefficients, first, -1);
    const Line post = fit_line(coefficients, 0, last);
    const auto at_boundary = [](const Line& l) { return l.intercept + l.slope * -0.5; };
    return {at_boundary(post) - at_boundary(pre), post.slope - pre.slope};
}

Statistic with_bootstrap_se(const BootstrapDraws& draws, const std::function<double(const Coefficients&)>& statistic) {
    Statistic out;
    out.value = statistic(draws.point.coefficients);
    if (draws.replicates.empty()) return out;
    const std::size_t b_count = draws.replicates.begin()->second.size();
    std::vector<double> values;
    values.reserve(b_count);
    Coefficients rep;
    for (std::size_t b = 0; b < b_count; ++b) {
        for (const auto& [r, column] : draws.replicates) rep[r] = column[b];
        values.push_back(statistic(rep));
    }
    out.se = sample_sd(values);
    return out;
}

}  // namespace evstudy::shape
