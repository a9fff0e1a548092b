#include "evstudy/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "evstudy/io.hpp"
#include "evstudy/oracle.hpp"

namespace evstudy::plot {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);  // avoid "-0.00"
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string tick_label(double v, double step) {
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (raw <= m * magnitude * (1.0 + 1e-9)) return m * magnitude;
    }
    return 10.0 * magnitude;
}

bool in_window(RelativeTime r, Window w) {
    return w == Window::All || (w == Window::PreOnly ? r < 0 : r >= 0);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

}  // namespace

int infer_t_min(const EventStudyEstimate& estimate) {
    std::optional<RelativeTime> lo;
    for (const auto& [r, v] : estimate.coefficients) lo = lo ? std::min(*lo, r) : r;
    for (RelativeTime r : estimate.omitted) lo = lo ? std::min(*lo, r) : r;
    if (!lo) throw std::invalid_argument("estimate has no relative times");
    return period_of(*lo);
}

std::string render_svg(const EventStudyEstimate& estimate, const PlotOptions& options, Window window,
                       const std::string& title) {
    std::map<RelativeTime, double> points;
    for (const auto& [r, v] : estimate.coefficients) {
        if (in_window(r, window)) points[r] = v;
    }
    std::vector<RelativeTime> hollow;
    for (RelativeTime r : estimate.omitted) {
        if (in_window(r, window)) hollow.push_back(r);
    }
    if (points.empty() && hollow.empty()) throw std::invalid_argument("nothing to plot");

    std::map<RelativeTime, double> population;
    if (options.population_gamma) {
        const int t_min = infer_t_min(estimate);
        int t_max = t_min;
        for (const auto& [r, v] : estimate.coefficients) t_max = std::max(t_max, period_of(r));
        for (RelativeTime r : estimate.omitted) t_max = std::max(t_max, period_of(r));
        std::optional<int> k;
        if (estimate.estimator == EstimatorTag::Bjs) {
            k = static_cast<int>(std::count_if(estimate.coefficients.begin(), estimate.coefficients.end(),
                                               [](const auto& kv) { return kv.first < 0; }));
        }
        if (t_min <= -1 && t_max >= 1) {
            const auto curve = oracle::population_curve(estimate.estimator, *options.population_gamma, t_min, t_max, k);
            for (const auto& [r, v] : curve.values) {
                if (in_window(r, window)) population[r] = v;
            }
        }
    }

    double r_lo = 1e300, r_hi = -1e300, y_lo = 0.0, y_hi = 0.0;
    auto extend_r = [&](RelativeTime r) {
        r_lo = std::min(r_lo, static_cast<double>(r));
        r_hi = std::max(r_hi, static_cast<double>(r));
    };
    auto extend_y = [&](double y) {
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    };
    for (const auto& [r, v] : points) {
        extend_r(r);
        extend_y(v);
        if (estimate.ci && estimate.ci->contains(r)) {
            extend_y(estimate.ci->at(r).low);
            extend_y(estimate.ci->at(r).high);
        }
    }
    for (RelativeTime r : hollow) extend_r(r);
    for (const auto& [r, v] : population) {
        extend_r(r);
        extend_y(v);
    }
    if (y_hi - y_lo < 1e-12) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double pad = 0.08 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    r_lo -= 0.5;
    r_hi += 0.5;

    const double left = 64, right = 20, top = 40, bottom = 52;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;
    auto px = [&](double r) { return left + (r - r_lo) / (r_hi - r_lo) * plot_w; };
    auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    const std::string heading = title.empty() ? std::string(to_string(estimate.estimator)) : title;
    svg << "<text x=\"" << fmt(options.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << escape(heading) << "</text>\n";

    // Axes frame and ticks.
    svg << "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
    svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(plot_w) << "\" height=\""
        << fmt(plot_h) << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">\n";
    const double x_step = std::max(1.0, nice_step(r_hi - r_lo, 10));
    for (double r = std::ceil(r_lo / x_step) * x_step; r <= r_hi; r += x_step) {
        svg << "<line x1=\"" << fmt(px(r)) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(px(r))
            << "\" y2=\"" << fmt(top + plot_h + 4) << "\" stroke=\"#444\"/>";
        svg << "<text x=\"" << fmt(px(r)) << "\" y=\"" << fmt(top + plot_h + 17) << "\" text-anchor=\"middle\">"
            << tick_label(r, x_step) << "</text>\n";
    }
    const double y_step = nice_step(y_hi - y_lo, 6);
    for (double y = std::ceil(y_lo / y_step) * y_step; y <= y_hi; y += y_step) {
        svg << "<line x1=\"" << fmt(left - 4) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(left) << "\" y2=\""
            << fmt(py(y)) << "\" stroke=\"#444\"/>";
        svg << "<text x=\"" << fmt(left - 7) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">"
            << tick_label(y, y_step) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(options.height - 10.0)
        << "\" text-anchor=\"middle\">relative time r</text>\n";
    svg << "<text transform=\"translate(16 " << fmt(top + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << "coefficient</text>\n";
    svg << "</g>\n";

    // Reference rules.
    if (y_lo < 0.0 && y_hi > 0.0) {
        svg << "<line class=\"zero\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(0.0)) << "\" x2=\""
            << fmt(left + plot_w) << "\" y2=\"" << fmt(py(0.0)) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    }
    if (r_lo < -0.5 && r_hi > -0.5) {
        svg << "<line class=\"treatment\" x1=\"" << fmt(px(-0.5)) << "\" y1=\"" << fmt(top) << "\" x2=\""
            << fmt(px(-0.5)) << "\" y2=\"" << fmt(top + plot_h)
            << "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
    }

    if (!population.empty()) {
        svg << "<g class=\"population\" fill=\"none\" stroke=\"#d95f02\" stroke-width=\"1.5\">\n";
        for (bool pre : {true, false}) {
            std::ostringstream pts;
            int n = 0;
            for (const auto& [r, v] : population) {
                if ((r < 0) != pre) continue;
                pts << (n++ ? " " : "") << fmt(px(r)) << ',' << fmt(py(v));
            }
            if (n == 1) {
                svg << "<circle cx=\"" << pts.str().substr(0, pts.str().find(',')) << "\" cy=\""
                    << pts.str().substr(pts.str().find(',') + 1) << "\" r=\"2\" fill=\"#d95f02\"/>\n";
            } else if (n > 1) {
                svg << "<polyline points=\"" << pts.str() << "\"/>\n";
            }
        }
        svg << "</g>\n";
    }

    if (estimate.ci) {
        svg << "<g class=\"ci\" stroke=\"#1b5e9e\" stroke-width=\"1.2\">\n";
        for (const auto& [r, v] : points) {
            if (!estimate.ci->contains(r)) continue;
            const auto& ci = estimate.ci->at(r);
            svg << "<line x1=\"" << fmt(px(r)) << "\" y1=\"" << fmt(py(ci.low)) << "\" x2=\"" << fmt(px(r))
                << "\" y2=\"" << fmt(py(ci.high)) << "\"/>\n";
        }
        svg << "</g>\n";
    }
    svg << "<g class=\"coefficients\" fill=\"#1b5e9e\">\n";
    for (const auto& [r, v] : points) {
        svg << "<circle cx=\"" << fmt(px(r)) << "\" cy=\"" << fmt(py(v)) << "\" r=\"3.5\"/>\n";
    }
    svg << "</g>\n";
    if (!hollow.empty()) {
        svg << "<g class=\"omitted\" fill=\"white\" stroke=\"#1b5e9e\" stroke-width=\"1.2\">\n";
        for (RelativeTime r : hollow) {
            svg << "<circle cx=\"" << fmt(px(r)) << "\" cy=\"" << fmt(py(0.0)) << "\" r=\"3.5\"/>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::filesystem::path> write_plots(const std::vector<EventStudyEstimate>& estimates,
                                               const std::filesystem::path& out, const PlotOptions& options,
                                               bool split_bjs) {
    std::filesystem::path stem = out;
    if (stem.extension() == ".svg") stem.replace_extension();

    auto with_suffix = [&](const std::string& suffix) {
        std::filesystem::path p = stem;
        p += "_" + suffix + ".svg";
        return p;
    };

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& e : estimates) {
        const std::string name(to_string(e.estimator));
        if (split_bjs && e.estimator == EstimatorTag::Bjs) {
            files.emplace_back(with_suffix(name + "_pre"),
                               render_svg(e, options, Window::PreOnly, name + ": pre-treatment (pre-trend test)"));
            files.emplace_back(with_suffix(name + "_post"),
                               render_svg(e, options, Window::PostOnly, name + ": post-treatment effects"));
        } else {
            files.emplace_back(with_suffix(name), render_svg(e, options));
        }
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [path, content] : files) {
        io::write_file_atomic(path, content);
        written.push_back(path);
    }
    return written;
}

}  // namespace evstudy::plot
