#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evstudy/estimators.hpp"

namespace evstudy::plot {

struct PlotOptions {
    /// Overlay the population curve for this trend slope.
    std::optional<double> population_gamma;
    int width = 640;
    int height = 420;
};

/// Which relative times of an estimate go into one figure.
enum class Window { All, PreOnly, PostOnly };

/**
 * Event-study scatter: one marker per coefficient with CI whiskers when
 * intervals are present, hollow markers at zero for omitted categories, a
 * dashed vertical rule at r = -0.5 and a horizontal rule at zero. The
 * population overlay is drawn as separate pre and post polylines so that a
 * level break at the treatment date stays visible. Output contains no
 * timestamps or other run-dependent text.
 */
[[nodiscard]] std::string render_svg(const EventStudyEstimate& estimate, const PlotOptions& options,
                                     Window window = Window::All, const std::string& title = {});

/// Infers the panel's t_min from the smallest relative time present (coefficient
/// or omitted), which is always the earliest period for every estimator here.
[[nodiscard]] int infer_t_min(const EventStudyEstimate& estimate);

/// Files written by write_plots: `<stem>_<estimator>.svg`, and for BJS with
/// split_bjs `<stem>_bjs_pre.svg` and `<stem>_bjs_post.svg` instead.
[[nodiscard]] std::vector<std::filesystem::path> write_plots(const std::vector<EventStudyEstimate>& estimates,
                                                             const std::filesystem::path& out,
                                                             const PlotOptions& options, bool split_bjs);

}  // namespace evstudy::plot
