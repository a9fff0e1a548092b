#include "evstudy/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evstudy/dgp.hpp"
#include "evstudy/estimators.hpp"
#include "evstudy/inference.hpp"
#include "evstudy/io.hpp"
#include "evstudy/montecarlo.hpp"
#include "evstudy/plot.hpp"
#include "evstudy/random.hpp"
#include "evstudy/shape.hpp"

namespace evstudy::cli {

namespace {

namespace fs = std::filesystem;

void add_dgp_options(CLI::App& cmd, DgpConfig& c) {
    cmd.add_option("--gamma", c.gamma, "Per-period trend violation of the treated group")->capture_default_str();
    cmd.add_option("--t-min", c.t_min, "First period (<= -1)")->capture_default_str();
    cmd.add_option("--t-max", c.t_max, "Last period (>= 1)")->capture_default_str();
    cmd.add_option("--n-treated", c.n_treated, "Number of treated units")->capture_default_str();
    cmd.add_option("--n-control", c.n_control, "Number of never-treated units")->capture_default_str();
    cmd.add_option("--error-sd", c.error_sd, "Standard deviation of the idiosyncratic error")->capture_default_str();
    cmd.add_option("--seed", c.seed, "Seed of the outcome noise")->capture_default_str();
}

void echo_config(std::ostream& out, const DgpConfig& c) {
    out << "generator=" << kGeneratorName << '\n'
        << "seed=" << c.seed << '\n'
        << "gamma=" << io::format_double(c.gamma) << '\n'
        << "t_min=" << c.t_min << '\n'
        << "t_max=" << c.t_max << '\n'
        << "n_treated=" << c.n_treated << '\n'
        << "n_control=" << c.n_control << '\n'
        << "error_sd=" << io::format_double(c.error_sd) << '\n';
}

std::vector<EstimatorTag> parse_estimators(const std::vector<std::string>& names) {
    std::vector<EstimatorTag> tags;
    for (const auto& name : names) {
        if (name == "all") {
            for (EstimatorTag t : kAllEstimators) {
                if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
            }
            continue;
        }
        const EstimatorTag t = parse_estimator(name);
        if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
    }
    return tags;
}

struct EstimateFlags {
    fs::path in;
    fs::path out;
    std::vector<std::string> estimators{"all"};
    int bootstrap = 0;
    std::uint64_t seed = 1;
    double level = 0.95;
    std::string ci_method = "normal";
    std::optional<int> bjs_pre;
    int treatment_date = kTreatmentPeriod;
};

BootstrapConfig bootstrap_config(int replications, std::uint64_t seed, double level, const std::string& method) {
    BootstrapConfig b;
    b.replications = replications;
    b.seed = seed;
    b.level = level;
    b.method = method == "percentile" ? IntervalMethod::Percentile : IntervalMethod::NormalApproximation;
    validate(b);
    return b;
}

std::vector<EventStudyEstimate> run_estimators(const PanelDataset& panel, const std::vector<EstimatorTag>& tags,
                                               const std::optional<BootstrapConfig>& boot,
                                               const EstimatorOptions& options) {
    std::vector<EventStudyEstimate> out;
    for (EstimatorTag tag : tags) {
        out.push_back(boot ? bootstrap(panel, tag, *boot, options) : estimate(panel, tag, options));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Flat key=value file; '#' starts a comment. Keys are option names without the
/// leading dashes ('_' and '-' are interchangeable). Options given on the
/// command line take precedence.
void apply_config_file(CLI::App& cmd, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io::IoFailure("cannot open config file " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw CLI::ConversionError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        std::string key(trim(text.substr(0, eq)));
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string value(trim(text.substr(eq + 1)));
        CLI::Option* opt = nullptr;
        try {
            opt = cmd.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw CLI::ConversionError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (key == "config") continue;
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

int cmd_simulate(const DgpConfig& config, const fs::path& out_path, std::ostream& out) {
    const PanelDataset panel = simulate(config);
    std::ostringstream csv;
    io::write_panel_csv(csv, panel);
    io::write_file_atomic(out_path, csv.str());
    echo_config(out, config);
    out << "rows=" << panel.num_units() * panel.num_periods() << '\n' << "out=" << out_path.string() << '\n';
    return kSuccess;
}

int cmd_estimate(const EstimateFlags& f, std::ostream& out) {
    const auto tags = parse_estimators(f.estimators);
    std::optional<BootstrapConfig> boot;
    if (f.bootstrap > 0) boot = bootstrap_config(f.bootstrap, f.seed, f.level, f.ci_method);
    const PanelDataset panel = io::read_panel_csv(f.in, static_cast<double>(kTreatmentPeriod - f.treatment_date));
    EstimatorOptions options;
    options.bjs_pre_coefficients = f.bjs_pre;
    if (options.bjs_pre_coefficients) (void)resolve_bjs_pre_coefficients(panel, options);

    const auto estimates = run_estimators(panel, tags, boot, options);
    std::ostringstream table;
    io::write_estimate_table(table, estimates);
    io::write_file_atomic(f.out, table.str());
    out << "units=" << panel.num_units() << " (treated " << panel.count(Group::Treated) << ")\n"
        << "periods=" << panel.t_min() << ".." << panel.t_max() << '\n'
        << "estimators=" << estimates.size() << '\n'
        << "out=" << f.out.string() << '\n';
    return kSuccess;
}

int cmd_plot(const fs::path& in, const fs::path& out_path, std::optional<double> gamma, bool split_bjs,
             std::ostream& out) {
    const auto estimates = io::read_estimate_table(in);
    if (estimates.empty()) throw io::FormatError("EmptyTable: no estimate rows in " + in.string());
    plot::PlotOptions options;
    options.population_gamma = gamma;
    for (const auto& path : plot::write_plots(estimates, out_path, options, split_bjs)) {
        out << "wrote " << path.string() << '\n';
    }
    return kSuccess;
}

int cmd_montecarlo(const DgpConfig& config, int draws, const std::vector<std::string>& names,
                   std::uint64_t master_seed, std::optional<int> bjs_pre, const fs::path& out_path, std::ostream& out) {
    const auto tags = parse_estimators(names);
    EstimatorOptions options;
    options.bjs_pre_coefficients = bjs_pre;
    const McReport report = run_mc(config, tags, draws, master_seed, options);
    std::ostringstream table;
    io::write_mc_report(table, report);
    io::write_file_atomic(out_path, table.str());
    echo_config(out, config);
    out << "draws=" << draws << "\nmaster_seed=" << master_seed << '\n';
    for (const auto& s : report.estimators) {
        std::size_t within = 0;
        for (const auto& [r, c] : s.coefficients) within += c.abs_deviation < 4.0 * c.mc_se ? 1 : 0;
        out << to_string(s.estimator) << ": max_abs_deviation=" << io::format_double(s.max_abs_deviation)
            << " max_deviation_in_se=" << io::format_double(s.max_deviation_in_se) << " within_4se=" << within << '/'
            << s.coefficients.size() << '\n';
    }
    out << "out=" << out_path.string() << '\n';
    return kSuccess;
}

int cmd_compare(const DgpConfig& config, int replications, std::uint64_t boot_seed, const fs::path& dir,
                std::ostream& out) {
    const BootstrapConfig boot = bootstrap_config(replications, boot_seed, 0.95, "normal");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io::IoFailure("cannot create " + dir.string());

    const PanelDataset panel = simulate(config);
    std::ostringstream csv;
    io::write_panel_csv(csv, panel);
    io::write_file_atomic(dir / "panel.csv", csv.str());

    std::vector<EventStudyEstimate> estimates;
    std::map<EstimatorTag, BootstrapDraws> draws;
    for (EstimatorTag tag : kAllEstimators) {
        draws[tag] = bootstrap_draws(panel, tag, boot);
        estimates.push_back(summarize(draws[tag], boot));
    }
    std::ostringstream table;
    io::write_estimate_table(table, estimates);
    io::write_file_atomic(dir / "estimates.csv", table.str());

    plot::PlotOptions options;
    options.population_gamma = config.gamma;
    auto files = plot::write_plots(estimates, dir / "event_study.svg", options, false);
    const auto split = plot::write_plots({estimates.back()}, dir / "event_study_split.svg", options, true);
    files.insert(files.end(), split.begin(), split.end());

    echo_config(out, config);
    const auto twfe = shape::with_bootstrap_se(draws[EstimatorTag::Twfe], [](const shape::Coefficients& c) {
        return shape::fit_break(c).level_break;
    });
    const auto cs_pre = shape::with_bootstrap_se(draws[EstimatorTag::CsDcdhDefault], [](const shape::Coefficients& c) {
        return shape::fit_line(c, c.begin()->first, -1).slope;
    });
    const auto cs_post = shape::with_bootstrap_se(draws[EstimatorTag::CsDcdhDefault], [](const shape::Coefficients& c) {
        return shape::fit_line(c, 0, c.rbegin()->first).slope;
    });
    const auto bjs_drop = shape::with_bootstrap_se(draws[EstimatorTag::Bjs], [](const shape::Coefficients& c) {
        return c.at(-1) - c.at(0);
    });
    auto show = [&](const char* label, const shape::Statistic& s) {
        out << label << '=' << io::format_double(s.value) << " (bootstrap se " << io::format_double(s.se) << ")\n";
    };
    show("twfe_level_break_at_treatment", twfe);
    show("cs_dcdh_default_pre_slope", cs_pre);
    show("cs_dcdh_default_post_slope", cs_post);
    show("bjs_drop_from_r-1_to_r0", bjs_drop);
    for (const auto& f : files) out << "wrote " << f.string() << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::string config_path;
    CLI::App app{"Event-study estimators for non-staggered difference-in-differences", "evstudy"};
    app.require_subcommand(1);

    DgpConfig sim_config;
    fs::path sim_out;
    auto* sim = app.add_subcommand("simulate", "Simulate a panel with a linear parallel-trends violation");
    sim->add_option("--config", config_path, "key=value file with default option values");
    add_dgp_options(*sim, sim_config);
    sim->add_option("--out,-o", sim_out, "Output panel CSV")->required();

    EstimateFlags est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate event studies from a panel CSV");
    est_cmd->add_option("--config", config_path, "key=value file with default option values");
    est_cmd->add_option("--in,-i", est.in, "Input panel CSV (unit,time,treated,outcome)")->required();
    est_cmd->add_option("--estimator,-e", est.estimators,
                        "twfe, cs_dcdh_default, cs_dcdh_universal, bjs or all (repeatable)")
        ->capture_default_str();
    est_cmd->add_option("--bootstrap,-B", est.bootstrap, "Bootstrap replications (0 = point estimates only)")
        ->capture_default_str();
    est_cmd->add_option("--seed", est.seed, "Bootstrap seed")->capture_default_str();
    est_cmd->add_option("--level", est.level, "Confidence level")->capture_default_str();
    est_cmd->add_option("--ci-method", est.ci_method, "normal or percentile")
        ->check(CLI::IsMember({"normal", "percentile"}))
        ->capture_default_str();
    est_cmd->add_option("--bjs-pre", est.bjs_pre, "Number of BJS pre-treatment coefficients (default: all)");
    est_cmd->add_option("--treatment-date", est.treatment_date,
                        "First treated period in the input; times are shifted so it becomes 1")
        ->capture_default_str();
    est_cmd->add_option("--out,-o", est.out, "Output estimate table CSV")->required();

    fs::path plot_in;
    fs::path plot_out;
    std::optional<double> plot_gamma;
    bool split_bjs = false;
    auto* plot_cmd = app.add_subcommand("plot", "Render event-study SVGs from an estimate table");
    plot_cmd->add_option("--in,-i", plot_in, "Estimate table CSV")->required();
    plot_cmd->add_option("--out,-o", plot_out, "Output path; files are named <stem>_<estimator>.svg")->required();
    plot_cmd->add_option("--overlay-population", plot_gamma, "Overlay population coefficients for this gamma");
    plot_cmd->add_flag("--split-bjs", split_bjs, "Write BJS pre- and post-treatment estimates to separate files");

    DgpConfig mc_config;
    int mc_draws = 2000;
    std::vector<std::string> mc_estimators{"all"};
    std::uint64_t mc_master_seed = 1;
    std::optional<int> mc_bjs_pre;
    fs::path mc_out;
    auto* mc = app.add_subcommand("montecarlo", "Average estimates over repeated simulations");
    mc->add_option("--config", config_path, "key=value file with default option values");
    add_dgp_options(*mc, mc_config);
    mc->add_option("--draws,-S", mc_draws, "Number of simulated panels")->capture_default_str();
    mc->add_option("--estimator,-e", mc_estimators, "Estimators (repeatable, or all)")->capture_default_str();
    mc->add_option("--master-seed", mc_master_seed, "Seed from which per-draw seeds are derived")
        ->capture_default_str();
    mc->add_option("--bjs-pre", mc_bjs_pre, "Number of BJS pre-treatment coefficients (default: all)");
    mc->add_option("--out,-o", mc_out, "Output report CSV")->required();

    DgpConfig cmp_config;
    int cmp_boot = 999;
    std::uint64_t cmp_boot_seed = 1;
    fs::path cmp_dir;
    auto* cmp = app.add_subcommand(
        "compare", "One simulated draw: all four estimators with bootstrap CIs, population overlays and shape summary");
    cmp->add_option("--config", config_path, "key=value file with default option values");
    add_dgp_options(*cmp, cmp_config);
    cmp->add_option("--bootstrap,-B", cmp_boot, "Bootstrap replications")->capture_default_str();
    cmp->add_option("--bootstrap-seed", cmp_boot_seed, "Bootstrap seed")->capture_default_str();
    cmp->add_option("--out-dir,-d", cmp_dir, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        for (auto* sub : app.get_subcommands()) {
            if (!config_path.empty()) apply_config_file(*sub, config_path);
        }
        if (*sim) return cmd_simulate(sim_config, sim_out, out);
        if (*est_cmd) return cmd_estimate(est, out);
        if (*plot_cmd) return cmd_plot(plot_in, plot_out, plot_gamma, split_bjs, out);
        if (*mc) return cmd_montecarlo(mc_config, mc_draws, mc_estimators, mc_master_seed, mc_bjs_pre, mc_out, out);
        if (*cmp) return cmd_compare(cmp_config, cmp_boot, cmp_boot_seed, cmp_dir, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnknownEstimator& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const PanelError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const io::FormatError& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const InvalidConfig& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const SingularDesign& e) {
        err << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const io::IoFailure& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace evstudy::cli
