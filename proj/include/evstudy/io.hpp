#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evstudy/estimators.hpp"
#include "evstudy/montecarlo.hpp"
#include "evstudy/panel.hpp"

namespace evstudy::io {

inline constexpr std::string_view kPanelHeader = "unit,time,treated,outcome";
inline constexpr std::string_view kEstimateHeader =
    "estimator,relative_time,coefficient,std_error,ci_low,ci_high,omitted";
inline constexpr std::string_view kMonteCarloHeader =
    "estimator,relative_time,mean_coefficient,population_value,abs_deviation,mc_se";

/// Malformed file contents (bad header, wrong field count, unparsable number).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cannot open, read or write a file.
class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(std::string_view text, std::string_view what);
[[nodiscard]] long long parse_integer(std::string_view text, std::string_view what);

/// Splits one CSV record. Fields may be double-quoted with "" as an escaped quote;
/// surrounding spaces of unquoted fields are trimmed.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a panel: header with exactly the columns unit, time, treated, outcome
/// in any order. Throws FormatError; validation errors surface as PanelError.
/// `time_shift` is added to every time before validation.
[[nodiscard]] std::vector<PanelRow> read_panel_rows(std::istream& in, double time_shift = 0.0);
[[nodiscard]] PanelDataset read_panel_csv(const std::filesystem::path& path, double time_shift = 0.0);

void write_panel_csv(std::ostream& out, const PanelDataset& panel);

/// Rows sorted by (estimator name, relative_time). Omitted categories get an
/// empty coefficient and interval and omitted = 1.
void write_estimate_table(std::ostream& out, const std::vector<EventStudyEstimate>& estimates);
[[nodiscard]] std::vector<EventStudyEstimate> read_estimate_table(std::istream& in);
[[nodiscard]] std::vector<EventStudyEstimate> read_estimate_table(const std::filesystem::path& path);

void write_mc_report(std::ostream& out, const McReport& report);

/// Writes `content` to `path` through a temporary file in the same directory,
/// so a failed command never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace evstudy::io
