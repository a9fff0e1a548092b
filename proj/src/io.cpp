#include "evstudy/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace evstudy::io {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return {buf.data(), end};
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw FormatError("cannot parse " + std::string(what) + " '" + std::string(text) + "' as a number");
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw FormatError("cannot parse " + std::string(what) + " '" + std::string(text) + "' as an integer");
    }
    return value;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool read_record(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!trim(line).empty()) return true;
    }
    return false;
}

std::map<std::string, std::size_t> header_index(std::istream& in, std::string_view expected, std::string_view what) {
    std::string line;
    if (!read_record(in, line)) throw FormatError(std::string(what) + ": missing header row");
    // Tolerate a UTF-8 byte order mark.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    std::map<std::string, std::size_t> index;
    const auto fields = split_csv_line(line);
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (!index.emplace(fields[c], c).second) throw FormatError(std::string(what) + ": duplicate column " + fields[c]);
    }
    const auto wanted = split_csv_line(expected);
    for (const auto& name : wanted) {
        if (!index.contains(name)) throw FormatError(std::string(what) + ": missing column '" + name + "'");
    }
    if (index.size() != wanted.size()) {
        throw FormatError(std::string(what) + ": expected exactly the columns " + std::string(expected));
    }
    return index;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path.string());
    return in;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t k = 0; k <= line.size(); ++k) {
        if (k == line.size() || (!quoted && line[k] == ',')) {
            fields.push_back(was_quoted ? field : std::string(trim(field)));
            field.clear();
            was_quoted = false;
            continue;
        }
        const char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                field.push_back('"');
                ++k;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && trim(field).empty()) {
            field.clear();
            quoted = was_quoted = true;
        } else if (ch != '\r' || k + 1 != line.size()) {
            field.push_back(ch);
        }
    }
    if (quoted) throw FormatError("unterminated quoted field");
    return fields;
}

std::vector<PanelRow> read_panel_rows(std::istream& in, double time_shift) {
    const auto col = header_index(in, kPanelHeader, "panel");
    std::vector<PanelRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (read_record(in, line)) {
        ++line_no;
        const auto fields = split_csv_line(line);
        if (fields.size() != col.size()) {
            throw FormatError("panel line " + std::to_string(line_no) + ": expected " + std::to_string(col.size()) +
                              " fields, got " + std::to_string(fields.size()));
        }
        PanelRow row;
        row.unit = fields[col.at("unit")];
        if (row.unit.empty()) throw FormatError("panel line " + std::to_string(line_no) + ": empty unit id");
        row.time = parse_double(fields[col.at("time")], "time") + time_shift;
        row.treated = static_cast<int>(parse_integer(fields[col.at("treated")], "treated"));
        row.outcome = parse_double(fields[col.at("outcome")], "outcome");
        rows.push_back(std::move(row));
    }
    return rows;
}

PanelDataset read_panel_csv(const std::filesystem::path& path, double time_shift) {
    auto in = open_input(path);
    const auto rows = read_panel_rows(in, time_shift);
    return PanelDataset::from_rows(rows);
}

namespace {

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
    out << kPanelHeader << '\n';
    for (const auto& row : panel.rows()) {
        out << quote_if_needed(row.unit) << ',' << static_cast<long long>(row.time) << ',' << row.treated << ','
            << format_double(row.outcome) << '\n';
    }
}

void write_estimate_table(std::ostream& out, const std::vector<EventStudyEstimate>& estimates) {
    std::vector<const EventStudyEstimate*> sorted;
    for (const auto& e : estimates) sorted.push_back(&e);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return to_string(a->estimator) < to_string(b->estimator);
    });

    out << kEstimateHeader << '\n';
    for (const auto* e : sorted) {
        std::map<RelativeTime, bool> times;
        for (const auto& [r, v] : e->coefficients) times[r] = false;
        for (RelativeTime r : e->omitted) times[r] = true;
        for (const auto& [r, is_omitted] : times) {
            out << to_string(e->estimator) << ',' << r << ',';
            if (is_omitted) {
                out << ",,,,1\n";
                continue;
            }
            out << format_double(e->coefficients.at(r)) << ',';
            if (e->se && e->se->contains(r)) out << format_double(e->se->at(r));
            out << ',';
            if (e->ci && e->ci->contains(r)) {
                const auto& ci = e->ci->at(r);
                out << format_double(ci.low) << ',' << format_double(ci.high);
            } else {
                out << ',';
            }
            out << ",0\n";
        }
    }
}

std::vector<EventStudyEstimate> read_estimate_table(std::istream& in) {
    const auto col = header_index(in, kEstimateHeader, "estimate table");
    std::vector<EventStudyEstimate> out;
    std::map<EstimatorTag, std::size_t> slot;
    std::string line;
    std::size_t line_no = 1;
    while (read_record(in, line)) {
        ++line_no;
        const auto f = split_csv_line(line);
        const std::string where = "estimate table line " + std::to_string(line_no);
        if (f.size() != col.size()) throw FormatError(where + ": wrong number of fields");
        const EstimatorTag tag = parse_estimator(f[col.at("estimator")]);
        auto [it, inserted] = slot.emplace(tag, out.size());
        if (inserted) {
            out.emplace_back();
            out.back().estimator = tag;
        }
        auto& e = out[it->second];
        const auto r = static_cast<RelativeTime>(parse_integer(f[col.at("relative_time")], "relative_time"));
        const auto omitted = parse_integer(f[col.at("omitted")], "omitted");
        if (omitted != 0 && omitted != 1) throw FormatError(where + ": omitted must be 0 or 1");
        if (e.coefficients.contains(r) || e.omitted.contains(r)) throw FormatError(where + ": duplicate relative time");
        if (omitted == 1) {
            e.omitted.insert(r);
            continue;
        }
        e.coefficients[r] = parse_double(f[col.at("coefficient")], "coefficient");
        if (const auto& s = f[col.at("std_error")]; !s.empty()) {
            if (!e.se) e.se.emplace();
            (*e.se)[r] = parse_double(s, "std_error");
        }
        const auto& lo = f[col.at("ci_low")];
        const auto& hi = f[col.at("ci_high")];
        if (!lo.empty() || !hi.empty()) {
            if (!e.ci) e.ci.emplace();
            (*e.ci)[r] = {parse_double(lo, "ci_low"), parse_double(hi, "ci_high")};
        }
    }
    return out;
}

std::vector<EventStudyEstimate> read_estimate_table(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_estimate_table(in);
}

void write_mc_report(std::ostream& out, const McReport& report) {
    std::vector<const McEstimatorSummary*> sorted;
    for (const auto& s : report.estimators) sorted.push_back(&s);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return to_string(a->estimator) < to_string(b->estimator);
    });
    out << kMonteCarloHeader << '\n';
    for (const auto* s : sorted) {
        for (const auto& [r, c] : s->coefficients) {
            out << to_string(s->estimator) << ',' << r << ',' << format_double(c.mean) << ','
                << format_double(c.population) << ',' << format_double(c.abs_deviation) << ','
                << format_double(c.mc_se) << '\n';
        }
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoFailure("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoFailure("cannot write " + path.string());
    }
}

}  // namespace evstudy::io
