#include "yule/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "yule/error.hpp"
#include "yule/format.hpp"

namespace yule {

nlohmann::json to_json(const YuleStatistics& s) {
    return {{"y11", s.y11}, {"y22", s.y22}, {"y12", s.y12}, {"rho", s.rho}, {"theta_hat", s.theta_hat}, {"T", s.horizon}};
}

nlohmann::json to_json(const TestOutcome& o) {
    return {{"variant", std::string(to_string(o.variant))},
            {"alpha", o.alpha},
            {"statistic", o.statistic},
            {"threshold", o.threshold},
            {"reject", o.reject}};
}

nlohmann::json to_json(const ConfidenceInterval& ci) {
    return {{"lower", ci.lower},
            {"upper", ci.upper},
            {"alpha", ci.alpha},
            {"theta_mode", ci.theta_mode == ThetaMode::known ? "known" : "estimated"}};
}

nlohmann::json to_json(const MultiModeOutcome& o) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& m : o.per_mode) modes.push_back(to_json(m));
    return {{"n_modes", o.n_modes}, {"per_mode_alpha", o.per_mode_alpha}, {"reject_any", o.reject_any},
            {"per_mode", modes}};
}

nlohmann::json to_json(const McReport& r) {
    nlohmann::json j = {{"theta", r.theta},   {"r", r.r},         {"T", r.horizon},
                        {"n", r.n},           {"mean", r.mean},   {"var", r.variance},
                        {"k3", r.k3},         {"k4", r.k4},       {"d_kol", r.d_kol},
                        {"reject_rate", r.reject_rate},           {"ci_lo", r.ci_lo},
                        {"ci_hi", r.ci_hi},   {"variance_defined", r.variance_defined}};
    if (!r.ok) j["diagnostic"] = r.diagnostic;
    return j;
}

nlohmann::json to_json(const RateEstimate& r) {
    return {{"rate", r.rate}, {"ci_lo", r.ci_lower}, {"ci_hi", r.ci_upper}, {"n", r.n}, {"rejections", r.rejections}};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

double parse_field(std::string_view field, std::size_t line_no) {
    field = trim(field);
    double v = 0.0;
    if (field == "nan") return std::nan("");
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
    return v;
}

std::vector<double> parse_row(std::string_view line, std::size_t expected, std::size_t line_no) {
    std::vector<double> out;
    out.reserve(expected);
    while (true) {
        const auto comma = line.find(',');
        out.push_back(parse_field(line.substr(0, comma), line_no));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    if (out.size() != expected)
        throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                         " fields, found " + std::to_string(out.size()));
    return out;
}

// Calls fn(row, line_no) for each data row after checking the header.
template <class Fn>
void for_each_row(std::istream& in, std::string_view header, std::size_t fields, Fn&& fn) {
    std::string raw;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!seen_header) {
            if (line != header)
                throw ParseError("line " + std::to_string(line_no) + ": expected header '" + std::string(header) + "'");
            seen_header = true;
            continue;
        }
        fn(parse_row(line, fields, line_no), line_no);
    }
    if (in.bad()) throw ParseError("read error");
    if (!seen_header) throw ParseError("missing header '" + std::string(header) + "'");
}

}  // namespace

PairSeries read_pair_csv(std::istream& in) {
    std::vector<double> t, a, b;
    for_each_row(in, "t,x1,x2", 3, [&](const std::vector<double>& row, std::size_t line_no) {
        for (double v : row)
            if (!std::isfinite(v)) throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
        t.push_back(row[0]);
        a.push_back(row[1]);
        b.push_back(row[2]);
    });
    if (t.size() < 2) throw ParseError("pair CSV needs at least two rows");
    if (t.front() != 0.0) throw ParseError("time column must start at 0");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw ParseError("time column must be increasing");
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double expected = static_cast<double>(k) * dt;
        if (std::abs(t[k] - expected) > 1e-9 * std::max(1.0, t.back()))
            throw ParseError("time column is not a uniform grid (row " + std::to_string(k + 1) + ")");
    }
    PairSeries p;
    p.x1 = SamplePath{0.0, dt, std::move(a)};
    p.x2 = SamplePath{0.0, dt, std::move(b)};
    return p;
}

void write_outcome_csv(std::ostream& out, std::span<const OutcomeRow> rows) {
    out << kOutcomeCsvHeader << '\n';
    std::string line;
    for (const auto& row : rows) {
        line.assign(to_string(row.outcome.variant));
        for (double v : {row.outcome.alpha, row.theta, row.r, row.horizon, row.outcome.statistic, row.outcome.threshold}) {
            line += ',';
            append_double(line, v);
        }
        line += row.outcome.reject ? ",1\n" : ",0\n";
        out << line;
    }
}

void write_mc_csv(std::ostream& out, std::span<const McReport> reports) {
    out << kMcCsvHeader << '\n';
    std::string line;
    for (const auto& r : reports) {
        line.clear();
        append_double(line, r.theta);
        line += ',';
        append_double(line, r.r);
        line += ',';
        append_double(line, r.horizon);
        line += ',';
        line += std::to_string(r.n);
        for (double v : {r.mean, r.variance, r.k3, r.k4, r.d_kol, r.reject_rate, r.ci_lo, r.ci_hi}) {
            line += ',';
            append_double(line, v);
        }
        line += '\n';
        out << line;
    }
}

void write_mc_jsonl(std::ostream& out, std::span<const McReport> reports) {
    for (const auto& r : reports) out << to_json(r).dump() << '\n';
}

std::vector<McReport> read_mc_csv(std::istream& in) {
    std::vector<McReport> out;
    for_each_row(in, kMcCsvHeader, 12, [&](const std::vector<double>& v, std::size_t) {
        McReport r;
        r.theta = v[0];
        r.r = v[1];
        r.horizon = v[2];
        r.n = static_cast<std::size_t>(v[3]);
        r.mean = v[4];
        r.variance = v[5];
        r.k3 = v[6];
        r.k4 = v[7];
        r.d_kol = v[8];
        r.reject_rate = v[9];
        r.ci_lo = v[10];
        r.ci_hi = v[11];
        r.variance_defined = !std::isnan(r.variance);
        r.ok = !std::isnan(r.mean);
        out.push_back(r);
    });
    return out;
}

std::string config_comment(const nlohmann::json& config) { return "# config: " + config.dump(); }

}  // namespace yule
