#pragma once

// Result plumbing shared by the experiment drivers and the CLI: a flat record
// type, a canonical ordering, CSV/JSON serialization, and box-plot SVG
// rendering from five-number summaries.
//
// The CSV form is the reproducibility contract: identical configs must yield
// byte-identical files, so rows are canonically sorted, doubles are printed
// with %.17g (exact round-trip), and the wall-time field is deliberately
// left out — it is the one field that legitimately varies between runs. Wall
// times still reach the JSON output, which carries no byte-stability promise.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace klqs {

struct ResultRecord {
    std::string kind;           // experiment family that produced the row
    int n = 0;
    int k = 0;
    std::int64_t m = 0;
    std::uint64_t seed = 0;     // the per-instance derived seed
    std::int64_t instance_id = 0;
    std::string metric;
    double value = 0.0;
    double wall_ms = 0.0;       // JSON only; see header comment

    bool operator==(const ResultRecord&) const = default;
};

// Shortest exact decimal for a double; %.17g round-trips through strtod.
inline std::string format_value(double v)
{
    if (!std::isfinite(v))
        throw std::invalid_argument("format_value: metric values must be finite");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void canonical_sort(std::vector<ResultRecord>& records)
{
    std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.kind, a.n, a.k, a.m, a.instance_id, a.metric, a.seed, a.value) <
               std::tie(b.kind, b.n, b.k, b.m, b.instance_id, b.metric, b.seed, b.value);
    });
}

inline const char* csv_header()
{
    return "kind,n,k,m,seed,instance_id,metric,value";
}

// One CSV row, no trailing newline. kind/metric come from a fixed in-code
// vocabulary that never contains commas, so no quoting layer is needed.
inline std::string format_record_csv(const ResultRecord& r)
{
    std::ostringstream out;
    out << r.kind << ',' << r.n << ',' << r.k << ',' << r.m << ',' << r.seed << ','
        << r.instance_id << ',' << r.metric << ',' << format_value(r.value);
    return out.str();
}

inline void write_csv(const std::vector<ResultRecord>& records, std::ostream& out)
{
    if (records.empty())
        throw std::invalid_argument("write_csv: no records");
    out << csv_header() << '\n';
    for (const auto& r : records)
        out << format_record_csv(r) << '\n';
    if (!out)
        throw std::runtime_error("write_csv: stream failure");
}

inline void write_csv(const std::vector<ResultRecord>& records, const std::string& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(records, out);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline ResultRecord parse_record_csv(const std::string& line)
{
    const auto f = split_csv_line(line);
    if (f.size() != 8)
        throw std::runtime_error("record parse: expected 8 fields, got: " + line);
    ResultRecord r;
    r.kind = f[0];
    r.n = std::stoi(f[1]);
    r.k = std::stoi(f[2]);
    r.m = std::stoll(f[3]);
    r.seed = std::stoull(f[4]);
    r.instance_id = std::stoll(f[5]);
    r.metric = f[6];
    char* end = nullptr;
    r.value = std::strtod(f[7].c_str(), &end);
    if (end == f[7].c_str() || *end != '\0')
        throw std::runtime_error("record parse: bad value field: " + f[7]);
    return r;
}

} // namespace detail

inline std::vector<ResultRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != csv_header())
        throw std::runtime_error("read_csv: missing or unexpected header");
    std::vector<ResultRecord> records;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        records.push_back(detail::parse_record_csv(line));
    }
    return records;
}

inline std::vector<ResultRecord> read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_csv: cannot open " + path);
    return read_csv(in);
}

inline void write_json(const std::vector<ResultRecord>& records, std::ostream& out)
{
    if (records.empty())
        throw std::invalid_argument("write_json: no records");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records)
        arr.push_back({{"kind", r.kind},
                       {"n", r.n},
                       {"k", r.k},
                       {"m", r.m},
                       {"seed", r.seed},
                       {"instance_id", r.instance_id},
                       {"metric", r.metric},
                       {"value", r.value},
                       {"wall_ms", r.wall_ms}});
    out << arr.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write_json: stream failure");
}

inline void write_json(const std::vector<ResultRecord>& records, const std::string& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("write_json: cannot open " + path);
    write_json(records, out);
}

struct FiveNumber {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty())
        throw std::invalid_argument("quantile: empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

inline FiveNumber five_number(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("five_number: empty sample");
    std::sort(values.begin(), values.end());
    return {values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
            quantile_sorted(values, 0.75), values.back()};
}

namespace detail {

inline std::string svg_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace detail

// Box plots of one metric: one panel per n, one box per m within the panel
// (the m axis carries the clause-density sweep). Pure SVG 1.1, single root,
// viewBox set, nothing external.
inline void write_boxplot_svg(const std::vector<ResultRecord>& records, const std::string& metric,
                              std::ostream& out)
{
    // panel key: n; box key: m
    std::map<int, std::map<std::int64_t, std::vector<double>>> panels;
    for (const auto& r : records)
        if (r.metric == metric)
            panels[r.n][r.m].push_back(r.value);
    if (panels.empty())
        throw std::invalid_argument("write_boxplot_svg: no records carry metric " + metric);

    double lo = 0, hi = 0;
    bool first = true;
    std::size_t total_boxes = 0;
    for (const auto& [n, groups] : panels)
        for (const auto& [m, values] : groups) {
            ++total_boxes;
            for (double v : values) {
                lo = first ? v : std::min(lo, v);
                hi = first ? v : std::max(hi, v);
                first = false;
            }
        }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double box_w = 34, box_gap = 18, panel_gap = 34, margin_left = 64;
    const double top = 36, plot_h = 240, label_h = 46;
    const double height = top + plot_h + label_h;
    double width = margin_left + panel_gap;
    for (const auto& [n, groups] : panels)
        width += static_cast<double>(groups.size()) * (box_w + box_gap) + panel_gap;
    const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << detail::svg_num(width)
        << ' ' << detail::svg_num(height) << "\" width=\"" << detail::svg_num(width)
        << "\" height=\"" << detail::svg_num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << detail::svg_num(width) << "\" height=\""
        << detail::svg_num(height) << "\" fill=\"white\"/>\n";

    // y axis with min/mid/max gridlines
    for (int i = 0; i <= 2; ++i) {
        const double v = lo + (hi - lo) * i / 2.0;
        const double y = y_of(v);
        out << "<line x1=\"" << detail::svg_num(margin_left - 6) << "\" y1=\"" << detail::svg_num(y)
            << "\" x2=\"" << detail::svg_num(width - 8) << "\" y2=\"" << detail::svg_num(y)
            << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << detail::svg_num(margin_left - 10) << "\" y=\""
            << detail::svg_num(y + 4) << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">"
            << detail::svg_num(v) << "</text>\n";
    }
    out << "<text x=\"14\" y=\"" << detail::svg_num(top + plot_h / 2)
        << "\" font-size=\"12\" fill=\"#333333\" transform=\"rotate(-90 14 "
        << detail::svg_num(top + plot_h / 2) << ")\" text-anchor=\"middle\">" << metric
        << "</text>\n";

    double x = margin_left + panel_gap;
    for (const auto& [n, groups] : panels) {
        const double panel_w = static_cast<double>(groups.size()) * (box_w + box_gap);
        out << "<text x=\"" << detail::svg_num(x + panel_w / 2 - box_gap / 2) << "\" y=\""
            << detail::svg_num(top - 14)
            << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\">n = " << n
            << "</text>\n";
        for (const auto& [m, values] : groups) {
            const FiveNumber f = five_number(values);
            const double cx = x + box_w / 2;
            // whiskers with caps
            out << "<line x1=\"" << detail::svg_num(cx) << "\" y1=\"" << detail::svg_num(y_of(f.min))
                << "\" x2=\"" << detail::svg_num(cx) << "\" y2=\"" << detail::svg_num(y_of(f.q1))
                << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            out << "<line x1=\"" << detail::svg_num(cx) << "\" y1=\"" << detail::svg_num(y_of(f.q3))
                << "\" x2=\"" << detail::svg_num(cx) << "\" y2=\"" << detail::svg_num(y_of(f.max))
                << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            for (double v : {f.min, f.max})
                out << "<line x1=\"" << detail::svg_num(cx - box_w / 4) << "\" y1=\""
                    << detail::svg_num(y_of(v)) << "\" x2=\"" << detail::svg_num(cx + box_w / 4)
                    << "\" y2=\"" << detail::svg_num(y_of(v))
                    << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            // interquartile box and median
            out << "<rect x=\"" << detail::svg_num(x) << "\" y=\"" << detail::svg_num(y_of(f.q3))
                << "\" width=\"" << detail::svg_num(box_w) << "\" height=\""
                << detail::svg_num(y_of(f.q1) - y_of(f.q3))
                << "\" fill=\"#7aa6c9\" fill-opacity=\"0.55\" stroke=\"#2b5a82\" stroke-width=\"1\"/>\n";
            out << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << detail::svg_num(y_of(f.median))
                << "\" x2=\"" << detail::svg_num(x + box_w) << "\" y2=\""
                << detail::svg_num(y_of(f.median))
                << "\" stroke=\"#17334a\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << detail::svg_num(cx) << "\" y=\""
                << detail::svg_num(top + plot_h + 18)
                << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">m=" << m
                << "</text>\n";
            x += box_w + box_gap;
        }
        x += panel_gap;
    }
    out << "</svg>\n";
    if (!out)
        throw std::runtime_error("write_boxplot_svg: stream failure");
}

inline void write_boxplot_svg(const std::vector<ResultRecord>& records, const std::string& metric,
                              const std::string& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("write_boxplot_svg: cannot open " + path);
    write_boxplot_svg(records, metric, out);
}

} // namespace klqs
