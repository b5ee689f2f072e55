#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "ciot/units.hpp"

namespace ciot::plot {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 80;
constexpr double kRight = 190;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6)
{
    if (!(hi > lo)) hi = lo + 1.0;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
    if (ticks.empty() || ticks.back() < hi) ticks.push_back((ticks.empty() ? lo : ticks.back()) + step);
    return ticks;
}

void header(std::ostringstream& svg, const std::string& title)
{
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
}

void legend(std::ostringstream& svg, const std::vector<std::string>& names)
{
    double y = kTop + 10;
    for (std::size_t i = 0; i < names.size(); ++i, y += 18) {
        const double x = kWidth - kRight + 15;
        svg << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"10\" fill=\""
            << kPalette[i % std::size(kPalette)] << "\"/>\n"
            << "<text x=\"" << x + 18 << "\" y=\"" << y << "\">" << escape(names[i]) << "</text>\n";
    }
}

}  // namespace

std::string render(const LineChart& chart)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymax = 0.0;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    const bool log_x = chart.log_x && xmin > 0.0;
    auto fx = [&](double v) { return log_x ? std::log10(v) : v; };
    double lo = fx(xmin), hi = fx(xmax);
    if (!(hi > lo)) hi = lo + 1.0;
    const auto yticks = nice_ticks(0.0, ymax > 0.0 ? ymax : 1.0);
    const double ytop = yticks.back();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (fx(v) - lo) / (hi - lo) * pw; };
    auto py = [&](double v) { return kTop + ph - v / ytop * ph; };

    std::ostringstream svg;
    header(svg, chart.title);
    svg << "<g stroke=\"#ddd\">\n";
    for (double t : yticks) {
        svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(t)) << "\" y2=\""
            << num(py(t)) << "\"/>\n";
    }
    svg << "</g>\n";
    for (double t : yticks) {
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    std::vector<double> xticks;
    if (log_x) {
        for (double d = std::floor(lo); d <= std::ceil(hi); ++d) {
            for (double m : {1.0, 2.0, 5.0}) {
                const double v = m * std::pow(10.0, d);
                if (fx(v) >= lo - 1e-9 && fx(v) <= hi + 1e-9) xticks.push_back(v);
            }
        }
    } else {
        xticks = nice_ticks(xmin, xmax);
    }
    for (double t : xticks) {
        svg << "<text x=\"" << num(px(t)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n"
        << "<text transform=\"translate(22," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";

    std::vector<std::string> names;
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color << "\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            svg << (k ? " " : "") << num(px(s.x[k])) << ',' << num(py(s.y[k]));
        }
        svg << "\"/>\n";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            svg << "<circle r=\"3\" fill=\"" << color << "\" cx=\"" << num(px(s.x[k])) << "\" cy=\""
                << num(py(s.y[k])) << "\"/>\n";
        }
        names.push_back(s.name);
    }
    legend(svg, names);
    svg << "</svg>\n";
    return svg.str();
}

std::string render(const StackedBars& chart)
{
    double ymax = 0.0;
    for (const auto& row : chart.values) {
        double sum = 0.0;
        for (double v : row) sum += v;
        ymax = std::max(ymax, sum);
    }
    const auto yticks = nice_ticks(0.0, ymax > 0.0 ? ymax : 1.0);
    const double ytop = yticks.back();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto py = [&](double v) { return kTop + ph - v / ytop * ph; };

    std::ostringstream svg;
    header(svg, chart.title);
    for (double t : yticks) {
        svg << "<line stroke=\"#ddd\" x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(t))
            << "\" y2=\"" << num(py(t)) << "\"/>\n"
            << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    const double slot = chart.categories.empty() ? pw : pw / static_cast<double>(chart.categories.size());
    const double bar = slot * 0.6;
    for (std::size_t c = 0; c < chart.categories.size(); ++c) {
        const double x = kLeft + slot * static_cast<double>(c) + (slot - bar) / 2;
        double base = 0.0;
        for (std::size_t l = 0; l < chart.layers.size(); ++l) {
            const double v = chart.values[c][l];
            svg << "<rect x=\"" << num(x) << "\" width=\"" << num(bar) << "\" y=\"" << num(py(base + v))
                << "\" height=\"" << num(py(base) - py(base + v)) << "\" fill=\""
                << kPalette[l % std::size(kPalette)] << "\"/>\n";
            base += v;
        }
        // "device scenario" labels go on two lines to fit under narrow bars.
        const std::string& name = chart.categories[c];
        const auto space = name.find(' ');
        svg << "<text font-size=\"10\" text-anchor=\"middle\" y=\"" << kTop + ph + 14 << "\">"
            << "<tspan x=\"" << num(x + bar / 2) << "\">" << escape(name.substr(0, space)) << "</tspan>";
        if (space != std::string::npos) {
            svg << "<tspan x=\"" << num(x + bar / 2) << "\" dy=\"12\">" << escape(name.substr(space + 1))
                << "</tspan>";
        }
        svg << "</text>\n";
    }
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text transform=\"translate(22," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";
    legend(svg, chart.layers);
    svg << "</svg>\n";
    return svg.str();
}

namespace {

double years(const SweepRow& r)
{
    return r.lifetime_hours / kHoursPerYear;
}

template <class T>
T closest(const std::set<T>& values, T target)
{
    T best = *values.begin();
    for (T v : values) {
        if (std::abs(static_cast<double>(v) - static_cast<double>(target)) <
            std::abs(static_cast<double>(best) - static_cast<double>(target))) {
            best = v;
        }
    }
    return best;
}

Series sorted(Series s)
{
    std::vector<std::size_t> idx(s.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
    Series out{s.name, {}, {}};
    for (auto i : idx) {
        out.x.push_back(s.x[i]);
        out.y.push_back(s.y[i]);
    }
    return out;
}

void save(const std::filesystem::path& path, const std::string& body, std::vector<std::filesystem::path>& out)
{
    std::ofstream f(path, std::ios::binary);
    f << body;
    out.push_back(path);
}

}  // namespace

std::vector<std::filesystem::path> write_sweep_figures(const std::vector<SweepRow>& all,
                                                       const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<SweepRow> rows;
    std::copy_if(all.begin(), all.end(), std::back_inserter(rows), [](const SweepRow& r) { return r.ok(); });
    std::vector<std::filesystem::path> written;
    if (rows.empty()) {
        return written;
    }

    std::set<std::int64_t> payloads;
    std::set<double> cycles, t3412s;
    for (const auto& r : rows) {
        payloads.insert(r.point.payload_bytes);
        cycles.insert(r.point.cycle_hours);
        t3412s.insert(r.point.t3412_hours);
    }
    const std::int64_t ref_payload = closest<std::int64_t>(payloads, 100);
    const double ref_cycle = closest(cycles, 24.0);
    const double ref_t3412 = *t3412s.begin();
    auto series_key = [](const SweepRow& r) { return r.point.device + " " + r.point.scenario; };

    {
        LineChart c{"Lifetime vs payload (cycle " + tick_label(ref_cycle) + " h)", "payload (bytes)",
                    "lifetime (years)", true, {}};
        std::map<std::string, Series> by;
        for (const auto& r : rows) {
            if (r.point.cycle_hours != ref_cycle || r.point.t3412_hours != ref_t3412) continue;
            auto& s = by[series_key(r)];
            s.name = series_key(r);
            s.x.push_back(static_cast<double>(r.point.payload_bytes));
            s.y.push_back(years(r));
        }
        for (auto& [k, s] : by) c.series.push_back(sorted(std::move(s)));
        save(dir / "lifetime_vs_payload.svg", render(c), written);
    }
    {
        LineChart c{"Lifetime vs transmit cycle (" + std::to_string(ref_payload) + " B)", "cycle (hours)",
                    "lifetime (years)", true, {}};
        std::map<std::string, Series> by;
        for (const auto& r : rows) {
            if (r.point.payload_bytes != ref_payload || r.point.t3412_hours != ref_t3412) continue;
            auto& s = by[series_key(r)];
            s.name = series_key(r);
            s.x.push_back(r.point.cycle_hours);
            s.y.push_back(years(r));
        }
        for (auto& [k, s] : by) c.series.push_back(sorted(std::move(s)));
        save(dir / "lifetime_vs_cycle.svg", render(c), written);
    }
    {
        StackedBars c{"Energy per cycle by phase (" + std::to_string(ref_payload) + " B, " + tick_label(ref_cycle) +
                          " h)",
                      "energy per cycle (J)",
                      {},
                      {"sync", "service request", "cDRX", "release", "TAU", "sleep"},
                      {}};
        for (const auto& r : rows) {
            if (r.point.payload_bytes != ref_payload || r.point.cycle_hours != ref_cycle ||
                r.point.t3412_hours != ref_t3412)
                continue;
            const auto& b = *r.breakdown;
            c.categories.push_back(series_key(r));
            c.values.push_back({b.sync_uj / 1e6, b.service_request_uj / 1e6, b.cdrx_uj / 1e6, b.release_uj / 1e6,
                                b.tau_uj / 1e6, b.sleep_uj / 1e6});
        }
        save(dir / "energy_breakdown.svg", render(c), written);
    }
    {
        std::set<std::string> scenarios;
        for (const auto& r : rows) scenarios.insert(r.point.scenario);
        const std::string scenario = scenarios.count("good") ? "good" : *scenarios.begin();
        LineChart c{"Device comparison (" + scenario + ", " + std::to_string(ref_payload) + " B)", "cycle (hours)",
                    "lifetime (years)", true, {}};
        std::map<std::string, Series> by;
        for (const auto& r : rows) {
            if (r.point.scenario != scenario || r.point.payload_bytes != ref_payload ||
                r.point.t3412_hours != ref_t3412)
                continue;
            auto& s = by[r.point.device];
            s.name = r.point.device;
            s.x.push_back(r.point.cycle_hours);
            s.y.push_back(years(r));
        }
        for (auto& [k, s] : by) c.series.push_back(sorted(std::move(s)));
        save(dir / "device_comparison.svg", render(c), written);
    }
    return written;
}

}  // namespace ciot::plot
