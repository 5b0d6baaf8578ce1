#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <map>
#include <sstream>

#include "mesochaos/harness.hpp"

namespace mesochaos::harness {

namespace {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct Figure {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
    bool lines = true;
    std::vector<Series> series;
    std::vector<std::string> notes;
};

std::string fmt(double v, const char* f = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

double cell_real(const Cell& c) {
    if (auto p = std::get_if<double>(&c)) return *p;
    if (auto p = std::get_if<std::int64_t>(&c)) return static_cast<double>(*p);
    return std::nan("");
}

std::string cell_text(const Cell& c) {
    if (auto p = std::get_if<std::string>(&c)) return *p;
    return fmt(cell_real(c), "%.6g");
}

bool has_column(const ResultRecord& r, std::string_view name) {
    return std::any_of(r.columns.begin(), r.columns.end(), [&](const Column& c) { return c.name == name; });
}

void require(const ResultRecord& r, std::initializer_list<std::string_view> names, std::string_view style) {
    for (auto n : names)
        if (!has_column(r, n))
            throw DomainError("figure: style " + std::string(style) + " needs column '" + std::string(n) + "'");
}

bool row_ok(const ResultRecord& r, std::size_t i) {
    if (!has_column(r, "status")) return true;
    return cell_text(r.rows[i][r.column_index("status")]) == "ok";
}

// Series keyed by `group` (empty: one series), rows filtered by `keep`.
std::vector<Series> collect(const ResultRecord& r, std::string_view xcol, std::string_view ycol,
                            std::string_view group, const std::string& prefix, bool absolute,
                            const std::function<bool(std::size_t)>& keep = {}) {
    const std::size_t xi = r.column_index(xcol), yi = r.column_index(ycol);
    std::map<std::string, Series> by;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        if (!row_ok(r, i) || (keep && !keep(i))) continue;
        std::string key = group.empty() ? std::string{} : cell_text(r.rows[i][r.column_index(group)]);
        if (!by.count(key)) {
            order.push_back(key);
            by[key].label = prefix + (group.empty() ? std::string{} : (prefix.empty() ? "" : " ") + std::string(group) + "=" + key);
        }
        double y = cell_real(r.rows[i][yi]);
        by[key].x.push_back(cell_real(r.rows[i][xi]));
        by[key].y.push_back(absolute ? std::abs(y) : y);
    }
    std::vector<Series> out;
    for (const auto& k : order) out.push_back(by[k]);
    return out;
}

// Least-squares slope of log y against x (or log x).
std::optional<double> fitted_slope(const Series& s, bool logx) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!(s.y[i] > 0) || !std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
        if (logx && !(s.x[i] > 0)) continue;
        xs.push_back(logx ? std::log(s.x[i]) : s.x[i]);
        ys.push_back(std::log(s.y[i]));
    }
    if (xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    if (sxx == 0) return std::nullopt;
    return sxy / sxx;
}

Figure decay_figure(const ResultRecord& r) {
    Figure f;
    f.logy = true;
    const Kind k = r.spec.kind;
    switch (k) {
    case Kind::sine_laplace:
        require(r, {"N", "abs_error"}, "loglog-decay");
        f.series = collect(r, "N", "abs_error", "", "|log Laplace - prediction|", false);
        f.xlabel = "N";
        break;
    case Kind::cue_laplace:
        require(r, {"N", "error"}, "loglog-decay");
        f.series = collect(r, "N", "error", "", "|centered log Laplace - prediction|", true);
        f.xlabel = "N";
        f.logx = true;
        break;
    case Kind::bo_check:
        require(r, {"N", "residual", "symbol"}, "loglog-decay");
        f.series = collect(r, "N", "residual", "symbol", "", false);
        f.xlabel = "N";
        f.logx = true;
        break;
    case Kind::sine_gap:
        require(r, {"length", "gap", "N"}, "loglog-decay");
        f.series = collect(r, "length", "gap", "N", "", false);
        f.xlabel = "interval length";
        break;
    case Kind::covariance_suite: {
        require(r, {"part", "separation", "eps", "value"}, "loglog-decay");
        const std::size_t pi = r.column_index("part");
        f.series = collect(r, "eps", "value", "separation", "", false,
                           [&](std::size_t i) { return cell_text(r.rows[i][pi]) == "off_diagonal"; });
        f.xlabel = "eps";
        f.logx = true;
        break;
    }
    case Kind::cue_moments:
    case Kind::sine_moments:
        require(r, {"ell", "moment", "gamma"}, "loglog-decay");
        f.series = collect(r, "ell", "moment", "gamma", "", false);
        f.xlabel = "ell";
        f.logx = true;
        break;
    default:
        throw DomainError("figure: loglog-decay does not apply to " + kind_name(k) + " records");
    }
    f.ylabel = "value";
    for (const auto& s : f.series)
        if (auto sl = fitted_slope(s, f.logx))
            f.notes.push_back((s.label.empty() ? std::string("series") : s.label) + ": slope " +
                              (f.logx ? "d log y / d log x = " : "d log y / dx = ") + fmt(*sl, "%.3f"));
    return f;
}

Figure compare_figure(const ResultRecord& r) {
    Figure f;
    const Kind k = r.spec.kind;
    f.ylabel = "second moment";
    if (k == Kind::cue_moments || k == Kind::sine_moments) {
        require(r, {"moment", "gaussian", "ratio", "ell", "N"}, "moment-compare");
        const std::string x = r.spec.beta.empty() ? "N" : "ell";
        f.xlabel = x;
        f.logx = true;
        auto a = collect(r, x, "moment", "gamma", "exact", false);
        auto b = collect(r, x, "gaussian", "gamma", "gaussian", false);
        f.series.insert(f.series.end(), a.begin(), a.end());
        f.series.insert(f.series.end(), b.begin(), b.end());
        const std::size_t ri = r.column_index("ratio"), xi = r.column_index(x);
        for (std::size_t i = 0; i < r.rows.size(); ++i)
            if (row_ok(r, i))
                f.notes.push_back(x + "=" + cell_text(r.rows[i][xi]) + ": ratio " + fmt(cell_real(r.rows[i][ri]), "%.6f"));
    } else if (k == Kind::gmc_simulate) {
        require(r, {"gamma", "moment_mc", "moment_exact"}, "moment-compare");
        f.xlabel = "gamma";
        f.series = collect(r, "gamma", "moment_mc", "", "Monte Carlo", false);
        auto b = collect(r, "gamma", "moment_exact", "", "quadrature", false);
        f.series.insert(f.series.end(), b.begin(), b.end());
        f.ylabel = "q-th moment";
    } else if (k == Kind::selberg_table) {
        require(r, {"family", "gamma2", "closed_form", "quadrature"}, "moment-compare");
        f.xlabel = "gamma^2";
        f.logy = true;
        auto a = collect(r, "gamma2", "closed_form", "family", "closed form", false);
        auto b = collect(r, "gamma2", "quadrature", "family", "quadrature", false);
        f.series.insert(f.series.end(), a.begin(), a.end());
        f.series.insert(f.series.end(), b.begin(), b.end());
        f.ylabel = "integral";
    } else {
        throw DomainError("figure: moment-compare does not apply to " + kind_name(k) + " records");
    }
    return f;
}

Figure snapshot_figure(const ResultRecord& r) {
    if (!r.metadata.contains("density_snapshot"))
        throw DomainError("figure: density-snapshot needs a density_snapshot entry in the metadata");
    const auto& s = r.metadata.at("density_snapshot");
    Figure f;
    f.xlabel = "u";
    f.ylabel = "chaos density";
    f.lines = true;
    Series d;
    d.label = "gamma=" + fmt(s.value("gamma", 0.0));
    d.x = s.at("x").get<std::vector<double>>();
    d.y = s.at("y").get<std::vector<double>>();
    if (d.x.size() != d.y.size() || d.x.empty()) throw DomainError("figure: malformed density snapshot");
    f.series.push_back(std::move(d));
    return f;
}

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
    return t;
}

std::string render(const Figure& f, const std::string& title) {
    const double W = 720, H = 460, L = 80, R = 220, T = 50, B = 60;
    const double pw = W - L - R, ph = H - T - B;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto tx = [&](double v) { return f.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return f.logy ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!f.logx || x > 0) && (!f.logy || y > 0);
    };
    for (const auto& s : f.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, tx(s.x[i]));
                x1 = std::max(x1, tx(s.x[i]));
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (!std::isfinite(x0)) throw DomainError("figure: no plottable points");
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double py = 0.05 * (y1 - y0), px = 0.03 * (x1 - x0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    auto sx = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * pw; };
    auto sy = [&](double v) { return T + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">" << escape(title) << "</text>\n"
      << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto axis_ticks = [&](double lo, double hi, bool logs) {
        std::vector<double> t;
        if (logs) {
            const int a = static_cast<int>(std::ceil(lo)), b = static_cast<int>(std::floor(hi));
            const int stride = std::max(1, (b - a + 1) / 8);
            for (int e = a; e <= b; e += stride) t.push_back(std::pow(10.0, e));
            if (t.empty()) t.push_back(std::pow(10.0, 0.5 * (lo + hi)));
        } else {
            t = linear_ticks(lo, hi);
        }
        return t;
    };
    for (double v : axis_ticks(x0, x1, f.logx)) {
        const double X = sx(v);
        o << "<line x1=\"" << X << "\" y1=\"" << T + ph << "\" x2=\"" << X << "\" y2=\"" << T + ph + 5
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << X << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">" << fmt(v, "%g")
          << "</text>\n";
    }
    for (double v : axis_ticks(y0, y1, f.logy)) {
        const double Y = sy(v);
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << Y << "\" x2=\"" << L << "\" y2=\"" << Y
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << L - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">" << fmt(v, "%g") << "</text>\n";
    }
    o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(f.xlabel)
      << (f.logx ? " (log)" : "") << "</text>\n"
      << "<text transform=\"translate(18," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(f.ylabel) << (f.logy ? " (log)" : "") << "</text>\n";

    for (std::size_t k = 0; k < f.series.size(); ++k) {
        const auto& s = f.series[k];
        const char* color = palette[k % 10];
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (usable(s.x[i], s.y[i])) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
        if (f.lines && idx.size() > 1) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (auto i : idx) o << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
            o << "\"/>\n";
        }
        if (idx.size() <= 64)
            for (auto i : idx)
                o << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3\" fill=\"" << color
                  << "\"/>\n";
        const double ly = T + 14 + 16 * static_cast<double>(k);
        o << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw + 32 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << L + pw + 36 << "\" y=\"" << ly << "\" font-size=\"11\">"
          << escape(s.label.empty() ? "series" : s.label) << "</text>\n";
    }
    double ny = T + 14 + 16 * static_cast<double>(f.series.size()) + 12;
    for (const auto& n : f.notes) {
        o << "<text x=\"" << L + pw + 12 << "\" y=\"" << ny << "\" font-size=\"10\">" << escape(n) << "</text>\n";
        ny += 14;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::optional<FigureStyle> figure_style_from_name(std::string_view name) {
    if (name == "loglog-decay") return FigureStyle::loglog_decay;
    if (name == "moment-compare") return FigureStyle::moment_compare;
    if (name == "density-snapshot") return FigureStyle::density_snapshot;
    return std::nullopt;
}

FigureStyle default_style(Kind k) {
    switch (k) {
    case Kind::cue_moments:
    case Kind::sine_moments:
    case Kind::selberg_table: return FigureStyle::moment_compare;
    case Kind::gmc_simulate: return FigureStyle::density_snapshot;
    default: return FigureStyle::loglog_decay;
    }
}

std::string render_figure(const ResultRecord& record, FigureStyle style) {
    if (record.rows.empty() && style != FigureStyle::density_snapshot)
        throw DomainError("figure: record has no rows");
    if (record.rows.empty() && !record.metadata.contains("density_snapshot"))
        throw DomainError("figure: record has no rows");
    Figure f;
    switch (style) {
    case FigureStyle::loglog_decay: f = decay_figure(record); break;
    case FigureStyle::moment_compare: f = compare_figure(record); break;
    case FigureStyle::density_snapshot: f = snapshot_figure(record); break;
    }
    return render(f, kind_name(record.spec.kind) + ": " + anchor(record.spec.kind));
}

void emit_figure(const ResultRecord& record, FigureStyle style, const std::filesystem::path& svg) {
    const std::string doc = render_figure(record, style);
    if (svg.has_parent_path()) std::filesystem::create_directories(svg.parent_path());
    std::filesystem::path tmp = svg;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << doc;
    }
    std::filesystem::rename(tmp, svg);
}

}  // namespace mesochaos::harness
