#include "orblab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace orblab {

namespace {

const int W = 720, H = 480;
const int ML = 70, MR = 30, MT = 40, MB = 50;

std::string fmt(Scalar v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Range {
    Scalar lo = std::numeric_limits<Scalar>::max();
    Scalar hi = std::numeric_limits<Scalar>::lowest();
    void add(Scalar v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(hi > lo)) {
            hi = lo + 1;
            lo -= 1;
        }
        const Scalar d = 0.05 * (hi - lo);
        lo -= d;
        hi += d;
    }
};

const char* PALETTE[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void axes(std::ostream& os, const Range& rx, const Range& ry, const std::string& title,
          bool log_x, bool log_y) {
    os << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
       << H - MT - MB << "' fill='none' stroke='#444'/>\n";
    os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
       << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const Scalar fx = rx.lo + (rx.hi - rx.lo) * i / 4;
        const Scalar fy = ry.lo + (ry.hi - ry.lo) * i / 4;
        const int px = ML + (W - ML - MR) * i / 4;
        const int py = H - MB - (H - MT - MB) * i / 4;
        os << "<text x='" << px << "' y='" << H - MB + 18
           << "' text-anchor='middle' font-size='11'>" << fmt(log_x ? std::exp(fx) : fx)
           << "</text>\n";
        os << "<text x='" << ML - 8 << "' y='" << py + 4
           << "' text-anchor='end' font-size='11'>" << fmt(log_y ? std::exp(fy) : fy)
           << "</text>\n";
    }
}

} // namespace

void write_line_svg(const std::string& path, const std::vector<LineSeries>& series,
                    const std::string& title, bool log_x, bool log_y) {
    if (series.empty()) throw std::runtime_error("svg: no series to draw");
    Range rx, ry;
    for (const LineSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.add(log_x ? std::log(s.x[i]) : s.x[i]);
            ry.add(log_y ? std::log(s.y[i]) : s.y[i]);
        }
    rx.pad();
    ry.pad();
    auto px = [&](Scalar v) {
        const Scalar t = ((log_x ? std::log(v) : v) - rx.lo) / (rx.hi - rx.lo);
        return ML + t * (W - ML - MR);
    };
    auto py = [&](Scalar v) {
        const Scalar t = ((log_y ? std::log(v) : v) - ry.lo) / (ry.hi - ry.lo);
        return H - MB - t * (H - MT - MB);
    };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("svg: cannot open for writing: " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    axes(os, rx, ry, title, log_x, log_y);
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill='none' stroke='" << PALETTE[s % 6] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            os << fmt(px(series[s].x[i])) << "," << fmt(py(series[s].y[i])) << " ";
        os << "'/>\n";
        os << "<text x='" << W - MR - 8 << "' y='" << MT + 16 + 14 * s
           << "' text-anchor='end' font-size='12' fill='" << PALETTE[s % 6] << "'>"
           << series[s].name << "</text>\n";
    }
    os << "</svg>\n";
}

namespace {

// fraction of the way from value a to value b at which the level sits
Scalar cut(Scalar a, Scalar b, Scalar level) { return (level - a) / (b - a); }

} // namespace

void write_heatmap_svg(const std::string& path, const std::vector<Scalar>& xs,
                       const std::vector<Scalar>& ys, const MatX& values,
                       const std::vector<Scalar>& contour_levels, const std::string& title) {
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    if (values.rows() != nx || values.cols() != ny)
        throw std::runtime_error("svg: raster shape mismatch");

    Range rv;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) rv.add(values(i, j));
    if (!(rv.hi > rv.lo)) rv.hi = rv.lo + 1;

    Range rx, ry;
    for (Scalar v : xs) rx.add(v);
    for (Scalar v : ys) ry.add(v);
    rx.pad();
    ry.pad();
    auto px = [&](Scalar v) { return ML + (v - rx.lo) / (rx.hi - rx.lo) * (W - ML - MR); };
    auto py = [&](Scalar v) { return H - MB - (v - ry.lo) / (ry.hi - ry.lo) * (H - MT - MB); };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("svg: cannot open for writing: " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";

    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const Scalar v = values(i, j);
            if (std::isnan(v)) continue;
            const Scalar t = (v - rv.lo) / (rv.hi - rv.lo);
            const int r = static_cast<int>(40 + 215 * t);
            const int b = static_cast<int>(255 - 215 * t);
            const Scalar x0 = (i == 0) ? xs[0] : (xs[i - 1] + xs[i]) / 2;
            const Scalar x1 = (i == nx - 1) ? xs[nx - 1] : (xs[i] + xs[i + 1]) / 2;
            const Scalar y0 = (j == 0) ? ys[0] : (ys[j - 1] + ys[j]) / 2;
            const Scalar y1 = (j == ny - 1) ? ys[ny - 1] : (ys[j] + ys[j + 1]) / 2;
            os << "<rect x='" << fmt(px(x0)) << "' y='" << fmt(py(y1)) << "' width='"
               << fmt(px(x1) - px(x0)) << "' height='" << fmt(py(y0) - py(y1)) << "' fill='rgb("
               << r << ",60," << b << ")'/>\n";
        }

    // marching-squares contour overlay
    for (Scalar level : contour_levels) {
        os << "<g stroke='black' stroke-width='1' fill='none'>\n";
        for (int i = 0; i + 1 < nx; ++i)
            for (int j = 0; j + 1 < ny; ++j) {
                const Scalar v00 = values(i, j), v10 = values(i + 1, j);
                const Scalar v01 = values(i, j + 1), v11 = values(i + 1, j + 1);
                if (std::isnan(v00) || std::isnan(v10) || std::isnan(v01) || std::isnan(v11))
                    continue;
                // edge crossing points in data coordinates
                std::vector<std::pair<Scalar, Scalar>> pts;
                auto edge = [&](Scalar a, Scalar b, Scalar xa, Scalar ya, Scalar xb, Scalar yb) {
                    if ((a - level) * (b - level) < 0) {
                        const Scalar t = cut(a, b, level);
                        pts.emplace_back(xa + t * (xb - xa), ya + t * (yb - ya));
                    }
                };
                edge(v00, v10, xs[i], ys[j], xs[i + 1], ys[j]);
                edge(v10, v11, xs[i + 1], ys[j], xs[i + 1], ys[j + 1]);
                edge(v01, v11, xs[i], ys[j + 1], xs[i + 1], ys[j + 1]);
                edge(v00, v01, xs[i], ys[j], xs[i], ys[j + 1]);
                if (pts.size() == 2)
                    os << "<line x1='" << fmt(px(pts[0].first)) << "' y1='"
                       << fmt(py(pts[0].second)) << "' x2='" << fmt(px(pts[1].first)) << "' y2='"
                       << fmt(py(pts[1].second)) << "'/>\n";
            }
        os << "</g>\n";
    }

    os << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
       << H - MT - MB << "' fill='none' stroke='#444'/>\n";
    os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
       << "</text>\n";
    os << "</svg>\n";
}

} // namespace orblab
