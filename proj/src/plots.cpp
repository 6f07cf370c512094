#include "bioheat/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bioheat/errors.hpp"

namespace bioheat {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 24.0, kBottom = 48.0;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

struct Frame {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        const double t = x_max > x_min ? (x - x_min) / (x_max - x_min) : 0.5;
        return kLeft + t * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        const double t = y_max > y_min ? (y - y_min) / (y_max - y_min) : 0.5;
        return kHeight - kBottom - t * (kHeight - kTop - kBottom);
    }
};

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)kWidth << "\" height=\""
        << (int)kHeight << "\" viewBox=\"0 0 " << (int)kWidth << " " << (int)kHeight << "\">\n";
    out << "<rect width=\"" << (int)kWidth << "\" height=\"" << (int)kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kWidth / 2) << "\" y=\"16\" font-family=\"monospace\" "
        << "font-size=\"13\" text-anchor=\"middle\">" << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const std::string& x_name,
               const std::string& y_name, const std::vector<double>& x_ticks,
               const std::vector<double>& y_ticks, bool log_ticks) {
    out << "<g stroke=\"black\" fill=\"none\">\n";
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
        << num(kWidth - kRight) << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
    out << "</g>\n";
    out << "<g font-family=\"monospace\" font-size=\"11\" fill=\"black\">\n";
    for (double t : x_ticks) {
        const double x = f.px(t);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
            << num(x) << "\" y2=\"" << num(kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 18)
            << "\" text-anchor=\"middle\">" << label(log_ticks ? std::pow(10.0, t) : t)
            << "</text>\n";
    }
    for (double t : y_ticks) {
        const double y = f.py(t);
        out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
            << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\">" << label(log_ticks ? std::pow(10.0, t) : t)
            << "</text>\n";
    }
    out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 8)
        << "\" text-anchor=\"middle\">" << x_name << "</text>\n";
    out << "<text x=\"14\" y=\"" << num((kTop + kHeight - kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num((kTop + kHeight - kBottom) / 2) << ")\">" << y_name << "</text>\n";
    out << "</g>\n";
}

std::vector<double> spread(double lo, double hi, int count) {
    std::vector<double> ticks;
    for (int i = 0; i < count; ++i)
        ticks.push_back(lo + (hi - lo) * i / static_cast<double>(count - 1));
    return ticks;
}

}  // namespace

std::string render_kernel_plot(const KernelSamples& kernel) {
    // An absent kernel still yields a valid plot: a flat zero line.
    std::vector<double> values = kernel.values;
    if (values.size() < 2) values.assign(2, values.empty() ? 0.0 : values.front());
    const double dt = kernel.dt > 0.0 ? kernel.dt : 1.0;
    const double t_max = dt * static_cast<double>(values.size() - 1);
    double y_max = 0.0;
    for (double v : values) y_max = std::max(y_max, v);
    if (y_max <= 0.0) y_max = 1.0;

    Frame f{0.0, t_max > 0.0 ? t_max : 1.0, 0.0, 1.05 * y_max};
    std::ostringstream out;
    open_svg(out, "relaxation kernel");
    draw_axes(out, f, "t", "H(t)", spread(f.x_min, f.x_max, 5), spread(f.y_min, f.y_max, 5),
              false);
    out << "<polyline fill=\"none\" stroke=\"#1f6fb3\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out << " ";
        out << num(f.px(dt * static_cast<double>(k))) << "," << num(f.py(values[k]));
    }
    out << "\"/>\n</svg>\n";
    return out.str();
}

std::string render_error_plot(const std::vector<std::pair<double, double>>& points) {
    if (points.empty()) throw ValidationError("error plot: no points");
    std::vector<std::pair<double, double>> logs;
    for (const auto& [eps, err] : points) {
        if (!(eps > 0.0)) throw ValidationError("error plot: eps must be positive");
        logs.emplace_back(std::log10(eps), std::log10(std::max(err, 1e-16)));
    }
    Frame f{logs.front().first, logs.front().first, logs.front().second, logs.front().second};
    for (const auto& [x, y] : logs) {
        f.x_min = std::min(f.x_min, x);
        f.x_max = std::max(f.x_max, x);
        f.y_min = std::min(f.y_min, y);
        f.y_max = std::max(f.y_max, y);
    }
    const double x_pad = std::max(0.1, 0.05 * (f.x_max - f.x_min));
    const double y_pad = std::max(0.1, 0.05 * (f.y_max - f.y_min));
    f.x_min -= x_pad;
    f.x_max += x_pad;
    f.y_min -= y_pad;
    f.y_max += y_pad;

    std::ostringstream out;
    open_svg(out, "tissue error vs eps");
    draw_axes(out, f, "eps", "e_tissue", spread(f.x_min, f.x_max, 4), spread(f.y_min, f.y_max, 4),
              true);
    if (logs.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"#b33a1f\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < logs.size(); ++i) {
            if (i) out << " ";
            out << num(f.px(logs[i].first)) << "," << num(f.py(logs[i].second));
        }
        out << "\"/>\n";
    }
    for (const auto& [x, y] : logs)
        out << "<circle cx=\"" << num(f.px(x)) << "\" cy=\"" << num(f.py(y))
            << "\" r=\"3\" fill=\"#b33a1f\"/>\n";
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << content;
}

}  // namespace bioheat
