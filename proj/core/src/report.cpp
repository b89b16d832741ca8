#include "vishell/report.hpp"

#include "vishell/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vishell {

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {
    std::FILE* f = std::fopen(path_.c_str(), "w");
    if (!f) throw Error("CsvWriter: cannot open '" + path_ + "' for writing");
    file_ = f;
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    row_mixed(columns);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells(values.size());
    std::transform(values.begin(), values.end(), cells.begin(), format);
    row_mixed(cells);
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    std::FILE* f = static_cast<std::FILE*>(file_);
    for (size_t i = 0; i < values.size(); ++i) {
        std::fputs(values[i].c_str(), f);
        std::fputc(i + 1 == values.size() ? '\n' : ',', f);
    }
}

namespace {

struct Range {
    double lo = 0.0, hi = 1.0;
    double map(double v, double out_lo, double out_hi) const {
        const double t = (v - lo) / (hi - lo + 1e-300);
        return out_lo + t * (out_hi - out_lo);
    }
};

} // namespace

void write_svg_loglog(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<SvgSeries>& series) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_svg_loglog: cannot open '" + path + "'");

    Range rx, ry;
    bool first = true;
    for (const SvgSeries& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= 0.0 || s.y[i] <= 0.0) continue;
            const double lx = std::log10(s.x[i]);
            const double ly = std::log10(s.y[i]);
            if (first) {
                rx = {lx, lx};
                ry = {ly, ly};
                first = false;
            }
            rx.lo = std::min(rx.lo, lx);
            rx.hi = std::max(rx.hi, lx);
            ry.lo = std::min(ry.lo, ly);
            ry.hi = std::max(ry.hi, ly);
        }
    if (rx.hi - rx.lo < 1e-12) rx.hi = rx.lo + 1.0;
    if (ry.hi - ry.lo < 1e-12) ry.hi = ry.lo + 1.0;

    const double W = 560, H = 400, L = 70, R = 20, T = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::fprintf(f, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                    "viewBox=\"0 0 %g %g\">\n", W, H, W, H);
    std::fprintf(f, "<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", W, H);
    std::fprintf(f, "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n",
                 W / 2, title.c_str());
    std::fprintf(f, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                    "stroke=\"black\"/>\n", L, T, W - L - R, H - T - B);
    std::fprintf(f, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\">%s "
                    "(log10)</text>\n", L + (W - L - R) / 2, H - 12, xlabel.c_str());
    std::fprintf(f, "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\" "
                    "transform=\"rotate(-90 16 %g)\">%s (log10)</text>\n",
                 T + (H - T - B) / 2, T + (H - T - B) / 2, ylabel.c_str());

    // tick labels at the corners of the data range
    std::fprintf(f, "<text x=\"%g\" y=\"%g\" font-size=\"10\">%.2f</text>\n", L - 4, H - B + 14, rx.lo);
    std::fprintf(f, "<text x=\"%g\" y=\"%g\" font-size=\"10\" text-anchor=\"end\">%.2f</text>\n",
                 W - R, H - B + 14, rx.hi);
    std::fprintf(f, "<text x=\"%g\" y=\"%g\" font-size=\"10\" text-anchor=\"end\">%.2f</text>\n",
                 L - 6, H - B, ry.lo);
    std::fprintf(f, "<text x=\"%g\" y=\"%g\" font-size=\"10\" text-anchor=\"end\">%.2f</text>\n",
                 L - 6, T + 10, ry.hi);

    int ci = 0;
    for (const SvgSeries& s : series) {
        const char* color = colors[ci % 5];
        std::fprintf(f, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"", color);
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= 0.0 || s.y[i] <= 0.0) continue;
            const double px = rx.map(std::log10(s.x[i]), L, W - R);
            const double py = ry.map(std::log10(s.y[i]), H - B, T);
            std::fprintf(f, "%.2f,%.2f ", px, py);
        }
        std::fprintf(f, "\"/>\n");
        std::fprintf(f, "<text x=\"%g\" y=\"%g\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                     L + 8.0, T + 16.0 + 14.0 * ci, color, s.label.c_str());
        ++ci;
    }
    std::fprintf(f, "</svg>\n");
    std::fclose(f);
}

} // namespace vishell
