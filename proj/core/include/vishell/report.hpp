#pragma once

#include <string>
#include <vector>

namespace vishell {

// Deterministic CSV writer: fixed column order, shortest round-trip doubles.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

    static std::string format(double v);

private:
    std::string path_;
    void* file_ = nullptr;
};

// Minimal standalone log-log line plot.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_loglog(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<SvgSeries>& series);

} // namespace vishell
