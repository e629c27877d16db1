#pragma once

// Columnar CSV emission and trace persistence. Numeric formatting goes
// through one helper so identical inputs produce identical bytes.
//
// Schemas:
//   trace:     bin_index,time_s,counts
//   histogram: bin_left,bin_right,count,fit_value
//   curve:     x,y

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/histogram.hpp"
#include "biphoton/trace.hpp"

namespace biphoton::io {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

inline void write_trace_csv(const std::filesystem::path& path, const CoincidenceTrace& trace) {
    trace.validate();
    std::ostringstream out;
    out << "bin_index,time_s,counts\n";
    for (std::size_t i = 0; i < trace.counts.size(); ++i) {
        out << i << ',' << format_double(static_cast<double>(i) * trace.bin_duration_s) << ','
            << trace.counts[i] << '\n';
    }
    write_text_file(path, out.str());
}

// Histogram rows with a per-bin fit value (0 when no fit is attached).
template <typename FitFn>
inline void write_histogram_csv(const std::filesystem::path& path, const Histogram& hist,
                                FitFn&& fit_value) {
    if (hist.bins.empty()) throw IoError("refusing to write an empty histogram: " + path.string());
    std::ostringstream out;
    out << "bin_left,bin_right,count,fit_value\n";
    for (const auto& b : hist.bins) {
        out << format_double(b.left) << ',' << format_double(b.right) << ','
            << format_double(b.count) << ',' << format_double(fit_value(b)) << '\n';
    }
    write_text_file(path, out.str());
}

inline void write_curve_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<double, double>>& xy) {
    if (xy.empty()) throw IoError("refusing to write an empty curve: " + path.string());
    std::ostringstream out;
    out << "x,y\n";
    for (const auto& [x, y] : xy) out << format_double(x) << ',' << format_double(y) << '\n';
    write_text_file(path, out.str());
}

// Minimal CSV reader for the trace schema.
inline CoincidenceTrace read_trace_csv(const std::filesystem::path& path, double bin_duration_s) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace: " + path.string());
    CoincidenceTrace trace;
    trace.bin_duration_s = bin_duration_s;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace file: " + path.string());
    if (line.rfind("bin_index", 0) != 0)
        throw IoError("unexpected trace header in " + path.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw IoError("malformed trace row in " + path.string());
        trace.counts.push_back(std::stoll(line.substr(c2 + 1)));
    }
    trace.validate();
    return trace;
}

} // namespace biphoton::io
