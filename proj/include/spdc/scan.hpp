#pragma once

// Ordered scan samples with CSV emission: 9 significant digits, comma
// delimiter, LF line endings, atomic replace via temp file + rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdc {

struct ScanCurve {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;  // absent values emit empty fields
};

inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string to_csv(const ScanCurve& curve) {
    std::string out;
    for (size_t i = 0; i < curve.columns.size(); ++i) {
        if (i) out += ',';
        out += curve.columns[i];
    }
    out += '\n';
    for (const auto& row : curve.rows) {
        if (row.size() != curve.columns.size())
            throw std::logic_error("csv row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (row[i]) out += format_g9(*row[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline void write_csv(const ScanCurve& curve, const std::filesystem::path& path) {
    write_file_atomic(path, to_csv(curve));
}

}  // namespace spdc
