#include "logconvex/csv.hpp"

#include <cstdio>

namespace logconvex {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : columns_(header.size()), path_(path) {
    out_.open(path);
    if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ",";
        out_ << header[i];
    }
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw ConfigError("csv row width mismatch in '" + path_ + "'");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ",";
        out_ << csv_double(values[i]);
    }
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& values) {
    if (values.size() != columns_)
        throw ConfigError("csv row width mismatch in '" + path_ + "'");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ",";
        out_ << values[i];
    }
    out_ << "\n";
}

}  // namespace logconvex
