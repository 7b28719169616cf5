#pragma once

/// CSV artifacts with a fixed column order and 17-significant-digit floats
/// so downstream diffs are exact.

#include <fstream>
#include <string>
#include <vector>

#include "logconvex/errors.hpp"

namespace logconvex {

std::string csv_double(double v);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    /// Mixed row: strings written verbatim.
    void row(const std::vector<std::string>& values);

  private:
    std::ofstream out_;
    std::size_t columns_;
    std::string path_;
};

}  // namespace logconvex
