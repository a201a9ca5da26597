#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skewguard/dataset.hpp"

namespace skewguard {

/// CSV dialect: comma separator, '.' decimal point, UTF-8, mandatory header,
/// RFC-4180 quoting. Numeric fields are written with shortest round-trip
/// formatting, so write/read cycles are value-identical.
struct CsvReadOptions {
    std::string label_column = "class";
    std::vector<std::string> categorical_columns;
    std::vector<std::string> drop_columns;
    std::vector<std::string> log1p_columns;  // column is replaced by log(1 + value)
};

Dataset read_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});

struct CsvWriteOptions {
    bool provenance_column = false;  // append a "synthetic" 0/1 column
};

/// Writes atomically (temp file + rename). Column order: numeric features,
/// categorical columns, label, then "synthetic" when requested.
void write_csv(const Dataset& d, const std::filesystem::path& path,
               const CsvWriteOptions& options = {});

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Atomic text-file write used by every report emitter.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace skewguard
