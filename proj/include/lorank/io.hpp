#pragma once

#include <string>

#include "lorank/matrix.hpp"

namespace lorank {

/// Binary matrix format: magic bytes "LRFM", u32 version (=1), u64 rows,
/// u64 cols, then rows*cols little-endian f64 values in row-major order.
DenseMatrix read_lrfm(const std::string& path);
void write_lrfm(const std::string& path, const DenseMatrix& m);

struct CsvOptions {
  bool header = false;  // skip the first line when reading
  char delimiter = ',';
};

/// Numeric CSV ('.' decimal separator, one row per line). Throws parse_error
/// with file and line on malformed fields or ragged rows.
DenseMatrix read_csv(const std::string& path, const CsvOptions& options = {});
/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(const std::string& path, const DenseMatrix& m,
               const CsvOptions& options = {});

/// format is "csv" or "lrfm"; anything else is a config_error.
DenseMatrix read_matrix(const std::string& path, const std::string& format,
                        bool header = false);
void write_matrix(const std::string& path, const DenseMatrix& m,
                  const std::string& format);

/// Reads a whole file into a string (io_error if unreadable).
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace lorank
