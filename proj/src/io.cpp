#include "lorank/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>

#include "lorank/errors.hpp"

namespace lorank {

namespace {

constexpr char kMagic[4] = {'L', 'R', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(take(8)); }

  void expect_magic() {
    if (bytes_.size() < 4 || std::memcmp(bytes_.data(), kMagic, 4) != 0) {
      throw parse_error(path_, 1, "not a LRFM matrix file (bad magic)");
    }
    pos_ = 4;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::uint64_t take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw parse_error(path_, 1, "truncated LRFM matrix file");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += n;
    return v;
  }

  std::string_view bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failure on " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw io_error("write failure on " + path);
}

DenseMatrix read_lrfm(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes, path);
  r.expect_magic();
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw parse_error(path, 1,
                      "unsupported LRFM version " + std::to_string(version));
  }
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (rows != 0 && cols != 0 && r.remaining() / 8 / cols < rows) {
    throw parse_error(path, 1, "truncated LRFM matrix file");
  }
  DenseMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (double& x : m.data()) x = r.f64();
  return m;
}

void write_lrfm(const std::string& path, const DenseMatrix& m) {
  std::string out;
  out.reserve(4 + 4 + 16 + 8 * m.size());
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (double x : m.data()) put_f64(out, x);
  write_file(path, out);
}

DenseMatrix read_csv(const std::string& path, const CsvOptions& options) {
  const std::string content = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;

  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (options.header && lineno == 1) continue;
    if (trim(line).empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(options.delimiter, start);
      std::string_view field = line.substr(
          start, comma == std::string_view::npos ? comma : comma - start);
      field = trim(field);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw parse_error(path, lineno,
                          "bad numeric field '" + std::string(field) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw parse_error(path, lineno,
                        "row has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(cols));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw parse_error(path, lineno, "file holds no data rows");
  }

  DenseMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

void write_csv(const std::string& path, const DenseMatrix& m,
               const CsvOptions& options) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(options.delimiter);
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out += buf;
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

DenseMatrix read_matrix(const std::string& path, const std::string& format,
                        bool header) {
  if (format == "lrfm") return read_lrfm(path);
  if (format == "csv") {
    CsvOptions opts;
    opts.header = header;
    return read_csv(path, opts);
  }
  throw config_error("unknown matrix format '" + format + "' (csv or lrfm)");
}

void write_matrix(const std::string& path, const DenseMatrix& m,
                  const std::string& format) {
  if (format == "lrfm") return write_lrfm(path, m);
  if (format == "csv") return write_csv(path, m);
  throw config_error("unknown matrix format '" + format + "' (csv or lrfm)");
}

}  // namespace lorank
