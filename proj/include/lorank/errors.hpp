#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lorank {

/// Base class for all lorank errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite or otherwise malformed numerical input.
class invalid_input_error : public error {
 public:
  using error::error;
};

/// Incompatible matrix/vector dimensions.
class shape_error : public error {
 public:
  using error::error;
};

/// An iterative routine failed to converge or produced non-finite values.
class numerical_error : public error {
 public:
  numerical_error(const std::string& what, std::size_t iterations)
      : error(what), iterations_(iterations) {}
  explicit numerical_error(const std::string& what) : error(what) {}

  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t iterations_ = 0;
};

/// File could not be parsed; carries file and 1-based line context.
class parse_error : public error {
 public:
  parse_error(const std::string& file, std::size_t line, const std::string& what)
      : error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Bad configuration value or unreadable config file.
class config_error : public error {
 public:
  using error::error;
};

/// Filesystem / I/O failure.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace lorank
