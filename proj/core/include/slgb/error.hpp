#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slgb {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed header, bad attribute declaration, or inconsistent schema.
class schema_error : public error {
  public:
    using error::error;
};

/// A data row that cannot be reconciled with the schema.
class row_error : public error {
  public:
    row_error(std::size_t line, const std::string &what)
        : error("line " + std::to_string(line) + ": " + what), line_{ line } {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class empty_dataset_error : public error {
  public:
    using error::error;
};

/// Invalid numeric parameter or argument outside its documented domain.
class parameter_error : public error {
  public:
    using error::error;
};

/// Incompatible inputs handed to a composed component (e.g. schema mismatch).
class configuration_error : public error {
  public:
    using error::error;
};

}  // namespace slgb
