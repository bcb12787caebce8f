#pragma once

#include <stdexcept>
#include <string>

namespace didm {

class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or invariant (negative weights, mass mismatch, ...).
class contract_error : public error {
  public:
    using error::error;
};

/// Malformed input file; message carries the location.
class parse_error : public error {
  public:
    using error::error;
};

/// Missing or unreadable file / directory.
class io_error : public error {
  public:
    using error::error;
};

}  // namespace didm
