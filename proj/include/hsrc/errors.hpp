#pragma once

#include <stdexcept>
#include <string>

namespace hsrc {

// Domain failures a caller can legitimately hit at runtime. Usage and
// precondition violations are std::invalid_argument / std::domain_error,
// malformed container files are FormatError.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too few independent fragments to reconstruct the object.
class UnrecoverableError : public Error {
 public:
  UnrecoverableError(int rank, int k)
      : Error("unrecoverable: rank " + std::to_string(rank) +
              " < k=" + std::to_string(k)),
        rank_(rank),
        k_(k) {}
  int rank() const noexcept { return rank_; }
  int k() const noexcept { return k_; }

 private:
  int rank_;
  int k_;
};

// Fragment payloads are mutually inconsistent with any encodable object.
class CorruptFragmentsError : public Error {
 public:
  explicit CorruptFragmentsError(const std::string& detail)
      : Error("corrupt fragments: " + detail) {}
};

// A missing fragment lies outside the span of the surviving ones.
class IrreparableError : public Error {
 public:
  explicit IrreparableError(const std::string& detail)
      : Error("irreparable: " + detail) {}
};

// Malformed or inconsistent fragment container file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsrc
