#pragma once

#include <stdexcept>
#include <string>

namespace reskit {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map the kind to an exit status without string matching.
enum class ErrorKind {
  dimension,     // shapes disagree
  numerical,     // an iterative routine failed or produced non-finite output
  precondition,  // a mathematical hypothesis of the routine does not hold
  capacity,      // enumeration would exceed a configured cap
  rank,          // set is lower dimensional where full dimension is required
  argument,      // bad user-supplied value (index, label, dims, parse)
  lookup,        // unknown scenario or label
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::dimension, w) {}
};

struct NumericalError : Error {
  NumericalError(const std::string& w, long iterations = -1)
      : Error(ErrorKind::numerical, w), iterations(iterations) {}
  long iterations;
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorKind::precondition, w) {}
};

struct CapacityError : Error {
  CapacityError(const std::string& w, double partial = 0.0)
      : Error(ErrorKind::capacity, w), partial(partial) {}
  double partial;  // best value found before giving up, where meaningful
};

struct RankError : Error {
  RankError(const std::string& w, int detected) : Error(ErrorKind::rank, w), detected_dim(detected) {}
  int detected_dim;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorKind::argument, w) {}
};

struct LookupError : Error {
  explicit LookupError(const std::string& w) : Error(ErrorKind::lookup, w) {}
};

}  // namespace reskit
