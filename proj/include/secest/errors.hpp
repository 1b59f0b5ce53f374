#pragma once

#include <stdexcept>
#include <string>

namespace secest {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerical rank below the column count (for a stacked observation this
/// means the initial state is unobservable).
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class Unobservable : public RankDeficient {
 public:
  using RankDeficient::RankDeficient;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Combinatorial enumeration would exceed its budget.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class SingularLoadBlock : public Error {
 public:
  using Error::Error;
};

class Disconnected : public Error {
 public:
  using Error::Error;
};

class MissingMeasurement : public Error {
 public:
  using Error::Error;
};

class NetworkParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

class ParamFileMissing : public Error {
 public:
  using Error::Error;
};

}  // namespace secest
