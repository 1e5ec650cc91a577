#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maglab {

/// Common base for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- expression layer ------------------------------------------------------

struct SyntaxError : Error {
  SyntaxError(std::size_t pos, const std::string& what)
      : Error("syntax error at position " + std::to_string(pos) + ": " + what),
        position(pos) {}
  std::size_t position;
};

struct UnknownIdentifier : Error {
  UnknownIdentifier(std::size_t pos, const std::string& name)
      : Error("unknown identifier '" + name + "' at position " +
              std::to_string(pos)),
        position(pos), name(name) {}
  std::size_t position;
  std::string name;
};

struct DimensionOutOfRange : Error {
  DimensionOutOfRange(std::size_t pos, const std::string& name, int m)
      : Error("coordinate '" + name + "' exceeds chart dimension m=" +
              std::to_string(m) + " (position " + std::to_string(pos) + ")"),
        position(pos), name(name) {}
  std::size_t position;
  std::string name;
};

struct EvalDomainError : Error {
  using Error::Error;
};

// ---- chart geometry --------------------------------------------------------

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct OutOfChart : Error {
  using Error::Error;
};

// ---- constructions ---------------------------------------------------------

struct NotAGeodesic : Error {
  using Error::Error;
};

struct KernelConditionFailed : Error {
  using Error::Error;
};

struct NonConstantPairing : Error {
  using Error::Error;
};

struct NoPositiveRadius : Error {
  using Error::Error;
};

struct NotSemiStrong : Error {
  using Error::Error;
};

struct NonPositiveRho : Error {
  using Error::Error;
};

// ---- verifier --------------------------------------------------------------

struct PreconditionFailed : Error {
  using Error::Error;
};

struct MissingExteriorBound : Error {
  using Error::Error;
};

// ---- flow ------------------------------------------------------------------

struct LeftChart : Error {
  LeftChart(double t, const std::string& what) : Error(what), time(t) {}
  double time;
};

struct StepUnderflow : Error {
  using Error::Error;
};

struct ZeroInitialEnergy : Error {
  using Error::Error;
};

// ---- critical values -------------------------------------------------------

struct NotStrongType : Error {
  using Error::Error;
};

struct PositiveOrbitAction : Error {
  using Error::Error;
};

// ---- configuration ---------------------------------------------------------

struct ConfigError : Error {
  ConfigError(const std::string& field, const std::string& what)
      : Error("config error at '" + field + "': " + what), field_path(field) {}
  std::string field_path;
};

}  // namespace maglab
