// Gravnav error types
// One exception class per recoverable failure mode of the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravnav {

/// Base class for all gravnav errors; carries a human-readable message.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A position query fell outside every grid in a map set.
class OutOfCoverage : public Error {
  public:
    using Error::Error;
};

/// A synthesis node coincided (within 1 m) with a point-mass location.
class DegenerateGeometry : public Error {
  public:
    using Error::Error;
};

/// Malformed grid file; `offset` is the byte position of the problem.
class FormatError : public Error {
  public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_ = 0;
};

/// Route endpoints too close to carry at least two waypoints.
class DegenerateRoute : public Error {
  public:
    using Error::Error;
};

/// Navigation solution blew up (velocity above the divergence guard).
class Divergence : public Error {
  public:
    using Error::Error;
};

/// Conic fit had no unique ellipse solution (collinear or singular data).
class DegenerateFit : public Error {
  public:
    using Error::Error;
};

/// Conic coefficients do not describe an ellipse (4AC - B^2 <= 0).
class NotAnEllipse : public Error {
  public:
    using Error::Error;
};

}  // namespace gravnav
