#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rigidlab {

enum class Errc {
  InvalidMatrix,
  NonConvex,
  BadTopology,
  DegenerateFace,
  Unbounded,
  EmptyFacet,
  OriginNotInterior,
  NonSimpleWithoutChamber,
  DegenerateAngle,
  InvalidTriangle,
  NotFlat,
  ApexNotInterior,
  DegenerateTetrahedron,
  IndexMismatch,
  AntipodalPair,
  EmptyInterior,
  NotIsometric,
  InconsistentScrew,
  ClosednessViolated,
  DegenerateSpan,
  InvalidInput,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rigidlab
