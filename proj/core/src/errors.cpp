#include "rigidlab/errors.hpp"

namespace rigidlab {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::NonConvex: return "NonConvex";
    case Errc::BadTopology: return "BadTopology";
    case Errc::DegenerateFace: return "DegenerateFace";
    case Errc::Unbounded: return "Unbounded";
    case Errc::EmptyFacet: return "EmptyFacet";
    case Errc::OriginNotInterior: return "OriginNotInterior";
    case Errc::NonSimpleWithoutChamber: return "NonSimpleWithoutChamber";
    case Errc::DegenerateAngle: return "DegenerateAngle";
    case Errc::InvalidTriangle: return "InvalidTriangle";
    case Errc::NotFlat: return "NotFlat";
    case Errc::ApexNotInterior: return "ApexNotInterior";
    case Errc::DegenerateTetrahedron: return "DegenerateTetrahedron";
    case Errc::IndexMismatch: return "IndexMismatch";
    case Errc::AntipodalPair: return "AntipodalPair";
    case Errc::EmptyInterior: return "EmptyInterior";
    case Errc::NotIsometric: return "NotIsometric";
    case Errc::InconsistentScrew: return "InconsistentScrew";
    case Errc::ClosednessViolated: return "ClosednessViolated";
    case Errc::DegenerateSpan: return "DegenerateSpan";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace rigidlab
