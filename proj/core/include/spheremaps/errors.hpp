#pragma once

#include <stdexcept>
#include <string>

namespace spheremaps {

/// Base class for all spheremaps errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense materialization or dense-only computation requested beyond the cap.
struct DimensionTooLarge : Error {
  using Error::Error;
};

/// Two vectors with different dimensions were combined.
struct DimMismatch : Error {
  using Error::Error;
};

/// The given vectors do not form a block sequence (disjoint, ordered supports).
struct NotBlockSequence : Error {
  using Error::Error;
};

/// A tuple argument is not strictly increasing / not within its declared set.
struct BadTuple : Error {
  using Error::Error;
};

/// A growth set does not contain enough elements below the requested budget.
struct NotEnoughElements : Error {
  using Error::Error;
};

/// A phi-map denominator vanished on the given input.
struct DegenerateDenominator : Error {
  using Error::Error;
};

/// Input has a negative coordinate but the map is defined on the positive part.
struct NotInPositivePart : Error {
  using Error::Error;
};

/// Input is not on the unit sphere of the map's domain norm.
struct NotOnSphere : Error {
  using Error::Error;
};

/// Exact symmetrization requested for k above the factorial-average cap.
struct KTooLargeForExact : Error {
  using Error::Error;
};

/// Symmetrization requires the wrapped map's image inside the positive l1 facet.
struct TargetNotPositiveFacet : Error {
  using Error::Error;
};

/// Bisection endpoints do not straddle zero.
struct NoSignChange : Error {
  using Error::Error;
};

/// Bisection exhausted its iteration cap without meeting the tolerance.
struct RootNotFound : Error {
  using Error::Error;
};

/// The fundamental function of the oracle appears bounded (c0-like basis).
struct OracleIsC0Like : Error {
  using Error::Error;
};

/// PcpVector evaluation requested from a map that cannot do it exactly.
struct NotPcpCapable : Error {
  using Error::Error;
};

/// A structural precondition of an operation was violated (non-checker paths).
struct HypothesisViolated : Error {
  using Error::Error;
};

/// An experiment manifest failed validation.
struct ManifestError : Error {
  using Error::Error;
};

}  // namespace spheremaps
