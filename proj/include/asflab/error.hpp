// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace asflab {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (p <= 1, c > period, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A lattice parameter does not land on the grid (a/h, b*period, c/h not integral,
/// or a step does not divide the grid size).
class IncommensurateParameters : public Error {
public:
    using Error::Error;
};

/// Vectors or families living on different grids.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

/// Dimension or length disagreement.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Dense path requested above the configured size cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Invalid sweep specification or configuration.
class SpecError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace asflab
