//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace circq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape, length or power-of-two violation.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A spectrum that should be conjugate symmetric is not.
class SymmetryError : public Error {
public:
    using Error::Error;
};

/// Invalid scalar parameter (non-positive alpha, bad bit widths, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A value is not representable in the requested quantization code.
class EncodingError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or gradient during optimization.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Inconsistent network or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents. Carries the offending path and a location hint.
class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& where, const std::string& what)
        : Error(path + ":" + where + ": " + what) {}
};

} // namespace circq
