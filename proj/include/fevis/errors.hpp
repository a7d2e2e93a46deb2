// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fevis {

/// Base class for every error thrown by fevis.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid arguments, malformed input text, unsupported parameters,
/// incompatible operands.  CLI maps this to exit code 1.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Numerical failure at runtime: degenerate geometry, non-finite results,
/// iterative solver non-convergence.  CLI maps this to exit code 2.
class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

/// Point evaluation requested outside the mesh domain.
class OutOfDomainError : public NumericError {
public:
  explicit OutOfDomainError(const std::string& what) : NumericError(what) {}
};

/// File read/write failure.  CLI maps this to exit code 3.
class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace fevis
