// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_COMMON_HPP
#define HDGMD_COMMON_HPP

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace hdgmd {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input files or invalid configuration values.
class InputError : public Error {
public:
  using Error::Error;
};

/// A linear solve failed (singular system, incompatible data, ...).
class SolverError : public Error {
public:
  using Error::Error;
};

/// A runtime audit was violated while audits are enforced.
class AuditError : public Error {
public:
  using Error::Error;
};

// Scalar coefficient functions of space and of space-time.
using SpaceFn = std::function<double(const Vec2&)>;
using SpaceTimeFn = std::function<double(const Vec2&, double)>;

/// Run `fn(begin..end)` over chunks of [0, n), using at most
/// HDG_THREADS threads (0 or unset = hardware concurrency, 1 = serial).
void parallel_for(int n, const std::function<void(int, int)>& fn);

/// Thread cap currently in effect.
int thread_count();

} // namespace hdgmd

#endif
