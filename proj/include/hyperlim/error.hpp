// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hyperlim
{

/// Malformed configuration, unknown keys, invalid option combinations.
/// The command line driver maps this to exit code 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry handed to graph assembly (degenerate cells, broken
/// row sums, inconsistent adjacency).
class AssemblyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A proven invariant failed at run time (CFL violation, inadmissible
/// state, limiter precondition). The driver maps this to exit code 1.
class InvariantError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver failure (mass solve did not converge, root finder
/// handed an invalid bracket).
class NumericsError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{

template <typename... Args>
std::string format_msg(const char *fmt, Args... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return std::string(buf);
}

}  // namespace detail

}  // namespace hyperlim
