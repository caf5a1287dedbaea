// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include "../vec.hpp"
#include "model.hpp"

namespace hyperlim
{

/// Linear transport u_t + a . grad u = 0 with constant velocity a.
template <int D>
struct Advection
{
  static constexpr int n_comp = 1;
  static constexpr int dim = D;
  using State = Vec<1>;

  Vec<D> velocity;

  std::string name() const { return "advection"; }
  std::string component_name(int) const { return "u"; }

  Mat<1, D> flux(const State &u) const
  {
    Mat<1, D> f;
    f.row(0) = u[0] * velocity;
    return f;
  }

  /// Exact: the Riemann fan is the single contact moving at a . n.
  double max_wave_speed(const Vec<D> &n, const State &, const State &) const
  {
    return std::abs(dot(velocity, n));
  }

  bool admissible(const State &u) const { return std::isfinite(u[0]); }

  bool has_source() const { return false; }
  State source(const State &, std::size_t) const { return State{}; }
  double tau0() const { return infinite_tau0; }

  // Square entropy; any convex function works for linear transport.
  int n_entropies() const { return 1; }
  double entropy(int, const State &u) const { return 0.5 * u[0] * u[0]; }
  Vec<D> entropy_flux(int, const State &u) const { return (0.5 * u[0] * u[0]) * velocity; }
  State entropy_grad(int, const State &u) const { return State{u[0]}; }
};

}  // namespace hyperlim
