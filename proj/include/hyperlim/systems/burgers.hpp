// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include "../vec.hpp"
#include "model.hpp"

namespace hyperlim
{

/// Inviscid Burgers equation u_t + (u^2/2)_x = 0.
struct Burgers
{
  static constexpr int n_comp = 1;
  static constexpr int dim = 1;
  using State = Vec<1>;

  std::string name() const { return "burgers"; }
  std::string component_name(int) const { return "u"; }

  Mat<1, 1> flux(const State &u) const
  {
    Mat<1, 1> f;
    f.row(0) = Vec<1>{0.5 * u[0] * u[0]};
    return f;
  }

  /// Exact for convex flux: the fan is contained in +-max(|f'(uL)|, |f'(uR)|).
  double max_wave_speed(const Vec<1> &n, const State &uL, const State &uR) const
  {
    return std::max(std::abs(uL[0]), std::abs(uR[0])) * std::abs(n[0]);
  }

  bool admissible(const State &u) const { return std::isfinite(u[0]); }

  bool has_source() const { return false; }
  State source(const State &, std::size_t) const { return State{}; }
  double tau0() const { return infinite_tau0; }

  int n_entropies() const { return 1; }
  double entropy(int, const State &u) const { return 0.5 * u[0] * u[0]; }
  Vec<1> entropy_flux(int, const State &u) const { return Vec<1>{u[0] * u[0] * u[0] / 3.0}; }
  State entropy_grad(int, const State &u) const { return State{u[0]}; }
};

}  // namespace hyperlim
