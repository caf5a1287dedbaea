// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>
#include "../vec.hpp"
#include "model.hpp"

namespace hyperlim
{

/// Shallow water equations in one dimension, state (h, q), with bathymetry
/// and Manning friction sources:
///   S = (0, g h dz/dx - g n^2 h^{-gamma} q |v|),   gamma = 4/3,
/// where z is depth-signed: a physical bump of elevation B(x) is supplied
/// as dz/dx = -B'(x).
/// The friction term is regularized by h^{gamma+1} / (h^{gamma+1} + eps) so
/// it stays finite as h -> 0 and vanishes with q; at h = 0 the momentum
/// source is zero.
struct ShallowWater
{
  static constexpr int n_comp = 2;
  static constexpr int dim = 1;
  using State = Vec<2>;

  double gravity = 9.81;
  double manning = 0.0;
  double manning_exponent = 4.0 / 3.0;
  std::vector<double> bed_gradient;  // dz/dx per vertex; empty = flat bottom

  static constexpr double friction_eps = 1e-14;

  std::string name() const { return "shallow_water"; }
  std::string component_name(int k) const { return k == 0 ? "h" : "q"; }

  double velocity(const State &u) const { return u[0] > 0.0 ? u[1] / u[0] : 0.0; }

  Mat<2, 1> flux(const State &u) const
  {
    double h = u[0], q = u[1];
    double mom = (h > 0.0 ? q * q / h : 0.0) + 0.5 * gravity * h * h;
    Mat<2, 1> f;
    f.row(0) = Vec<1>{q};
    f.row(1) = Vec<1>{mom};
    return f;
  }

  /// Two-rarefaction upper bound: the intermediate depth from the
  /// two-rarefaction ansatz over-estimates the exact h*, and the shock
  /// branch speeds evaluated at it bound the fan edges. Dry states fall
  /// back to the exact dry-bed front speed |v| + 2c.
  double max_wave_speed(const Vec<1> &n, const State &uL, const State &uR) const
  {
    double hL = uL[0], hR = uR[0];
    double vL = velocity(uL) * n[0], vR = velocity(uR) * n[0];
    double cL = std::sqrt(gravity * std::max(hL, 0.0));
    double cR = std::sqrt(gravity * std::max(hR, 0.0));
    if (std::min(hL, hR) <= 0.0)
    {
      return std::max({std::abs(vL) + 2.0 * cL, std::abs(vR) + 2.0 * cR, 0.0});
    }
    double c_star = std::max(0.0, 0.5 * (cL + cR) + 0.25 * (vL - vR));
    double h_star = c_star * c_star / gravity;
    auto branch = [&](double h0)
    {
      if (h_star <= h0)
      {
        return 1.0;
      }
      return std::sqrt(0.5 * (h_star + h0) * h_star / (h0 * h0));
    };
    double sigL = vL - cL * branch(hL);
    double sigR = vR + cR * branch(hR);
    return std::max({-sigL, sigR, 0.0});
  }

  bool admissible(const State &u) const
  {
    if (!std::isfinite(u[0]) || !std::isfinite(u[1]))
    {
      return false;
    }
    if (u[0] < 0.0)
    {
      return false;
    }
    return u[0] > 0.0 || u[1] == 0.0;
  }

  bool has_source() const { return manning != 0.0 || !bed_gradient.empty(); }

  State source(const State &u, std::size_t vertex) const
  {
    double h = u[0], q = u[1];
    State s{};
    if (h <= 0.0)
    {
      return s;
    }
    double dz = (vertex < bed_gradient.size()) ? bed_gradient[vertex] : 0.0;
    double mom = gravity * h * dz;
    if (manning != 0.0)
    {
      double hp = std::pow(h, manning_exponent + 1.0);
      mom -= gravity * manning * manning * q * std::abs(q) / (hp + friction_eps);
    }
    s[1] = mom;
    return s;
  }

  // Friction only damps momentum and the bathymetry source is Lipschitz in
  // h, so there is no source-imposed step restriction.
  double tau0() const { return infinite_tau0; }

  // Energy pair: eta = q^2/(2h) + g h^2 / 2, flux v (q^2/(2h) + g h^2).
  int n_entropies() const { return 1; }

  double entropy(int, const State &u) const
  {
    double h = u[0], q = u[1];
    double kin = h > 0.0 ? 0.5 * q * q / h : 0.0;
    return kin + 0.5 * gravity * h * h;
  }

  Vec<1> entropy_flux(int, const State &u) const
  {
    double h = u[0], q = u[1];
    if (h <= 0.0)
    {
      return Vec<1>{};
    }
    return Vec<1>{(q / h) * (0.5 * q * q / h + gravity * h * h)};
  }

  State entropy_grad(int, const State &u) const
  {
    double h = u[0], q = u[1];
    if (h <= 0.0)
    {
      return State{};
    }
    double v = q / h;
    return State{-0.5 * v * v + gravity * h, v};
  }
};

}  // namespace hyperlim
