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

/// Compressible Euler equations with the covolume equation of state
///   p (1 - b rho) = (gamma - 1) rho e,
/// state (rho, m, E). b = 0 recovers the ideal gamma-law gas. Admissible
/// states have rho > 0, 1 - b rho > 0 and positive internal energy.
template <int D>
struct Euler
{
  static constexpr int n_comp = D + 2;
  static constexpr int dim = D;
  using State = Vec<n_comp>;

  double gamma = 1.4;
  double covolume = 0.0;  // b

  std::string name() const { return "euler"; }
  std::string component_name(int k) const
  {
    if (k == 0)
    {
      return "rho";
    }
    if (k == D + 1)
    {
      return "E";
    }
    return D == 1 ? "m" : (k == 1 ? "mx" : "my");
  }

  double density(const State &u) const { return u[0]; }
  double total_energy(const State &u) const { return u[D + 1]; }

  Vec<D> momentum(const State &u) const
  {
    Vec<D> m;
    for (int k = 0; k < D; k++)
    {
      m[k] = u[k + 1];
    }
    return m;
  }

  Vec<D> velocity(const State &u) const { return (1.0 / u[0]) * momentum(u); }

  /// Internal energy density eps(U) = E - |m|^2 / (2 rho).
  double internal_energy(const State &u) const
  {
    Vec<D> m = momentum(u);
    return u[D + 1] - 0.5 * dot(m, m) / u[0];
  }

  double pressure(const State &u) const
  {
    return (gamma - 1.0) * internal_energy(u) / (1.0 - covolume * u[0]);
  }

  double sound_speed(const State &u) const
  {
    return std::sqrt(gamma * pressure(u) / (u[0] * (1.0 - covolume * u[0])));
  }

  Mat<n_comp, D> flux(const State &u) const
  {
    Vec<D> v = velocity(u);
    double p = pressure(u);
    Mat<n_comp, D> f;
    f.row(0) = momentum(u);
    for (int k = 0; k < D; k++)
    {
      f.row(k + 1) = u[k + 1] * v;
      f.row(k + 1)[k] += p;
    }
    f.row(D + 1) = (u[D + 1] + p) * v;
    return f;
  }

  /// Upper bound on the fastest signal of the Riemann problem along n from
  /// the two-rarefaction pressure estimate: the estimate dominates the exact
  /// p*, and the shock-branch edge speeds are monotone in it. Proven for the
  /// ideal gas with gamma <= 5/3; used as-is (validated empirically) for
  /// b > 0 with the covolume sound speed. Degenerate inputs fall back to a
  /// crude finite bound.
  double max_wave_speed(const Vec<D> &n, const State &uL, const State &uR) const
  {
    double vL = dot(momentum(uL), n) / uL[0];
    double vR = dot(momentum(uR), n) / uR[0];
    double pL = pressure(uL), pR = pressure(uR);
    double cL = sound_speed(uL), cR = sound_speed(uR);
    double crude = 2.0 * std::max(std::abs(vL) + cL, std::abs(vR) + cR);
    if (!(pL > 0.0) || !(pR > 0.0) || !std::isfinite(crude))
    {
      return crude;
    }
    double ex = (gamma - 1.0) / (2.0 * gamma);
    double num = cL + cR - 0.5 * (gamma - 1.0) * (vR - vL);
    double p_hat = 0.0;
    if (num > 0.0)
    {
      p_hat = std::pow(num / (cL * std::pow(pL, -ex) + cR * std::pow(pR, -ex)), 1.0 / ex);
    }
    if (!std::isfinite(p_hat))
    {
      return crude;
    }
    auto edge = [&](double p0)
    {
      if (p_hat <= p0)
      {
        return 1.0;
      }
      return std::sqrt(1.0 + (gamma + 1.0) / (2.0 * gamma) * (p_hat / p0 - 1.0));
    };
    double sigL = vL - cL * edge(pL);
    double sigR = vR + cR * edge(pR);
    return std::max({-sigL, sigR, 0.0});
  }

  bool admissible(const State &u) const
  {
    for (int k = 0; k < n_comp; k++)
    {
      if (!std::isfinite(u[k]))
      {
        return false;
      }
    }
    return u[0] > 0.0 && 1.0 - covolume * u[0] > 0.0 && internal_energy(u) > 0.0;
  }

  bool has_source() const { return false; }
  State source(const State &, std::size_t) const { return State{}; }
  double tau0() const { return infinite_tau0; }

  /// Specific entropy exponential: Phi(U) = (eps / rho) (1/rho - b)^(gamma-1).
  /// Quasiconcave on admissible states; b = 0 gives eps rho^-gamma.
  double specific_entropy(const State &u) const
  {
    double rho = u[0];
    return (internal_energy(u) / rho) * std::pow(1.0 / rho - covolume, gamma - 1.0);
  }

  // Convex log entropy -rho/(gamma-1) * [log e + (gamma-1) log(1/rho - b)]
  // with flux v eta.
  int n_entropies() const { return 1; }

  double entropy(int, const State &u) const
  {
    double rho = u[0];
    double e = internal_energy(u) / rho;
    double s = std::log(e) + (gamma - 1.0) * std::log(1.0 / rho - covolume);
    return -rho * s / (gamma - 1.0);
  }

  Vec<D> entropy_flux(int which, const State &u) const { return entropy(which, u) * velocity(u); }

  State entropy_grad(int, const State &u) const
  {
    double rho = u[0];
    Vec<D> m = momentum(u);
    double eps = internal_energy(u);
    double e = eps / rho;
    double s = std::log(e) + (gamma - 1.0) * std::log(1.0 / rho - covolume);
    // d eps / dU = (|m|^2/(2 rho^2), -m/rho, 1); d log(1/rho - b)/d rho =
    // -1/(rho (1 - b rho)).
    double deps_drho = 0.5 * dot(m, m) / (rho * rho);
    State grad{};
    grad[0] = -s / (gamma - 1.0) - (deps_drho / e - 1.0) / (gamma - 1.0) +
              1.0 / (1.0 - covolume * rho);
    for (int k = 0; k < D; k++)
    {
      grad[k + 1] = -(1.0 / (gamma - 1.0)) * (-m[k] / rho) / e;
    }
    grad[D + 1] = -(1.0 / (gamma - 1.0)) / e;
    return grad;
  }
};

}  // namespace hyperlim
