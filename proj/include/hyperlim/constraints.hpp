// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>
#include "systems/advection.hpp"
#include "systems/burgers.hpp"
#include "systems/euler.hpp"
#include "systems/model.hpp"
#include "systems/shallow_water.hpp"
#include "vec.hpp"

namespace hyperlim
{

struct QuadCoeffs
{
  double a, b, c;
};

/// A quasiconcave functional Psi whose local lower bound the limiter enforces:
/// Psi(U) >= bound, with upper bounds encoded by negating Psi. The kind
/// selects the line search used for g(l) = slack of Psi(W + l P) against the
/// bound (multiplied by a positive weight for the quadratic forms):
///   linear    - Psi is homogeneous linear in the state; closed-form root.
///   quadratic - `quad` returns a, b, c of the weighted slack polynomial.
///   concave   - `g`/`gp` evaluate the concave slack and its derivative.
///   generic   - `g` only; bisection.
/// In every case the slack at l = 0 is nonnegative for feasible W and the
/// feasible set {l >= 0 : g(l) >= 0} is an interval containing 0.
template <SystemModel Model>
struct ConstraintFunctional
{
  using State = typename Model::State;

  enum class Kind
  {
    linear,
    quadratic,
    concave,
    generic,
  };

  std::string name;
  Kind kind = Kind::linear;
  std::function<double(const State &)> value;
  std::function<bool(const State &)> domain;  // unset: every state admissible for Psi
  std::function<QuadCoeffs(const State &, const State &, double)> quad;
  std::function<double(const State &, const State &, double, double)> g;
  std::function<double(const State &, const State &, double, double)> gp;

  bool in_domain(const State &u) const { return !domain || domain(u); }
};

namespace detail
{

/// Range constraints on a single solution component: component >= bound and
/// -component >= -bound, both linear.
template <SystemModel Model>
std::vector<ConstraintFunctional<Model>> scalar_range_constraints(const std::string &label, int comp)
{
  using C = ConstraintFunctional<Model>;
  using State = typename Model::State;
  C lo;
  lo.name = label + "_min";
  lo.kind = C::Kind::linear;
  lo.value = [comp](const State &u) { return u[comp]; };
  C hi;
  hi.name = label + "_max";
  hi.kind = C::Kind::linear;
  hi.value = [comp](const State &u) { return -u[comp]; };
  return {lo, hi};
}

}  // namespace detail

template <int D>
std::vector<ConstraintFunctional<Advection<D>>> builtin_constraints(const Advection<D> &)
{
  return detail::scalar_range_constraints<Advection<D>>("u", 0);
}

inline std::vector<ConstraintFunctional<Burgers>> builtin_constraints(const Burgers &)
{
  return detail::scalar_range_constraints<Burgers>("u", 0);
}

/// Shallow water: positive depth (linear) and a kinetic energy ceiling,
/// expressed as Psi = -q^2/(2h) with weighted slack h g = -q^2/2 - h bound,
/// quadratic along the limiting segment.
inline std::vector<ConstraintFunctional<ShallowWater>> builtin_constraints(const ShallowWater &)
{
  using C = ConstraintFunctional<ShallowWater>;
  using State = ShallowWater::State;

  C depth;
  depth.name = "depth_min";
  depth.kind = C::Kind::linear;
  depth.value = [](const State &u) { return u[0]; };

  C kinetic;
  kinetic.name = "kinetic_max";
  kinetic.kind = C::Kind::quadratic;
  kinetic.value = [](const State &u) { return u[0] > 0.0 ? -0.5 * u[1] * u[1] / u[0] : 0.0; };
  kinetic.domain = [](const State &u) { return u[0] >= 0.0; };
  kinetic.quad = [](const State &w, const State &p, double bound)
  {
    QuadCoeffs q;
    q.a = -0.5 * p[1] * p[1];
    q.b = -w[1] * p[1] - p[0] * bound;
    q.c = -0.5 * w[1] * w[1] - w[0] * bound;
    return q;
  };
  return {depth, kinetic};
}

/// Compressible Euler: density bracket (linear), internal energy floor with
/// weighted slack rho g = rho E - |m|^2/2 - rho bound (quadratic), and a
/// specific entropy floor whose slack
///   g(l) = eps(U) - bound w(rho),  w(rho) = rho^gamma (1 - b rho)^(1-gamma),
/// is concave for nonnegative bounds; solved by Newton-secant. The optional
/// kinetic energy ceiling mirrors the shallow water form.
template <int D>
std::vector<ConstraintFunctional<Euler<D>>> builtin_constraints(const Euler<D> &model,
                                                                bool kinetic_bound = false)
{
  using M = Euler<D>;
  using C = ConstraintFunctional<M>;
  using State = typename M::State;
  const double gamma = model.gamma;
  const double b_cov = model.covolume;

  auto msq = [](const State &u)
  {
    double s = 0.0;
    for (int k = 0; k < D; k++)
    {
      s += u[1 + k] * u[1 + k];
    }
    return s;
  };
  auto mdot = [](const State &u, const State &v)
  {
    double s = 0.0;
    for (int k = 0; k < D; k++)
    {
      s += u[1 + k] * v[1 + k];
    }
    return s;
  };

  C rho_lo;
  rho_lo.name = "density_min";
  rho_lo.kind = C::Kind::linear;
  rho_lo.value = [](const State &u) { return u[0]; };

  C rho_hi;
  rho_hi.name = "density_max";
  rho_hi.kind = C::Kind::linear;
  rho_hi.value = [](const State &u) { return -u[0]; };

  C energy;
  energy.name = "internal_energy_min";
  energy.kind = C::Kind::quadratic;
  energy.value = [msq](const State &u) { return u[D + 1] - 0.5 * msq(u) / u[0]; };
  energy.domain = [](const State &u) { return u[0] > 0.0; };
  energy.quad = [msq, mdot](const State &w, const State &p, double bound)
  {
    QuadCoeffs q;
    q.a = p[0] * p[D + 1] - 0.5 * msq(p);
    q.b = w[0] * p[D + 1] + w[D + 1] * p[0] - mdot(w, p) - p[0] * bound;
    q.c = w[0] * w[D + 1] - 0.5 * msq(w) - w[0] * bound;
    return q;
  };

  C entropy;
  entropy.name = "specific_entropy_min";
  entropy.kind = C::Kind::concave;
  entropy.value = [msq, gamma, b_cov](const State &u)
  {
    double eps = u[D + 1] - 0.5 * msq(u) / u[0];
    return (eps / u[0]) * std::pow(1.0 / u[0] - b_cov, gamma - 1.0);
  };
  entropy.domain = [b_cov](const State &u) { return u[0] > 0.0 && 1.0 - b_cov * u[0] > 0.0; };
  entropy.g = [msq, gamma, b_cov](const State &w, const State &p, double l, double bound)
  {
    State u = w + l * p;
    double eps = u[D + 1] - 0.5 * msq(u) / u[0];
    double wgt = std::pow(u[0], gamma) * std::pow(1.0 - b_cov * u[0], 1.0 - gamma);
    return eps - bound * wgt;
  };
  entropy.gp = [msq, mdot, gamma, b_cov](const State &w, const State &p, double l, double bound)
  {
    State u = w + l * p;
    double deps = p[D + 1] - mdot(u, p) / u[0] + 0.5 * msq(u) * p[0] / (u[0] * u[0]);
    double dwgt = std::pow(u[0], gamma - 1.0) * std::pow(1.0 - b_cov * u[0], -gamma) * (gamma - b_cov * u[0]);
    return deps - bound * dwgt * p[0];
  };

  std::vector<C> out = {rho_lo, rho_hi, energy, entropy};

  if (kinetic_bound)
  {
    C kinetic;
    kinetic.name = "kinetic_max";
    kinetic.kind = C::Kind::quadratic;
    kinetic.value = [msq](const State &u) { return u[0] > 0.0 ? -0.5 * msq(u) / u[0] : 0.0; };
    kinetic.domain = [](const State &u) { return u[0] >= 0.0; };
    kinetic.quad = [msq, mdot](const State &w, const State &p, double bound)
    {
      QuadCoeffs q;
      q.a = -0.5 * msq(p);
      q.b = -mdot(w, p) - p[0] * bound;
      q.c = -0.5 * msq(w) - w[0] * bound;
      return q;
    };
    out.push_back(kinetic);
  }
  return out;
}

}  // namespace hyperlim
