// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>
#include "error.hpp"
#include "graph.hpp"
#include "low_order.hpp"
#include "parallel.hpp"
#include "systems/model.hpp"
#include "vec.hpp"

namespace hyperlim
{

// --- Smoothness-based viscosity ---------------------------------------------

struct SmoothnessParams
{
  double alpha0 = 0.5;  // activation threshold in [0, 1)
  double q = 4.0;       // sharpness exponent, >= 1
  double eps = 1e-8;    // relative denominator guard
  int component = 0;    // indicator variable: solution component ...
  int entropy = -1;     // ... or an entropy functional when >= 0
};

/// Shock indicator psi(alpha) = clip((alpha - alpha0)/(1 - alpha0))^q.
inline double smoothness_psi(double alpha, const SmoothnessParams &p)
{
  if (!(p.alpha0 >= 0.0 && p.alpha0 < 1.0))
  {
    throw ConfigError("smoothness threshold alpha0 must lie in [0, 1)");
  }
  if (!(p.q >= 1.0))
  {
    throw ConfigError("smoothness exponent q must be at least 1");
  }
  double x = (alpha - p.alpha0) / (1.0 - p.alpha0);
  if (x <= 0.0)
  {
    return 0.0;
  }
  if (x >= 1.0)
  {
    return 1.0;
  }
  return std::pow(x, p.q);
}

/// Lipschitz constant of psi: k_psi = q / (1 - alpha0).
inline double smoothness_psi_lipschitz(const SmoothnessParams &p)
{
  return p.q / (1.0 - p.alpha0);
}

/// Normalized oscillation indicator per vertex,
///   alpha_i = |sum_j beta_ij (g_j - g_i)|
///           / max(sum_j |beta_ij| |g_j - g_i|, eps max_{j in I(i)} |g_j|),
/// which lies in [0, 1]; zero when the stencil values agree.
inline std::vector<double> smoothness_alpha(const ConnectivityGraph &g, const std::vector<double> &gval,
                                            const SmoothnessParams &p)
{
  std::vector<double> alpha(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 double num = 0.0;
                 double den = 0.0;
                 double gmax = std::abs(gval[i]);
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t j = g.col[s];
                   if (j == i)
                   {
                     continue;
                   }
                   double b = g.beta_e[g.edge_of[s]];
                   num += b * (gval[j] - gval[i]);
                   den += std::abs(b) * std::abs(gval[j] - gval[i]);
                   gmax = std::max(gmax, std::abs(gval[j]));
                 }
                 den = std::max(den, p.eps * gmax);
                 alpha[i] = den > 0.0 ? std::min(std::abs(num) / den, 1.0) : 0.0;
               });
  return alpha;
}

/// Indicator values g_i for the smoothness sensor: a solution component or an
/// entropy functional of the state.
template <SystemModel Model>
std::vector<double> smoothness_values(const Model &model, const Field<Model> &U, const SmoothnessParams &p)
{
  std::vector<double> gval(U.size());
  if (p.entropy >= 0)
  {
    if (p.entropy >= model.n_entropies())
    {
      throw ConfigError("smoothness entropy index out of range");
    }
    parallel_for(U.size(), [&](std::size_t i) { gval[i] = model.entropy(p.entropy, U[i]); });
  }
  else
  {
    if (p.component < 0 || p.component >= Model::n_comp)
    {
      throw ConfigError("smoothness component index out of range");
    }
    parallel_for(U.size(), [&](std::size_t i) { gval[i] = U[i][p.component]; });
  }
  return gval;
}

/// d^H_ij = d_ij max(psi_i, psi_j) from per-vertex indicator values.
inline std::vector<double> dH_from_psi(const ConnectivityGraph &g, const std::vector<double> &dL,
                                       const std::vector<double> &psi)
{
  std::vector<double> dH(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               {
                 auto [i, j] = g.edges[e];
                 dH[e] = dL[e] * std::max(psi[i], psi[j]);
               });
  return dH;
}

inline std::vector<double> dH_smoothness(const ConnectivityGraph &g, const std::vector<double> &dL,
                                         const std::vector<double> &alpha, const SmoothnessParams &p)
{
  std::vector<double> psi(g.n);
  parallel_for(g.n, [&](std::size_t i) { psi[i] = smoothness_psi(alpha[i], p); });
  return dH_from_psi(g, dL, psi);
}

// --- Greedy viscosity (scalar problems) --------------------------------------

/// Per-vertex quantities controlling how much viscosity a maximum-principle
/// bound still allows: local bar-state extrema (with bar_ii = u_i), the
/// relative position theta_i of u_i inside them, and the viscosity fractions
///   gamma_i   = 2 dt / m_i sum_{j != i} d_ij,
///   gamma_i^+ = 2 dt / m_i sum_{j: u_j > u_i} d_ij,
///   gamma_i^- = 2 dt / m_i sum_{j: u_j < u_i} d_ij.
struct GapQuantities
{
  std::vector<double> umin, umax, theta, gamma, gamma_plus, gamma_minus;
};

template <int N>
GapQuantities compute_gap_quantities(const ConnectivityGraph &g, const std::vector<Vec<N>> &U,
                                     const std::vector<Vec<N>> &bar, const std::vector<double> &dL,
                                     double dt, int comp = 0)
{
  GapQuantities q;
  q.umin.resize(g.n);
  q.umax.resize(g.n);
  q.theta.resize(g.n);
  q.gamma.assign(g.n, 0.0);
  q.gamma_plus.assign(g.n, 0.0);
  q.gamma_minus.assign(g.n, 0.0);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 double u = U[i][comp];
                 double lo = u;
                 double hi = u;
                 double gs = 0.0, gp = 0.0, gm = 0.0;
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e == no_edge)
                   {
                     continue;
                   }
                   std::size_t j = g.col[s];
                   lo = std::min(lo, bar[e][comp]);
                   hi = std::max(hi, bar[e][comp]);
                   gs += dL[e];
                   if (U[j][comp] > u)
                   {
                     gp += dL[e];
                   }
                   else if (U[j][comp] < u)
                   {
                     gm += dL[e];
                   }
                 }
                 q.umin[i] = lo;
                 q.umax[i] = hi;
                 double w = 2.0 * dt / g.m[i];
                 q.gamma[i] = w * gs;
                 q.gamma_plus[i] = w * gp;
                 q.gamma_minus[i] = w * gm;
                 double span = hi - lo;
                 q.theta[i] = span > 0.0 ? std::clamp((u - lo) / span, 0.0, 1.0) : 0.5;
               });
  return q;
}

/// Largest indicator the maximum principle tolerates per vertex:
///   psi_i = max(1 - 2 (1 - gamma_i) min( (1/gamma_i^-)(1-theta)/theta,
///                                        (1/gamma_i^+) theta/(1-theta) ), 0),
/// with psi_i = 1 when u_i sits on a local extremum (theta in {0, 1}) and,
/// when both one-sided fractions vanish, psi_i = 0 if gamma_i < 1 else 1.
inline std::vector<double> greedy_psi(const ConnectivityGraph &g, const GapQuantities &q)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> psi(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 double th = q.theta[i];
                 if (th <= 0.0 || th >= 1.0)
                 {
                   psi[i] = 1.0;
                   return;
                 }
                 double t_minus = q.gamma_minus[i] > 0.0 ? (1.0 - th) / (th * q.gamma_minus[i]) : inf;
                 double t_plus = q.gamma_plus[i] > 0.0 ? th / ((1.0 - th) * q.gamma_plus[i]) : inf;
                 double t = std::min(t_minus, t_plus);
                 if (t == inf)
                 {
                   psi[i] = q.gamma[i] < 1.0 ? 0.0 : 1.0;
                   return;
                 }
                 psi[i] = std::clamp(1.0 - 2.0 * (1.0 - q.gamma[i]) * t, 0.0, 1.0);
               });
  return psi;
}

/// Greedy viscosity d^H = dL max(psi_i, psi_j) with psi from greedy_psi.
/// Caveat: the per-vertex gap condition keeps the update of component `comp`
/// inside its local bar-state extrema only when the neighboring VALUES also
/// lie inside that interval. On rough data a neighbor far outside the
/// interval reinjects antidiffusion proportional to the data gap, and the
/// update can leave the bounds; use convex limiting when hard bounds are
/// required.
template <int N>
std::vector<double> dH_greedy(const ConnectivityGraph &g, const std::vector<Vec<N>> &U,
                              const std::vector<Vec<N>> &bar, const std::vector<double> &dL, double dt,
                              int comp = 0)
{
  GapQuantities q = compute_gap_quantities(g, U, bar, dL, dt, comp);
  return dH_from_psi(g, dL, greedy_psi(g, q));
}

// --- Entropy commutator viscosity --------------------------------------------

struct CommutatorParams
{
  int entropy = 0;
  double eps = 1e-8;         // relative guard on the entropy spread
  bool mesh_eps = false;     // replace eps by (m_i/|D|)^(exponent/d)
  double mesh_eps_exponent = 3.0;
  double domain_measure = 0.0;  // |D|, required when mesh_eps is on
};

/// Entropy commutator viscosity:
///   N_i = sum_j ( q(U_j) - grad eta(U_i)^T f(U_j) ) . c_ij,
///   Delta eta_i = max( (eta_i^max - eta_i^min)/2, eps_i max_j |eta_j| ),
///   d^H_ij = min( d_ij, max(|N_i|/Delta eta_i, |N_j|/Delta eta_j) ),
/// with ratio zero when the spread guard is zero.
template <SystemModel Model>
std::vector<double> dH_commutator(const ConnectivityGraph &g, const Model &model, const Field<Model> &U,
                                  const FluxTable<Model> &f, const std::vector<double> &dL,
                                  const CommutatorParams &p)
{
  constexpr int D = Model::dim;
  if (p.entropy < 0 || p.entropy >= model.n_entropies())
  {
    throw ConfigError("commutator entropy index out of range");
  }
  if (p.mesh_eps && !(p.domain_measure > 0.0))
  {
    throw ConfigError("mesh-based commutator guard requires the domain measure");
  }
  std::vector<double> eta(g.n);
  std::vector<Vec<D>> qf(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 eta[i] = model.entropy(p.entropy, U[i]);
                 qf[i] = model.entropy_flux(p.entropy, U[i]);
               });
  std::vector<double> ratio(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 typename Model::State grad = model.entropy_grad(p.entropy, U[i]);
                 double N = 0.0;
                 double emin = eta[i], emax = eta[i], eabs = std::abs(eta[i]);
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t j = g.col[s];
                   if (j == i)
                   {
                     continue;
                   }
                   Vec<D> c = g.c_slot<D>(s);
                   N += dot(qf[j], c) - dot(grad, contract(f[j], c));
                   emin = std::min(emin, eta[j]);
                   emax = std::max(emax, eta[j]);
                   eabs = std::max(eabs, std::abs(eta[j]));
                 }
                 double rel = p.mesh_eps ? std::pow(g.m[i] / p.domain_measure,
                                                    p.mesh_eps_exponent / static_cast<double>(g.dim))
                                         : p.eps;
                 double spread = std::max(0.5 * (emax - emin), rel * eabs);
                 ratio[i] = spread > 0.0 ? std::abs(N) / spread : 0.0;
               });
  std::vector<double> dH(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               {
                 auto [i, j] = g.edges[e];
                 dH[e] = std::min(dL[e], std::max(ratio[i], ratio[j]));
               });
  return dH;
}

// --- High-order fluxes and update ---------------------------------------------

enum class MassMode
{
  lumped,          // diagonal mass only
  consistent,      // solve the consistent mass system (lumped-preconditioned Richardson)
  approx_inverse,  // one-shot approximate inverse 2y - (M^L)^{-1} M y
};

struct MassSolveParams
{
  double tol = 1e-12;
  int max_iters = 50;
};

/// Provisional high-order edge fluxes (no mass correction yet):
///   F_ij = (f(U_j) + f(U_i)) . c_ij - d^H_ij (U_j - U_i).
template <int N, int D>
std::vector<Vec<N>> compute_high_order_fluxes(const ConnectivityGraph &g, const std::vector<Vec<N>> &U,
                                              const std::vector<Mat<N, D>> &f,
                                              const std::vector<double> &dH)
{
  return compute_low_order_fluxes(g, U, f, dH);
}

namespace detail
{

/// Lumped-scaled residual infinity norm of M delta = r.
template <int N>
double mass_residual_norm(const ConnectivityGraph &g, const ConsistentMass &mass,
                          const std::vector<Vec<N>> &delta, const std::vector<Vec<N>> &r,
                          std::vector<Vec<N>> &work)
{
  mass.apply(g, delta, work);
  return parallel_reduce(
      g.n, 0.0, [&](std::size_t i) { return norm_inf(r[i] - work[i]); },
      [](double a, double b) { return std::max(a, b); });
}

}  // namespace detail

/// Mass-corrected high-order fluxes and update. Solves (or approximates)
///   M delta = dt (m_i S_i - sum_j F_ij)
/// and folds the correction into the edge fluxes,
///   F_ij += (m_ij / dt)(delta_j - delta_i),
/// so that U^H_i := U_i + dt S_i - (dt/m_i) sum_j F_ij holds exactly with the
/// returned fluxes regardless of the solver tolerance.
template <int N>
void high_order_update(const ConnectivityGraph &g, const std::vector<Vec<N>> &U, double dt,
                       const std::vector<Vec<N>> &src, MassMode mode, const ConsistentMass *mass,
                       std::vector<Vec<N>> &edge_flux, std::vector<Vec<N>> &UH,
                       const MassSolveParams &sp = {})
{
  auto divergence = [&](std::size_t i)
  {
    Vec<N> acc{};
    for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
    {
      std::size_t e = g.edge_of[s];
      if (e != no_edge)
      {
        acc += g.orient[s] * edge_flux[e];
      }
    }
    return acc;
  };

  if (mode != MassMode::lumped)
  {
    if (mass == nullptr)
    {
      throw ConfigError("consistent mass requested but no mass matrix was assembled");
    }
    std::vector<Vec<N>> r(g.n);
    parallel_for(g.n, [&](std::size_t i) { r[i] = dt * (g.m[i] * src[i] - divergence(i)); });

    std::vector<Vec<N>> delta(g.n);
    if (mode == MassMode::approx_inverse)
    {
      std::vector<Vec<N>> y(g.n), My(g.n);
      parallel_for(g.n, [&](std::size_t i) { y[i] = (1.0 / g.m[i]) * r[i]; });
      mass->apply(g, y, My);
      parallel_for(g.n, [&](std::size_t i) { delta[i] = 2.0 * y[i] - (1.0 / g.m[i]) * My[i]; });
    }
    else
    {
      double rnorm = parallel_reduce(
          g.n, 0.0, [&](std::size_t i) { return norm_inf(r[i]); },
          [](double a, double b) { return std::max(a, b); });
      parallel_for(g.n, [&](std::size_t i) { delta[i] = (1.0 / g.m[i]) * r[i]; });
      std::vector<Vec<N>> work(g.n);
      double target = sp.tol * std::max(rnorm, 1e-300);
      double res = detail::mass_residual_norm(g, *mass, delta, r, work);
      // Stationary second-order Richardson preconditioned by the lumped mass.
      // The row-scaled mass spectrum lies in [1/3, 1] on interval meshes (any
      // grading) and in [1/9, 1] on P1 cells in 2D, so the fixed coefficients
      // below give asymptotic contraction factors 0.072 and 0.25; plain
      // Jacobi (factor up to 2/3) cannot reach 1e-12 within the iteration cap.
      double lo = g.dim == 1 ? 1.0 / 3.0 : 1.0 / 9.0;
      double gam = 2.0 / (1.0 + lo);
      double sig = (1.0 - lo) / (1.0 + lo);
      double om = 2.0 / (1.0 + std::sqrt(1.0 - sig * sig));
      std::vector<Vec<N>> prev(g.n);
      int it = 0;
      while (res > target)
      {
        if (++it > sp.max_iters)
        {
          throw NumericsError(detail::format_msg(
              "consistent mass solve stalled at residual %.3e (target %.3e) after %d iterations", res,
              target, sp.max_iters));
        }
        bool have_prev = it > 1;
        parallel_for(g.n,
                     [&](std::size_t i)
                     {
                       Vec<N> corr = (gam / g.m[i]) * (r[i] - work[i]);
                       Vec<N> next = have_prev ? prev[i] + om * (delta[i] - prev[i] + corr)
                                               : delta[i] + corr;
                       prev[i] = delta[i];
                       delta[i] = next;
                     });
        res = detail::mass_residual_norm(g, *mass, delta, r, work);
      }
    }
    parallel_for(g.n_edges(),
                 [&](std::size_t e)
                 {
                   auto [i, j] = g.edges[e];
                   edge_flux[e] += (mass->offdiag_e[e] / dt) * (delta[j] - delta[i]);
                 });
  }

  UH.resize(g.n);
  parallel_for(g.n, [&](std::size_t i) { UH[i] = U[i] + dt * src[i] - (dt / g.m[i]) * divergence(i); });
}

}  // namespace hyperlim
