// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>
#include "error.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "systems/model.hpp"
#include "vec.hpp"

namespace hyperlim
{

template <SystemModel Model>
using Field = std::vector<typename Model::State>;

template <SystemModel Model>
using FluxTable = std::vector<Mat<Model::n_comp, Model::dim>>;

/// Per-vertex physical fluxes, shared by the update kernels.
template <SystemModel Model>
FluxTable<Model> compute_flux_table(const Model &model, const Field<Model> &U)
{
  FluxTable<Model> f(U.size());
  parallel_for(U.size(), [&](std::size_t i) { f[i] = model.flux(U[i]); });
  return f;
}

/// Graph viscosity d_ij = max over both edge orientations of the wave speed
/// bound times ||c||. A floor of 1e-14 times the largest edge viscosity (or
/// ||c|| when all speeds vanish) keeps bar states well defined.
template <SystemModel Model>
std::vector<double> compute_dL(const ConnectivityGraph &g, const Model &model, const Field<Model> &U)
{
  constexpr int D = Model::dim;
  std::vector<double> dL(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               {
                 auto [i, j] = g.edges[e];
                 Vec<D> c = g.c_edge<D>(e);
                 double cn = norm(c);
                 if (cn == 0.0)
                 {
                   dL[e] = 0.0;
                   return;
                 }
                 Vec<D> nij = (1.0 / cn) * c;
                 double a = model.max_wave_speed(nij, U[i], U[j]) * cn;
                 double b = model.max_wave_speed(-nij, U[j], U[i]) * cn;
                 dL[e] = std::max(a, b);
               });
  double dmax = 0.0;
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    dmax = std::max(dmax, dL[e]);
  }
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    double cn = norm(g.c_edge<D>(e));
    dL[e] = std::max(dL[e], std::max(1e-14 * std::max(dmax, cn), 1e-300));
  }
  return dL;
}

/// Largest stable step: cfl * min( min_i m_i / (4 sum_{j != i} d_ij),
/// tau0 / 2 ). Returns +inf for a field with no waves (caller clamps).
template <SystemModel Model>
double max_dt(const ConnectivityGraph &g, const Model &model, const std::vector<double> &dL, double cfl)
{
  double tau0 = model.tau0();
  if (!(tau0 > 0.0))
  {
    throw ConfigError("source stiffness time tau0 must be positive for explicit stepping");
  }
  std::vector<double> dsum(g.n, 0.0);
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    auto [i, j] = g.edges[e];
    dsum[i] += dL[e];
    dsum[j] += dL[e];
  }
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.n; i++)
  {
    if (dsum[i] > 0.0)
    {
      dt = std::min(dt, g.m[i] / (4.0 * dsum[i]));
    }
  }
  dt = std::min(dt, 0.5 * tau0);
  return cfl * dt;
}

/// Bar states per undirected edge (i < j orientation):
///   bar_ij = (U_i + U_j)/2 - (f(U_j) - f(U_i)) c_ij / (2 d_ij).
/// The diagonal convention bar_ii = U_i is handled by the consumers.
template <SystemModel Model>
Field<Model> compute_bar_states(const ConnectivityGraph &g, const Model &, const Field<Model> &U,
                                const FluxTable<Model> &f, const std::vector<double> &dL)
{
  constexpr int D = Model::dim;
  Field<Model> bar(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               {
                 auto [i, j] = g.edges[e];
                 Vec<D> c = g.c_edge<D>(e);
                 bar[e] = 0.5 * (U[i] + U[j]) - (0.5 / dL[e]) * contract(f[j] - f[i], c);
               });
  return bar;
}

/// Low-order edge fluxes F_ij = (f(U_j) + f(U_i)) . c_ij - d_ij (U_j - U_i),
/// stored on the i < j orientation. Deduces on the state/flux shape so it
/// can be called without a model argument.
template <int N, int D>
std::vector<Vec<N>> compute_low_order_fluxes(const ConnectivityGraph &g, const std::vector<Vec<N>> &U,
                                             const std::vector<Mat<N, D>> &f,
                                             const std::vector<double> &dL)
{
  std::vector<Vec<N>> F(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               {
                 auto [i, j] = g.edges[e];
                 Vec<D> c = g.c_edge<D>(e);
                 F[e] = contract(f[i] + f[j], c) - dL[e] * (U[j] - U[i]);
               });
  return F;
}

struct LowOrderOptions
{
  bool debug_checks = false;  // convex-form identity and admissibility
  double cfl_slack = 1e-12;
};

/// Forward-Euler low-order update from precomputed edge fluxes. Always
/// verifies the CFL conditions 1 + 4 dt d_ii / m_i >= 0 and 2 dt <= tau0,
/// naming the worst vertex on violation. With debug checks on, additionally
/// verifies the convex reconstruction through bar states
///   U^+ = ((1 + 4 dt d_ii/m_i) U_i + sum 4 dt d_ij/m_i bar_ij)/2
///       + (U_i + 2 dt S_i)/2
/// to 1e-12 and admissibility of the result.
template <SystemModel Model>
Field<Model> low_order_update(const ConnectivityGraph &g, const Model &model, const Field<Model> &U,
                              const Field<Model> &edge_flux, const Field<Model> &bar,
                              const std::vector<double> &dL, double dt, const Field<Model> &src,
                              const LowOrderOptions &opt = {})
{
  double tau0 = model.tau0();
  if (!(tau0 > 0.0))
  {
    throw ConfigError("source stiffness time tau0 must be positive for explicit stepping");
  }
  if (std::isfinite(tau0) && 2.0 * dt > tau0 * (1.0 + opt.cfl_slack))
  {
    throw InvariantError(detail::format_msg("source CFL violated: 2 dt = %.3e exceeds tau0 = %.3e",
                                            2.0 * dt, tau0));
  }
  std::vector<double> dsum(g.n, 0.0);
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    auto [i, j] = g.edges[e];
    dsum[i] += dL[e];
    dsum[j] += dL[e];
  }
  for (std::size_t i = 0; i < g.n; i++)
  {
    if (4.0 * dt * dsum[i] > g.m[i] * (1.0 + opt.cfl_slack))
    {
      throw InvariantError(detail::format_msg(
          "CFL violated at vertex %zu: 1 + 4 dt d_ii / m_i = %.3e < 0", i,
          1.0 - 4.0 * dt * dsum[i] / g.m[i]));
    }
  }

  Field<Model> next(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 typename Model::State acc{};
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e != no_edge)
                   {
                     acc += g.orient[s] * edge_flux[e];
                   }
                 }
                 next[i] = U[i] - (dt / g.m[i]) * acc + dt * src[i];
               });

  if (opt.debug_checks)
  {
    parallel_for(g.n,
                 [&](std::size_t i)
                 {
                   double lam0 = 1.0 - 4.0 * dt * dsum[i] / g.m[i];
                   typename Model::State conv = 0.5 * lam0 * U[i];
                   for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                   {
                     std::size_t e = g.edge_of[s];
                     if (e != no_edge)
                     {
                       conv += (2.0 * dt * dL[e] / g.m[i]) * bar[e];
                     }
                   }
                   conv += 0.5 * (U[i] + 2.0 * dt * src[i]);
                   double scale = 1.0 + norm_inf(U[i]) + norm_inf(next[i]);
                   if (norm_inf(conv - next[i]) > 1e-12 * scale)
                   {
                     throw InvariantError(detail::format_msg(
                         "flux form and convex form disagree at vertex %zu by %.3e", i,
                         norm_inf(conv - next[i])));
                   }
                   if (!model.admissible(next[i]))
                   {
                     throw InvariantError(
                         detail::format_msg("low-order update left the admissible set at vertex %zu", i));
                   }
                 });
  }
  return next;
}

/// Residual of the discrete entropy inequality for entropy pair `which`:
///   (m_i/dt)(eta(U^+_i) - eta(U_i))
///     + sum_j [ q(U_j) . c_ij - d_ij (eta(U_j) - eta(U_i)) ]
///     - m_i S_i . grad eta(U^+_i)
/// Nonpositive (up to roundoff) under 1 + 2 dt d_ii / m_i >= 0.
template <SystemModel Model>
std::vector<double> entropy_inequality_residual(const ConnectivityGraph &g, const Model &model, int which,
                                                const Field<Model> &U, const Field<Model> &U_next,
                                                const std::vector<double> &dL, double dt,
                                                const Field<Model> &src)
{
  constexpr int D = Model::dim;
  std::vector<double> eta(g.n);
  std::vector<Vec<D>> qf(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 eta[i] = model.entropy(which, U[i]);
                 qf[i] = model.entropy_flux(which, U[i]);
               });
  std::vector<double> res(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 double acc = 0.0;
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e == no_edge)
                   {
                     continue;
                   }
                   std::size_t j = g.col[s];
                   acc += dot(qf[j], g.c_slot<D>(s)) - dL[e] * (eta[j] - eta[i]);
                 }
                 double lhs = (g.m[i] / dt) * (model.entropy(which, U_next[i]) - eta[i]) + acc;
                 double rhs = g.m[i] * dot(src[i], model.entropy_grad(which, U_next[i]));
                 res[i] = lhs - rhs;
               });
  return res;
}

}  // namespace hyperlim
