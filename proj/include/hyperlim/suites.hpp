// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Randomized property suites behind the `check` CLI subcommand. Each suite
// replays a mathematical guarantee of the scheme on freshly sampled meshes
// and states; the same generators are reused by the unit and acceptance
// tests so every tolerance lives next to the property it protects.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>
#include "constraints.hpp"
#include "error.hpp"
#include "exact_riemann.hpp"
#include "graph.hpp"
#include "high_order.hpp"
#include "limiting.hpp"
#include "low_order.hpp"
#include "mesh.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "systems/advection.hpp"
#include "systems/burgers.hpp"
#include "systems/euler.hpp"
#include "systems/shallow_water.hpp"
#include "time_integration.hpp"

namespace hyperlim::checks
{

struct SuiteResult
{
  std::string name;
  bool pass = false;
  long trials = 0;
  double worst = 0.0;  // suite-specific margin; see detail
  std::string detail;
};

// --- shared generators --------------------------------------------------------

inline ConnectivityGraph random_interval_graph(Rng &rng, std::size_t n, Discretization disc,
                                               Topology topo = Topology::periodic,
                                               double jitter_max = 0.4)
{
  double jitter = jitter_max > 0.0 ? rng.uniform(0.0, jitter_max) : 0.0;
  MeshDescriptor mesh = make_interval_mesh(n, 0.0, 1.0, topo, jitter, &rng);
  return disc == Discretization::finite_volume ? build_fv_graph(mesh) : build_cg_p1_graph(mesh);
}

/// Scalar field mixing noise, smooth waves, and jumps, with values in [lo, hi].
template <SystemModel Model>
Field<Model> random_scalar_field(Rng &rng, const ConnectivityGraph &g, double lo, double hi)
{
  static_assert(Model::n_comp == 1);
  Field<Model> U(g.n);
  std::uint64_t mode = rng.index(3);
  double phase = rng.uniform(0.0, 1.0);
  double edge = rng.uniform(0.2, 0.8);
  for (std::size_t i = 0; i < g.n; i++)
  {
    double x = g.x[i][0];
    double t = 0.0;
    switch (mode)
    {
      case 0:
        t = rng.uniform();
        break;
      case 1:
        t = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (x + phase)) * rng.uniform(0.6, 1.0);
        break;
      default:
        t = x < edge ? 0.9 : 0.1;
        if (rng.index(8) == 0)
        {
          t = rng.uniform();
        }
        break;
    }
    U[i] = typename Model::State{lo + (hi - lo) * std::clamp(t, 0.0, 1.0)};
  }
  return U;
}

template <int D>
typename Euler<D>::State euler_from_primitive(const Euler<D> &model, double rho, const Vec<D> &v,
                                              double p)
{
  typename Euler<D>::State u{};
  u[0] = rho;
  double ke = 0.0;
  for (int ax = 0; ax < D; ax++)
  {
    u[1 + ax] = rho * v[ax];
    ke += 0.5 * rho * v[ax] * v[ax];
  }
  u[D + 1] = p * (1.0 - model.covolume * rho) / (model.gamma - 1.0) + ke;
  return u;
}

template <int D>
typename Euler<D>::State random_euler_state(const Euler<D> &model, Rng &rng)
{
  double rho_hi = model.covolume > 0.0 ? 0.9 / model.covolume : 3.0;
  double rho = std::exp(rng.uniform(std::log(0.1), std::log(std::min(3.0, rho_hi))));
  double p = std::exp(rng.uniform(std::log(0.02), std::log(5.0)));
  Vec<D> v;
  for (int ax = 0; ax < D; ax++)
  {
    v[ax] = rng.uniform(-3.0, 3.0);
  }
  return euler_from_primitive(model, rho, v, p);
}

inline ShallowWater::State random_swe_state(Rng &rng)
{
  double h = rng.uniform(0.05, 2.0);
  return ShallowWater::State{h, h * rng.uniform(-2.0, 2.0)};
}

/// Average of the exact self-similar Riemann solution of the Burgers flux
/// over the fan [-lam, lam], evaluated by Gauss quadrature between the kinks
/// of the solution (exact there, since the profile is piecewise linear).
inline double burgers_fan_average(double uL, double uR, double lam)
{
  std::vector<double> brk = {-lam, lam};
  if (uL >= uR)
  {
    brk.push_back(std::clamp(0.5 * (uL + uR), -lam, lam));
  }
  else
  {
    brk.push_back(std::clamp(uL, -lam, lam));
    brk.push_back(std::clamp(uR, -lam, lam));
  }
  std::sort(brk.begin(), brk.end());
  double integral = 0.0;
  const double gauss = 0.5 / std::sqrt(3.0);
  for (std::size_t k = 0; k + 1 < brk.size(); k++)
  {
    double w = brk[k + 1] - brk[k];
    double mid = 0.5 * (brk[k] + brk[k + 1]);
    integral += 0.5 * w * burgers_riemann(uL, uR, mid - gauss * w);
    integral += 0.5 * w * burgers_riemann(uL, uR, mid + gauss * w);
  }
  return integral / (2.0 * lam);
}

/// U_i - (dt/m_i) sum_j sigma_ij F_e for precomputed antisymmetric fluxes.
template <int N>
std::vector<Vec<N>> explicit_update(const ConnectivityGraph &g, const std::vector<Vec<N>> &U,
                                    const std::vector<Vec<N>> &edge_flux, double dt)
{
  std::vector<Vec<N>> next(g.n);
  for (std::size_t i = 0; i < g.n; i++)
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
    next[i] = U[i] - (dt / g.m[i]) * acc;
  }
  return next;
}

template <int N>
std::vector<double> field_masses(const ConnectivityGraph &g, const std::vector<Vec<N>> &U)
{
  std::vector<double> mass(N, 0.0);
  for (std::size_t i = 0; i < g.n; i++)
  {
    for (int k = 0; k < N; k++)
    {
      mass[static_cast<std::size_t>(k)] += g.m[i] * U[i][k];
    }
  }
  return mass;
}

// --- suites -------------------------------------------------------------------

/// Structural graph identities on every mesh/discretization combination:
/// mass partition of the box, zero row sums of c, edge/slot bookkeeping,
/// and consistent-mass row sums against the lumped mass.
inline SuiteResult suite_graph(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "graph";
  Rng rng(seed);
  double worst = 0.0;
  long trials = 0;

  auto inspect = [&](const MeshDescriptor &mesh, const ConnectivityGraph &g, double box_measure,
                     const ConsistentMass *mass)
  {
    trials++;
    double msum = 0.0;
    for (double mi : g.m)
    {
      msum += mi;
    }
    worst = std::max(worst, std::abs(msum - box_measure) / box_measure);
    worst = std::max(worst, std::abs(g.volume - box_measure) / box_measure);

    double cmax = 1e-300;
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      double nx = std::hypot(g.c_e[e][0], g.c_e[e][1]);
      cmax = std::max(cmax, nx);
    }
    std::size_t maxdeg = 0;
    for (std::size_t i = 0; i < g.n; i++)
    {
      maxdeg = std::max(maxdeg, g.degree(i));
      double sx = 0.0, sy = 0.0;
      for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
      {
        std::size_t e = g.edge_of[s];
        if (e == no_edge)
        {
          if (g.col[s] != i || g.orient[s] != 0.0)
          {
            worst = std::max(worst, 1.0);
          }
          continue;
        }
        sx += g.orient[s] * g.c_e[e][0];
        sy += g.orient[s] * g.c_e[e][1];
        bool first = g.edges[e].first == i;
        if ((first && (g.orient[s] != 1.0 || g.edge_slots[e].first != s)) ||
            (!first && (g.orient[s] != -1.0 || g.edge_slots[e].second != s)) ||
            g.col[s] != (first ? g.edges[e].second : g.edges[e].first))
        {
          worst = std::max(worst, 1.0);
        }
      }
      worst = std::max(worst, std::hypot(sx, sy) / cmax);
    }
    if (maxdeg != g.max_degree)
    {
      worst = std::max(worst, 1.0);
    }
    if (mass != nullptr)
    {
      for (std::size_t i = 0; i < g.n; i++)
      {
        double row = mass->diag[i];
        for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
        {
          std::size_t e = g.edge_of[s];
          if (e != no_edge)
          {
            row += mass->offdiag_e[e];
          }
        }
        worst = std::max(worst, std::abs(row - g.m[i]) / g.m[i]);
      }
    }
    (void)mesh;
  };

  for (Topology topo : {Topology::periodic, Topology::compact_support})
  {
    std::size_t n = 24 + rng.index(36);
    MeshDescriptor m1 = make_interval_mesh(n, -1.0, 2.0, topo, rng.uniform(0.0, 0.4), &rng);
    inspect(m1, build_fv_graph(m1), 3.0, nullptr);
    ConnectivityGraph gc = build_cg_p1_graph(m1);
    ConsistentMass mm = build_cg_consistent_mass(m1, gc);
    inspect(m1, gc, 3.0, &mm);

    std::size_t nx = 6 + rng.index(6), ny = 5 + rng.index(6);
    MeshDescriptor m2 =
        make_quad_mesh(nx, ny, {0.0, -1.0}, {2.0, 1.0}, topo, rng.uniform(0.0, 0.3), &rng);
    inspect(m2, build_fv_graph(m2), 4.0, nullptr);

    MeshDescriptor m3 =
        make_triangle_mesh(nx, ny, {0.0, -1.0}, {2.0, 1.0}, topo, rng.uniform(0.0, 0.3), &rng);
    ConnectivityGraph gt = build_cg_p1_graph(m3);
    ConsistentMass mt = build_cg_consistent_mass(m3, gt);
    inspect(m3, gt, 4.0, &mt);
  }

  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-12;
  res.detail = detail::format_msg("max structural violation %.3e (tol 1e-12)", worst);
  return res;
}

/// Bar states are fan averages: for the Burgers flux the bar state formula
/// must reproduce the average of the exact Riemann fan over [-lam, lam] for
/// any lam at or above the maximal wave speed.
inline SuiteResult suite_riemann_average(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "riemann_average";
  Rng rng(seed);
  Burgers model;
  double worst = 0.0;
  long trials = 0;
  for (int t = 0; t < 400; t++)
  {
    double uL = rng.uniform(-2.0, 2.0);
    double uR = rng.uniform(-2.0, 2.0);
    if (t % 4 == 0)
    {
      uL = -std::abs(uL);  // force transonic rarefactions regularly
      uR = std::abs(uR);
    }
    Vec<1> n{1.0};
    double lam = model.max_wave_speed(n, Vec<1>{uL}, Vec<1>{uR});
    lam = std::max(lam, 1e-8) * rng.uniform(1.0, 2.0);
    double bar = 0.5 * (uL + uR) - (0.5 * uR * uR - 0.5 * uL * uL) / (2.0 * lam);
    double avg = burgers_fan_average(uL, uR, lam);
    worst = std::max(worst, std::abs(bar - avg));
    trials++;
  }
  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-8;
  res.detail = detail::format_msg("max |bar - fan average| %.3e (tol 1e-8)", worst);
  return res;
}

/// Low-order invariance: scalar data in [0, 1] stays in [0, 1] (slack 1e-12)
/// and total mass is conserved, on random jittered meshes, speeds, and CFL
/// fractions, with the convex-reconstruction debug check enabled.
inline SuiteResult suite_low_order(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "low_order";
  Rng rng(seed);
  double worst = 0.0;
  long trials = 0;
  LowOrderOptions opt;
  opt.debug_checks = true;

  auto run_one = [&](auto model)
  {
    using Model = decltype(model);
    Discretization disc =
        rng.index(2) == 0 ? Discretization::finite_volume : Discretization::cg_p1;
    ConnectivityGraph g = random_interval_graph(rng, 24 + rng.index(72), disc);
    Field<Model> U = random_scalar_field<Model>(rng, g, 0.0, 1.0);
    FluxTable<Model> f = compute_flux_table(model, U);
    std::vector<double> dL = compute_dL(g, model, U);
    double dt = max_dt(g, model, dL, rng.uniform(0.5, 1.0));
    Field<Model> bar = compute_bar_states(g, model, U, f, dL);
    Field<Model> FL = compute_low_order_fluxes(g, U, f, dL);
    Field<Model> src(g.n);
    Field<Model> next = low_order_update(g, model, U, FL, bar, dL, dt, src, opt);
    std::vector<double> m0 = field_masses(g, U);
    std::vector<double> m1 = field_masses(g, next);
    worst = std::max(worst, std::abs(m1[0] - m0[0]) / std::max(std::abs(m0[0]), 1e-3));
    for (std::size_t i = 0; i < g.n; i++)
    {
      worst = std::max(worst, next[i][0] - 1.0);
      worst = std::max(worst, -next[i][0]);
    }
    trials++;
  };

  for (int t = 0; t < 100; t++)
  {
    if (rng.index(2) == 0)
    {
      Advection<1> model;
      model.velocity = Vec<1>{rng.uniform(0.2, 2.0) * (rng.index(2) == 0 ? 1.0 : -1.0)};
      run_one(model);
    }
    else
    {
      run_one(Burgers{});
    }
  }
  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-12;
  res.detail = detail::format_msg("max range/mass violation %.3e (tol 1e-12)", worst);
  return res;
}

/// Discrete entropy inequality of the low-order scheme: the per-vertex
/// residual stays below 1e-10 (normalized by m_i/dt) for every shipped
/// entropy, across many steps of rough Burgers and Euler data.
inline SuiteResult suite_entropy(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "entropy";
  Rng rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  long trials = 0;

  auto run_steps = [&](auto model, auto make_field, int steps)
  {
    using Model = decltype(model);
    ConnectivityGraph g = random_interval_graph(rng, 64 + rng.index(64),
                                                Discretization::finite_volume);
    Field<Model> U = make_field(g);
    Field<Model> src(g.n);
    for (int s = 0; s < steps; s++)
    {
      FluxTable<Model> f = compute_flux_table(model, U);
      std::vector<double> dL = compute_dL(g, model, U);
      double dt = max_dt(g, model, dL, 0.9);
      Field<Model> bar = compute_bar_states(g, model, U, f, dL);
      Field<Model> FL = compute_low_order_fluxes(g, U, f, dL);
      Field<Model> next = low_order_update(g, model, U, FL, bar, dL, dt, src);
      for (int k = 0; k < model.n_entropies(); k++)
      {
        std::vector<double> R = entropy_inequality_residual(g, model, k, U, next, dL, dt, src);
        for (std::size_t i = 0; i < g.n; i++)
        {
          worst = std::max(worst, R[i] * dt / g.m[i]);
        }
        trials++;
      }
      U = std::move(next);
    }
  };

  run_steps(Burgers{},
            [&](const ConnectivityGraph &g) { return random_scalar_field<Burgers>(rng, g, -1.0, 1.0); },
            60);
  Euler<1> euler;
  run_steps(euler,
            [&](const ConnectivityGraph &g)
            {
              Field<Euler<1>> U(g.n);
              auto left = random_euler_state(euler, rng);
              auto right = random_euler_state(euler, rng);
              for (std::size_t i = 0; i < g.n; i++)
              {
                U[i] = g.x[i][0] < 0.5 ? left : right;
              }
              return U;
            },
            30);

  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-10;
  res.detail = detail::format_msg("max normalized entropy production %.3e (tol 1e-10)", worst);
  return res;
}

/// The model wave-speed estimate is a guaranteed upper bound: against the
/// exact Riemann solution of the gamma-law Euler system the estimate must
/// never fall below the true fastest signal speed.
inline SuiteResult suite_wave_speed(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "wave_speed";
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  long trials = 0;
  const double gammas[] = {1.4, 5.0 / 3.0, 2.0};
  while (trials < 2000)
  {
    Euler<1> model;
    model.gamma = gammas[rng.index(3)];
    double rhoL = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    double rhoR = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    double pL = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    double pR = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
    double vL = rng.uniform(-5.0, 5.0);
    double vR = rng.uniform(-5.0, 5.0);
    double cL = std::sqrt(model.gamma * pL / rhoL);
    double cR = std::sqrt(model.gamma * pR / rhoR);
    if (2.0 * (cL + cR) / (model.gamma - 1.0) <= (vR - vL) * (1.0 + 1e-6) + 1e-12)
    {
      continue;  // near-vacuum data sits outside the oracle's validity
    }
    ExactRiemann exact(model.gamma, {rhoL, vL, pL}, {rhoR, vR, pR});
    double lam_exact = exact.max_wave_speed();
    typename Euler<1>::State uL = euler_from_primitive(model, rhoL, Vec<1>{vL}, pL);
    typename Euler<1>::State uR = euler_from_primitive(model, rhoR, Vec<1>{vR}, pR);
    double lam_est = model.max_wave_speed(Vec<1>{1.0}, uL, uR);
    worst = std::min(worst, (lam_est - lam_exact) / std::max(1.0, lam_exact));
    trials++;
  }
  res.trials = trials;
  res.worst = worst;
  res.pass = worst >= -1e-12;
  res.detail = detail::format_msg("min normalized (estimate - exact) gap %.3e (must be >= -1e-12)", worst);
  return res;
}

/// Smoothness-viscosity containment: with unit beta weights, psi(alpha0=1/2,
/// q=4), and the step gated by 1/(1 + k_psi c#), the tracked component of
/// the ungated high-order update stays inside the local bar-state extrema.
/// Exercised on Euler density and shallow-water height.
inline SuiteResult suite_smoothness(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "smoothness";
  Rng rng(seed);
  SmoothnessParams sp;  // alpha0 = 1/2, q = 4, tracked component 0
  double worst = -std::numeric_limits<double>::infinity();
  long trials = 0;

  auto run_one = [&](auto model, auto make_state)
  {
    using Model = decltype(model);
    ConnectivityGraph g = random_interval_graph(rng, 24 + rng.index(56),
                                                rng.index(2) == 0 ? Discretization::finite_volume
                                                                  : Discretization::cg_p1);
    Field<Model> U(g.n);
    for (std::size_t i = 0; i < g.n; i++)
    {
      U[i] = make_state();
    }
    FluxTable<Model> f = compute_flux_table(model, U);
    std::vector<double> dL = compute_dL(g, model, U);
    double gate = 1.0 / (1.0 + smoothness_psi_lipschitz(sp) * static_cast<double>(g.max_degree));
    double dt = max_dt(g, model, dL, 1.0) * 2.0 * gate * rng.uniform(0.5, 1.0);
    Field<Model> bar = compute_bar_states(g, model, U, f, dL);
    std::vector<double> alpha = smoothness_alpha(g, smoothness_values(model, U, sp), sp);
    std::vector<double> dH = dH_smoothness(g, dL, alpha, sp);
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      worst = std::max(worst, dH[e] - dL[e]);  // 0 <= dH <= dL
      worst = std::max(worst, -dH[e]);
    }
    Field<Model> FH = compute_high_order_fluxes(g, U, f, dH);
    Field<Model> UH = explicit_update(g, U, FH, dt);
    GapQuantities q = compute_gap_quantities(g, U, bar, dL, dt, 0);
    for (std::size_t i = 0; i < g.n; i++)
    {
      double scale = std::max(1.0, std::max(std::abs(q.umin[i]), std::abs(q.umax[i])));
      worst = std::max(worst, (UH[i][0] - q.umax[i]) / scale);
      worst = std::max(worst, (q.umin[i] - UH[i][0]) / scale);
    }
    trials++;
  };

  for (int t = 0; t < 100; t++)
  {
    Euler<1> euler;
    run_one(euler, [&] { return random_euler_state(euler, rng); });
    run_one(ShallowWater{}, [&] { return random_swe_state(rng); });
  }
  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-10;
  res.detail = detail::format_msg("max containment violation %.3e (tol 1e-10)", worst);
  return res;
}

/// Greedy-viscosity guarantees that actually hold for scalar problems under
/// gamma_i <= 1: (a) 0 <= dH <= dL, (b) the reduced-viscosity update equals
/// the low-order update plus dt/m_i sum_j (dH - dL)(u_j - u_i) exactly, and
/// (c) the update stays within the local bar-state extrema at every vertex
/// whose neighbor VALUES also lie inside those extrema. Unconditional
/// containment fails on rough data (an out-of-interval neighbor reinjects
/// antidiffusion the per-vertex gap condition cannot see); the suite counts
/// such vertices and reports them, and the acceptance suite reports the
/// unconditional claim as failing.
inline SuiteResult suite_greedy(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "greedy";
  Rng rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  long trials = 0;
  long out_of_hypothesis = 0;
  long unconditional_misses = 0;

  auto run_one = [&](auto model)
  {
    using Model = decltype(model);
    ConnectivityGraph g = random_interval_graph(rng, 24 + rng.index(72),
                                                rng.index(2) == 0 ? Discretization::finite_volume
                                                                  : Discretization::cg_p1);
    Field<Model> U = random_scalar_field<Model>(rng, g, -1.0, 1.0);
    FluxTable<Model> f = compute_flux_table(model, U);
    std::vector<double> dL = compute_dL(g, model, U);
    std::vector<double> dsum(g.n, 0.0);
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      dsum[g.edges[e].first] += dL[e];
      dsum[g.edges[e].second] += dL[e];
    }
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.n; i++)
    {
      dt = std::min(dt, g.m[i] / (2.0 * dsum[i]));  // gamma_i <= 1 exactly at the cap
    }
    dt *= rng.uniform(0.25, 1.0);
    Field<Model> bar = compute_bar_states(g, model, U, f, dL);
    std::vector<double> dH = dH_greedy(g, U, bar, dL, dt, 0);
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      worst = std::max(worst, dH[e] - dL[e]);
      worst = std::max(worst, -dH[e]);
    }
    Field<Model> FL = compute_low_order_fluxes(g, U, f, dL);
    Field<Model> UL = explicit_update(g, U, FL, dt);
    Field<Model> FH = compute_high_order_fluxes(g, U, f, dH);
    Field<Model> UH = explicit_update(g, U, FH, dt);
    GapQuantities q = compute_gap_quantities(g, U, bar, dL, dt, 0);
    for (std::size_t i = 0; i < g.n; i++)
    {
      double scale = std::max(1.0, std::max(std::abs(q.umin[i]), std::abs(q.umax[i])));
      double pert = 0.0;
      bool in_hypothesis = true;
      for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
      {
        std::size_t e = g.edge_of[s];
        if (e == no_edge)
        {
          continue;
        }
        std::size_t j = g.col[s];
        pert += (dH[e] - dL[e]) * (U[j][0] - U[i][0]);
        if (U[j][0] < q.umin[i] - 1e-12 * scale || U[j][0] > q.umax[i] + 1e-12 * scale)
        {
          in_hypothesis = false;
        }
      }
      pert *= dt / g.m[i];
      worst = std::max(worst, std::abs(UH[i][0] - (UL[i][0] + pert)) - 1e-12 * scale);
      double miss = std::max(UH[i][0] - q.umax[i], q.umin[i] - UH[i][0]) / scale;
      if (in_hypothesis)
      {
        worst = std::max(worst, miss);
      }
      else
      {
        out_of_hypothesis++;
        if (miss > 1e-10)
        {
          unconditional_misses++;
        }
      }
    }
    trials++;
  };

  for (int t = 0; t < 150; t++)
  {
    if (rng.index(2) == 0)
    {
      Advection<1> model;
      model.velocity = Vec<1>{rng.uniform(-2.0, 2.0)};
      run_one(model);
    }
    else
    {
      run_one(Burgers{});
    }
  }
  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-10;
  res.detail = detail::format_msg(
      "max in-hypothesis violation %.3e (tol 1e-10); %ld vertices outside the "
      "neighbor-data hypothesis, %ld of them out of bounds (documented limitation)",
      worst, out_of_hypothesis, unconditional_misses);
  return res;
}

/// Line-search kernels and the full limiter: the Newton-secant iterate must
/// match the true root of concave constraints to 1e-10 in at most 8 probes
/// while staying feasible, the quadratic closed form must agree with a
/// bisection oracle, and full limited Euler steps must honor every bound.
inline SuiteResult suite_limiter(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "limiter";
  Rng rng(seed);
  double worst = 0.0;
  long trials = 0;

  // concave quadratics with known root
  for (int t = 0; t < 60; t++)
  {
    double A = rng.uniform(0.0, 2.0);
    double B = rng.uniform(-2.0, 2.0);
    double C = rng.uniform(0.1, 3.0);
    double L = rng.uniform(0.2, 4.0);
    auto gfun = [&](double l) { return A - B * l - C * l * l; };
    auto gpfun = [&](double l) { return -B - 2.0 * C * l; };
    NewtonSecantResult r = newton_secant(gfun, gpfun, L, 1e-12, 20);
    double exact = L;
    if (gfun(L) < 0.0)
    {
      double disc = B * B + 4.0 * C * A;
      exact = std::max(0.0, (-B + std::sqrt(std::max(disc, 0.0))) / (2.0 * C));
    }
    worst = std::max(worst, std::abs(r.ell - exact) / std::max(1.0, L));
    worst = std::max(worst, -gfun(std::min(r.ell, L)) / std::max(1.0, A + std::abs(B) + C));
    worst = std::max(worst, static_cast<double>(r.iters > 8));
    trials++;
  }

  // transcendental concave functions against a bisection oracle
  for (int t = 0; t < 60; t++)
  {
    double a = rng.uniform(0.5, 4.0);
    double b = rng.uniform(-1.0, 1.0);
    double L = rng.uniform(0.5, 4.0);
    auto gfun = [&](double l) { return a + b * l - std::exp(l); };
    auto gpfun = [&](double l) { return b - std::exp(l); };
    if (gfun(0.0) <= 0.0)
    {
      continue;
    }
    NewtonSecantResult r = newton_secant(gfun, gpfun, L, 1e-12, 30);
    double oracle = bisection_max_ell(gfun, L, 1e-13, 200);
    worst = std::max(worst, std::abs(r.ell - oracle) / std::max(1.0, L));
    trials++;
  }

  // quadratic feasibility prefix against dense sampling
  for (int t = 0; t < 100; t++)
  {
    double a = rng.uniform(-2.0, 2.0);
    double b = rng.uniform(-2.0, 2.0);
    double c = rng.uniform(0.0, 2.0) * (rng.index(8) == 0 ? 0.0 : 1.0);
    double L = quadratic_max_ell(a, b, c);
    auto q = [&](double l) { return (a * l + b) * l + c; };
    double cap = std::min(L, 10.0);
    for (int k = 0; k <= 40; k++)
    {
      double l = cap * static_cast<double>(k) / 40.0;
      worst = std::max(worst, -q(l) / std::max(1.0, std::abs(a) + std::abs(b) + c));
    }
    if (std::isfinite(L))
    {
      double beyond = q(L + 1e-6 * std::max(1.0, L) + 1e-9);
      worst = std::max(worst, static_cast<double>(beyond > 1e-3));
    }
    trials++;
  }

  // full limited steps on rough Euler data, strict bounds
  for (int t = 0; t < 25; t++)
  {
    Euler<1> model;
    model.gamma = rng.uniform(1.2, 1.8);
    model.covolume = rng.index(3) == 0 ? 0.05 : 0.0;
    ConnectivityGraph g = random_interval_graph(rng, 40, Discretization::finite_volume);
    Field<Euler<1>> U(g.n);
    auto left = random_euler_state(model, rng);
    auto right = random_euler_state(model, rng);
    for (std::size_t i = 0; i < g.n; i++)
    {
      U[i] = g.x[i][0] < 0.5 ? left : right;
    }
    SolverOptions opts;
    opts.scheme = Scheme::limited;
    opts.relax = false;
    opts.stage_check = true;
    Solver<Euler<1>> solver(g, model, builtin_constraints(model, true), builtin_tableau("ssp33"),
                            opts);
    StepDiagnostics diag;
    Field<Euler<1>> next = solver.step(U, solver.suggest_dt(U), 0.0, &diag);
    for (double s : diag.worst_slack)
    {
      worst = std::max(worst, -s);
    }
    std::vector<double> m0 = field_masses(g, U);
    std::vector<double> m1 = field_masses(g, next);
    for (std::size_t k = 0; k < m0.size(); k++)
    {
      worst = std::max(worst, std::abs(m1[k] - m0[k]) / std::max(1.0, std::abs(m0[k])));
    }
    trials++;
  }

  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-10;
  res.detail = detail::format_msg("max kernel/step violation %.3e (tol 1e-10)", worst);
  return res;
}

/// Tableau validation, rejection of non-convex schemes, measured convergence
/// orders on a stiff-free scalar ODE, and stagewise interval invariance at
/// the c_os-amplified step size.
inline SuiteResult suite_ssp(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "ssp";
  Rng rng(seed);
  double worst = 0.0;
  long trials = 0;

  for (const char *name : {"fe", "ssp22", "ssp33", "ssp43"})
  {
    builtin_tableau(name);  // throws on structural violation
    trials++;
  }
  {
    // classical midpoint: u + dt L(u + dt/2 L(u)) pairs beta with alpha = 0
    AlphaBetaTableau mid;
    mid.name = "midpoint";
    mid.alpha = {{1.0}, {1.0, 0.0}};
    mid.beta = {{0.5}, {0.0, 1.0}};
    mid.stage_time = {0.0, 0.5};
    bool rejected = false;
    try
    {
      validate_tableau(mid);
    }
    catch (const ConfigError &)
    {
      rejected = true;
    }
    if (!rejected)
    {
      worst = std::max(worst, 1.0);
    }
    trials++;
  }

  // measured order on u' = -u + sin(2t), u(0) = 0.3, T = 1
  auto ode_error = [&](const AlphaBetaTableau &tab, int steps)
  {
    std::vector<double> u = {0.3};
    double dt = 1.0 / steps;
    for (int s = 0; s < steps; s++)
    {
      u = ssp_step(tab, u, dt, s * dt,
                   [](const std::vector<double> &w, double h, double tt)
                   { return std::vector<double>{w[0] + h * (-w[0] + std::sin(2.0 * tt))}; });
    }
    double exact = 0.7 * std::exp(-1.0) + (std::sin(2.0) - 2.0 * std::cos(2.0)) / 5.0;
    return std::abs(u[0] - exact);
  };
  struct OrderCase
  {
    const char *name;
    double min_order;
  };
  for (OrderCase oc : {OrderCase{"fe", 0.85}, OrderCase{"ssp22", 1.85}, OrderCase{"ssp33", 2.8},
                       OrderCase{"ssp43", 2.8}})
  {
    AlphaBetaTableau tab = builtin_tableau(oc.name);
    double e1 = ode_error(tab, 40);
    double e2 = ode_error(tab, 80);
    double order = std::log2(e1 / e2);
    worst = std::max(worst, oc.min_order - order);
    trials++;
  }

  // invariance: Euler substeps of u' = -u keep [0, 1] for h <= 1, so the SSP
  // combination keeps it for dt <= c_os
  for (const char *name : {"fe", "ssp22", "ssp33", "ssp43"})
  {
    AlphaBetaTableau tab = builtin_tableau(name);
    for (int t = 0; t < 50; t++)
    {
      std::vector<double> u = {rng.uniform()};
      double dt = 0.999 * tab.c_os;
      u = ssp_step(tab, u, dt, 0.0,
                   [](const std::vector<double> &w, double h, double)
                   { return std::vector<double>{w[0] * (1.0 - h)}; });
      worst = std::max(worst, u[0] - 1.0);
      worst = std::max(worst, -u[0]);
      trials++;
    }
  }

  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-12;
  res.detail = detail::format_msg("max validation/order/invariance deficit %.3e (tol 1e-12)", worst);
  return res;
}

/// End-to-end conservation through the full solver: limited steps must keep
/// the total of every conserved component to near machine precision.
inline SuiteResult suite_conservation(std::uint64_t seed)
{
  SuiteResult res;
  res.name = "conservation";
  Rng rng(seed);
  double worst = 0.0;
  long trials = 0;

  auto drift = [&](auto model, auto constraints, auto init, int comps, Scheme scheme)
  {
    using Model = decltype(model);
    ConnectivityGraph g = random_interval_graph(rng, 80, Discretization::finite_volume,
                                                Topology::periodic, 0.3);
    Field<Model> U(g.n);
    for (std::size_t i = 0; i < g.n; i++)
    {
      U[i] = init(g.x[i][0]);
    }
    SolverOptions opts;
    opts.scheme = scheme;
    Solver<Model> solver(g, model, constraints, builtin_tableau("ssp33"), opts);
    std::vector<double> m0 = field_masses(g, U);
    for (int s = 0; s < 10; s++)
    {
      U = solver.step(U, solver.suggest_dt(U), 0.0);
    }
    std::vector<double> m1 = field_masses(g, U);
    for (int k = 0; k < comps; k++)
    {
      auto kk = static_cast<std::size_t>(k);
      worst = std::max(worst, std::abs(m1[kk] - m0[kk]) / std::max(1.0, std::abs(m0[kk])));
    }
    trials++;
  };

  for (Scheme scheme : {Scheme::low_order, Scheme::high_order, Scheme::limited})
  {
    Euler<1> euler;
    drift(euler, builtin_constraints(euler),
          [&](double x)
          {
            return euler_from_primitive(euler, x < 0.5 ? 1.0 : 0.125, Vec<1>{0.0},
                                        x < 0.5 ? 1.0 : 0.1);
          },
          3, scheme);
    ShallowWater swe;
    drift(swe, builtin_constraints(swe),
          [&](double x) { return ShallowWater::State{x < 0.5 ? 1.0 : 0.2, 0.0}; }, 1, scheme);
    Burgers burgers;
    drift(burgers, builtin_constraints(burgers),
          [&](double x) { return Vec<1>{std::sin(2.0 * std::numbers::pi * x)}; }, 1, scheme);
  }

  res.trials = trials;
  res.worst = worst;
  res.pass = worst <= 1e-12;
  res.detail = detail::format_msg("max relative mass drift %.3e (tol 1e-12)", worst);
  return res;
}

// --- registry -----------------------------------------------------------------

inline const std::vector<std::string> &suite_names()
{
  static const std::vector<std::string> names = {
      "graph",  "riemann_average", "low_order", "entropy",      "wave_speed",
      "smoothness", "greedy",      "limiter",   "ssp",          "conservation"};
  return names;
}

inline SuiteResult run_suite(const std::string &name, std::uint64_t seed)
{
  if (name == "graph")
  {
    return suite_graph(seed);
  }
  if (name == "riemann_average")
  {
    return suite_riemann_average(seed);
  }
  if (name == "low_order")
  {
    return suite_low_order(seed);
  }
  if (name == "entropy")
  {
    return suite_entropy(seed);
  }
  if (name == "wave_speed")
  {
    return suite_wave_speed(seed);
  }
  if (name == "smoothness")
  {
    return suite_smoothness(seed);
  }
  if (name == "greedy")
  {
    return suite_greedy(seed);
  }
  if (name == "limiter")
  {
    return suite_limiter(seed);
  }
  if (name == "ssp")
  {
    return suite_ssp(seed);
  }
  if (name == "conservation")
  {
    return suite_conservation(seed);
  }
  throw ConfigError(detail::format_msg("unknown suite '%s'", name.c_str()));
}

inline std::vector<SuiteResult> run_all_suites(std::uint64_t seed)
{
  std::vector<SuiteResult> out;
  for (const std::string &name : suite_names())
  {
    out.push_back(run_suite(name, seed));
  }
  return out;
}

}  // namespace hyperlim::checks
