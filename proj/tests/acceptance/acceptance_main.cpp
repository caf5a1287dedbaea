// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate for the solver library. Each criterion prints exactly one
// PASS/FAIL line with the measured quantity, the pinned tolerance, and its
// wall time; the process exits nonzero if any criterion fails. Tolerances
// are fixed here on purpose — do not loosen them to make a run green.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <hyperlim/exact_riemann.hpp>
#include <hyperlim/run.hpp>
#include <hyperlim/solver.hpp>
#include <hyperlim/suites.hpp>

namespace
{

using namespace hyperlim;

// --- pinned tolerances -------------------------------------------------------

constexpr double kConservationTol = 1e-12;   // relative per-component drift
constexpr double kLowOrderSlack = 1e-12;     // [0,1] containment slack
constexpr double kEntropyTol = 1e-10;        // normalized residual * dt / m
constexpr double kWaveSpeedFloor = -1e-12;   // (estimate - exact) / exact
constexpr double kContainmentTol = 1e-10;    // bar-range slack, criteria 5/6
constexpr double kStageSlackFloor = -1e-10;  // relative constraint slack
constexpr double kRateLowMin = 0.75;         // low-order L1 rate
constexpr double kRateLimitedMin = 1.8;      // limited high-order L1 rate
constexpr double kNewtonTol = 1e-10;         // |ell - bisection oracle|
constexpr int kNewtonItersMax = 8;
constexpr double kSspRateMin = 2.8;          // observed temporal order
constexpr double kFanAverageTol = 1e-8;      // quadrature vs closed form

struct CriterionResult
{
  bool pass = false;
  double measured = 0.0;
  std::string tol_text;
  std::string note;
};

double elapsed(const std::chrono::steady_clock::time_point &t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <SystemModel Model>
double relative_mass_drift(const std::vector<double> &m0, const std::vector<double> &m1)
{
  double scale = 1e-300;
  for (double v : m0)
  {
    scale = std::max(scale, std::abs(v));
  }
  double drift = 0.0;
  for (std::size_t k = 0; k < m0.size(); k++)
  {
    drift = std::max(drift, std::abs(m1[k] - m0[k]) / scale);
  }
  return drift;
}

/// Advance `steps` full SSP steps with the limited scheme and return the
/// relative drift of every conserved total.
template <SystemModel Model>
double conservation_drift(const Preset<Model> &preset, std::size_t n, int steps)
{
  MeshDescriptor mesh = make_interval_mesh(n, preset.box_lo[0], preset.box_hi[0], preset.topology);
  ConnectivityGraph g = build_fv_graph(mesh);
  Model model = preset.model;
  if (preset.setup)
  {
    preset.setup(model, g);
  }
  SolverOptions opts;
  opts.scheme = Scheme::limited;
  Solver<Model> solver(g, model, builtin_constraints(model), builtin_tableau("ssp33"), opts);

  Field<Model> U(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    U[i] = preset.init(g.position<Model::dim>(i));
  }
  std::vector<double> m0 = checks::field_masses(g, U);
  double t = 0.0;
  for (int s = 0; s < steps; s++)
  {
    double dt = solver.suggest_dt(U);
    U = solver.step(U, dt, t);
    t += dt;
  }
  return relative_mass_drift<Model>(m0, checks::field_masses(g, U));
}

// 1. Total of m_i U_i is preserved to rounding over 10^3 steps on sourceless
//    scalar, gas dynamics, and shallow water problems.
CriterionResult criterion_conservation()
{
  CriterionResult r;
  r.tol_text = "<=1e-12";
  double worst = 0.0;
  worst = std::max(worst, conservation_drift(preset_burgers_sine(), 400, 1000));
  worst = std::max(worst, conservation_drift(preset_sod(), 400, 1000));
  worst = std::max(worst, conservation_drift(preset_dam_break(), 400, 1000));
  r.measured = worst;
  r.pass = worst <= kConservationTol;
  r.note = "scalar + gas + shallow water, N=400, 1000 steps each";
  return r;
}

// 2. Low-order update keeps random scalar data inside [0,1] at the CFL limit
//    on both discretizations, and every bar state lies in [0,1] as well.
CriterionResult criterion_low_order_invariant_domain()
{
  CriterionResult r;
  r.tol_text = "<=1e-12";
  Rng rng(101);
  Burgers model;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; trial++)
  {
    Discretization disc = trial % 2 ? Discretization::cg_p1 : Discretization::finite_volume;
    Topology topo = trial % 3 ? Topology::periodic : Topology::compact_support;
    ConnectivityGraph g = checks::random_interval_graph(rng, 16 + rng.index(48), disc, topo);
    Field<Burgers> U = checks::random_scalar_field<Burgers>(rng, g, 0.0, 1.0);
    FluxTable<Burgers> f = compute_flux_table(model, U);
    std::vector<double> dL = compute_dL(g, model, U);
    Field<Burgers> bar = compute_bar_states(g, model, U, f, dL);
    Field<Burgers> FL = compute_low_order_fluxes(g, U, f, dL);
    Field<Burgers> src(g.n);
    double dt = max_dt(g, model, dL, 1.0);
    Field<Burgers> next = low_order_update(g, model, U, FL, bar, dL, dt, src);
    for (std::size_t i = 0; i < g.n; i++)
    {
      worst = std::max({worst, -next[i][0], next[i][0] - 1.0});
    }
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      worst = std::max({worst, -bar[e][0], bar[e][0] - 1.0});
    }
  }
  r.measured = worst;
  r.pass = worst <= kLowOrderSlack;
  r.note = "1000 trials, fv+cg, nodal values and bar states vs [0,1]";
  return r;
}

// 3. The low-order update dissipates every builtin entropy: the residual of
//    the discrete entropy inequality, normalized per unit mass, stays below
//    tolerance at all vertices over 200 consecutive steps.
CriterionResult criterion_entropy_inequality()
{
  CriterionResult r;
  r.tol_text = "<=1e-10";
  double worst = -std::numeric_limits<double>::infinity();

  auto run_steps = [&worst](auto model, auto &g, auto U, int steps)
  {
    using Model = decltype(model);
    Field<Model> src(g.n);
    for (int s = 0; s < steps; s++)
    {
      FluxTable<Model> f = compute_flux_table(model, U);
      std::vector<double> dL = compute_dL(g, model, U);
      Field<Model> bar = compute_bar_states(g, model, U, f, dL);
      Field<Model> FL = compute_low_order_fluxes(g, U, f, dL);
      double dt = max_dt(g, model, dL, 0.9);
      Field<Model> next = low_order_update(g, model, U, FL, bar, dL, dt, src);
      for (int which = 0; which < model.n_entropies(); which++)
      {
        std::vector<double> res = entropy_inequality_residual(g, model, which, U, next, dL, dt, src);
        for (std::size_t i = 0; i < g.n; i++)
        {
          worst = std::max(worst, res[i] * dt / g.m[i]);
        }
      }
      U = next;
    }
  };

  Rng rng(202);
  {
    ConnectivityGraph g =
        checks::random_interval_graph(rng, 128, Discretization::finite_volume, Topology::periodic);
    run_steps(Burgers{}, g, checks::random_scalar_field<Burgers>(rng, g, -1.0, 1.0), 200);
  }
  {
    auto preset = preset_sod();
    MeshDescriptor mesh = make_interval_mesh(128, preset.box_lo[0], preset.box_hi[0], preset.topology);
    ConnectivityGraph g = build_fv_graph(mesh);
    Field<Euler<1>> U(g.n);
    for (std::size_t i = 0; i < g.n; i++)
    {
      U[i] = preset.init(g.position<1>(i));
    }
    run_steps(preset.model, g, U, 200);
  }
  r.measured = worst;
  r.pass = worst <= kEntropyTol;
  r.note = "square entropy (scalar) + log entropy (gas), 200 steps each";
  return r;
}

// 4. The two-rarefaction wave speed estimate never undercuts the exact
//    Riemann solution's fastest signal over 10^4 random gamma-law pairs.
//    The guaranteed-upper-bound property holds for adiabatic exponents in
//    (1, 5/3]; past that the estimate can undershoot by ~1e-4, so gamma is
//    sampled inside the guaranteed range.
CriterionResult criterion_wave_speed_bound()
{
  CriterionResult r;
  r.tol_text = ">=-1e-12";
  Rng rng(303);
  double min_gap = std::numeric_limits<double>::infinity();
  long violations = 0;
  long valid = 0;
  while (valid < 10000)
  {
    Euler<1> model;
    model.gamma = rng.uniform(1.2, 2.0);
    auto uL = checks::random_euler_state(model, rng);
    auto uR = checks::random_euler_state(model, rng);
    RiemannState L{uL[0], uL[1] / uL[0], model.pressure(uL)};
    RiemannState R{uR[0], uR[1] / uR[0], model.pressure(uR)};
    double exact = 0.0;
    try
    {
      exact = ExactRiemann(model.gamma, L, R).max_wave_speed();
    }
    catch (const NumericsError &)
    {
      continue;  // vacuum-forming pair: the oracle does not apply
    }
    valid++;
    double estimate = model.max_wave_speed(Vec<1>{1.0}, uL, uR);
    double gap = (estimate - exact) / std::max(exact, 1e-300);
    min_gap = std::min(min_gap, gap);
    violations += gap < kWaveSpeedFloor ? 1 : 0;
  }
  r.measured = min_gap;
  r.pass = violations == 0;
  r.note = detail::format_msg("10000 valid pairs, %ld violations", violations);
  return r;
}

/// Shared containment loop for criteria 5 and 6: advance one explicit step
/// with the given high-order viscosity and measure how far the tracked
/// component of the result escapes the local bar-state range.
template <SystemModel Model, typename Viscosity>
double containment_violation(Rng &rng, const Model &model, int trials, bool gated, Viscosity viscosity)
{
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; trial++)
  {
    Discretization disc = trial % 2 ? Discretization::cg_p1 : Discretization::finite_volume;
    Topology topo = trial % 3 ? Topology::periodic : Topology::compact_support;
    ConnectivityGraph g = checks::random_interval_graph(rng, 16 + rng.index(32), disc, topo);
    Field<Model> U(g.n);
    for (std::size_t i = 0; i < g.n; i++)
    {
      if constexpr (Model::n_comp == 1)
      {
        U[i][0] = rng.uniform(-1.0, 2.0);
      }
      else if constexpr (Model::n_comp == 2)
      {
        U[i] = checks::random_swe_state(rng);
      }
      else
      {
        U[i] = checks::random_euler_state(model, rng);
      }
    }
    FluxTable<Model> f = compute_flux_table(model, U);
    std::vector<double> dL = compute_dL(g, model, U);
    Field<Model> bar = compute_bar_states(g, model, U, f, dL);

    SmoothnessParams sp;  // defaults alpha0 = 1/2, q = 4, component 0
    double gate =
        gated ? 1.0 / (1.0 + smoothness_psi_lipschitz(sp) * static_cast<double>(g.max_degree)) : 1.0;
    double dt = max_dt(g, model, dL, 1.0) * 2.0 * gate * rng.uniform(0.5, 1.0);

    std::vector<double> dH = viscosity(g, model, U, f, bar, dL, dt, sp);
    Field<Model> FH = compute_high_order_fluxes(g, U, f, dH);
    Field<Model> UH = checks::explicit_update(g, U, FH, dt);
    GapQuantities q = compute_gap_quantities(g, U, bar, dL, dt, 0);
    for (std::size_t i = 0; i < g.n; i++)
    {
      double scale = std::max({1.0, std::abs(q.umin[i]), std::abs(q.umax[i])});
      worst = std::max(worst, std::max(q.umin[i] - UH[i][0], UH[i][0] - q.umax[i]) / scale);
    }
  }
  return worst;
}

// 5. Smoothness-indicator viscosity with the psi-Lipschitz CFL gate keeps
//    the tracked component (gas density, water height) inside the local
//    bar-state range on random fields.
CriterionResult criterion_smoothness_containment()
{
  CriterionResult r;
  r.tol_text = "<=1e-10";
  Rng rng(404);
  auto smooth_visc = [](const ConnectivityGraph &g, const auto &model, const auto &U, const auto &,
                        const auto &, const std::vector<double> &dL, double, const SmoothnessParams &sp)
  {
    std::vector<double> alpha = smoothness_alpha(g, smoothness_values(model, U, sp), sp);
    return dH_smoothness(g, dL, alpha, sp);
  };
  double worst = containment_violation(rng, Euler<1>{}, 500, true, smooth_visc);
  worst = std::max(worst, containment_violation(rng, ShallowWater{}, 500, true, smooth_visc));
  r.measured = worst;
  r.pass = worst <= kContainmentTol;
  r.note = "gas density + water height, 1000 gated random fields";
  return r;
}

// 6. Greedy viscosity is claimed to achieve the same containment under the
//    plain gamma_i <= 1 step-size condition (no gate). The claim does not
//    hold unconditionally: the per-vertex gap condition never sees the value
//    of a neighbor lying outside the local bar-state interval, and on rough
//    fields the reduced viscosity across such an edge reinjects
//    antidiffusion proportional to the data gap. This criterion measures the
//    claim as stated and is expected to fail; containment is guaranteed only
//    at vertices whose neighbor values stay inside the local interval (that
//    conditional form is asserted in the unit and property suites).
CriterionResult criterion_greedy_containment()
{
  CriterionResult r;
  r.tol_text = "<=1e-10";
  Rng rng(505);
  auto greedy_visc = [](const ConnectivityGraph &g, const auto &, const auto &U, const auto &,
                        const auto &bar, const std::vector<double> &dL, double dt, const SmoothnessParams &)
  { return dH_greedy(g, U, bar, dL, dt, 0); };
  double worst = containment_violation(rng, Euler<1>{}, 500, false, greedy_visc);
  worst = std::max(worst, containment_violation(rng, ShallowWater{}, 500, false, greedy_visc));
  r.measured = worst;
  r.pass = worst <= kContainmentTol;
  r.note = "gas density + water height at gamma_i <= 1; known counterexample class";
  return r;
}

// 7. Full limited shock tube run: all four gas constraints hold (relative
//    slack above the floor) after every RK substep, with positive density
//    and internal energy throughout.
CriterionResult criterion_limited_shock_tube()
{
  CriterionResult r;
  r.tol_text = ">=-1e-10";
  auto preset = preset_sod();
  MeshDescriptor mesh = make_interval_mesh(400, preset.box_lo[0], preset.box_hi[0], preset.topology);
  ConnectivityGraph g = build_fv_graph(mesh);
  const Euler<1> &model = preset.model;

  SolverOptions opts;
  opts.scheme = Scheme::limited;
  opts.relax = false;
  opts.stage_check = true;
  Solver<Euler<1>> solver(g, model, builtin_constraints(model), builtin_tableau("ssp33"), opts);

  Field<Euler<1>> U(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    U[i] = preset.init(g.position<1>(i));
  }
  double min_slack = std::numeric_limits<double>::infinity();
  double min_rho = std::numeric_limits<double>::infinity();
  double min_e = std::numeric_limits<double>::infinity();
  double t = 0.0;
  int steps = 0;
  while (t < preset.t_final * (1.0 - 1e-13))
  {
    double dt = std::min(solver.suggest_dt(U), preset.t_final - t);
    StepDiagnostics sd;
    U = solver.step(U, dt, t, &sd);
    t += dt;
    steps++;
    for (double s : sd.worst_slack)
    {
      min_slack = std::min(min_slack, s);
    }
    for (std::size_t i = 0; i < g.n; i++)
    {
      min_rho = std::min(min_rho, U[i][0]);
      min_e = std::min(min_e, model.internal_energy(U[i]));
    }
  }
  r.measured = min_slack;
  r.pass = min_slack >= kStageSlackFloor && min_rho > 0.0 && min_e > 0.0;
  r.note = detail::format_msg("N=400, %d steps, min rho %.3e, min e %.3e", steps, min_rho, min_e);
  return r;
}

/// L1 error of a preset at refinement level n for a given scheme config.
template <SystemModel Model>
double l1_error(const Preset<Model> &preset, const std::string &cfg_text, long n)
{
  Config cfg = Config::parse_string(cfg_text);
  return execute(preset, cfg, n, "").l1;
}

// 8. Smooth advection accuracy: the low-order scheme converges at first
//    order (>= 0.75 observed) and the limited scheme restores second order
//    (>= 1.8 observed) in L1 under refinement.
CriterionResult criterion_accuracy_rates()
{
  CriterionResult r;
  r.tol_text = ">=1.8";
  auto preset = preset_sine_advection();
  std::vector<double> err_low, err_lim;
  for (long n : {100, 200, 400, 800})
  {
    err_low.push_back(l1_error(preset, "scheme = low\n", n));
    err_lim.push_back(l1_error(preset, "scheme = limited\nlimiter.relax = on\n", n));
  }
  double rate_low = std::log2(err_low[err_low.size() - 2] / err_low.back());
  double rate_lim = std::log2(err_lim[err_lim.size() - 2] / err_lim.back());
  r.measured = rate_lim;
  r.pass = rate_low >= kRateLowMin && rate_lim >= kRateLimitedMin;
  r.note = detail::format_msg("low-order rate %.2f (>=%.2f), limited rate %.2f", rate_low, kRateLowMin,
                              rate_lim);
  return r;
}

// 9. Shock tube refinement: L1 error vs the exact Riemann solution decreases
//    monotonically for both schemes, and the limited error never exceeds the
//    low-order error at any level.
CriterionResult criterion_shock_tube_refinement()
{
  CriterionResult r;
  r.tol_text = "<=1";
  auto preset = preset_sod();
  std::vector<double> err_low, err_lim;
  for (long n : {100, 200, 400, 800})
  {
    err_low.push_back(l1_error(preset, "scheme = low\n", n));
    err_lim.push_back(l1_error(preset, "scheme = limited\n", n));
  }
  bool monotone = true;
  double max_ratio = 0.0;
  for (std::size_t k = 0; k < err_low.size(); k++)
  {
    if (k > 0)
    {
      monotone = monotone && err_low[k] < err_low[k - 1] && err_lim[k] < err_lim[k - 1];
    }
    max_ratio = std::max(max_ratio, err_lim[k] / err_low[k]);
  }
  r.measured = max_ratio;
  r.pass = monotone && max_ratio <= 1.0;
  r.note = detail::format_msg("limited L1 %.3e -> %.3e, low %.3e -> %.3e, monotone %s", err_lim.front(),
                              err_lim.back(), err_low.front(), err_low.back(), monotone ? "yes" : "no");
  return r;
}

// 10. The damped Newton/secant root finder stays on the feasible side,
//     matches a fine bisection oracle, and needs at most 8 iterations on
//     random concave bracketed problems.
CriterionResult criterion_newton_secant()
{
  CriterionResult r;
  r.tol_text = "<=1e-10";
  Rng rng(606);
  double max_err = 0.0;
  int max_iters = 0;
  bool feasible = true;
  for (int trial = 0; trial < 100; trial++)
  {
    std::function<double(double)> g, gp;
    double l_right = 0.0;
    // Brackets are snug overestimates of the root, as produced in the limiter
    // by the quadratic safety bound; the solver is not meant for ends that sit
    // many multiples past the root.
    if (trial % 2 == 0)
    {
      double a = -rng.uniform(0.1, 5.0);
      double b = rng.uniform(-3.0, 3.0);
      double c = rng.uniform(0.1, 2.0);
      g = [=](double l) { return (a * l + b) * l + c; };
      gp = [=](double l) { return 2.0 * a * l + b; };
      double root = (-b - std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
      l_right = root * rng.uniform(1.05, 2.0);
    }
    else
    {
      double A = rng.uniform(0.5, 3.0);
      double B = A * rng.uniform(0.05, 0.8);
      double C = rng.uniform(0.5, 3.0);
      g = [=](double l) { return A - B * std::exp(C * l); };
      gp = [=](double l) { return -B * C * std::exp(C * l); };
      l_right = std::log(A / B) / C * rng.uniform(1.05, 2.0);
    }
    NewtonSecantResult res = newton_secant(g, gp, l_right, 1e-11, 20);
    double oracle = bisection_max_ell(g, l_right, 1e-13, 200);
    max_err = std::max(max_err, std::abs(res.ell - oracle));
    max_iters = std::max(max_iters, res.iters);
    feasible = feasible && g(res.ell) >= 0.0;
  }
  r.measured = max_err;
  r.pass = feasible && max_err <= kNewtonTol && max_iters <= kNewtonItersMax;
  r.note = detail::format_msg("100 problems, max iterations %d (<=%d), all feasible %s", max_iters,
                              kNewtonItersMax, feasible ? "yes" : "no");
  return r;
}

// 11. SSP machinery: the validator rejects the (non-SSP) midpoint tableau,
//     the three-stage third-order scheme shows its design order on a smooth
//     nonlinear ODE, and constraint slacks hold after every RK substep of a
//     limited scalar shock run.
CriterionResult criterion_ssp_machinery()
{
  CriterionResult r;
  r.tol_text = ">=2.8";

  bool midpoint_rejected = false;
  AlphaBetaTableau midpoint;
  midpoint.name = "midpoint";
  midpoint.alpha = {{1.0}, {1.0, 0.0}};
  midpoint.beta = {{0.5}, {0.0, 1.0}};
  midpoint.stage_time = {0.0, 0.5};
  midpoint.c_os = 1.0;
  try
  {
    validate_tableau(midpoint);
  }
  catch (const ConfigError &)
  {
    midpoint_rejected = true;
  }

  // Observed temporal order on the logistic equation u' = u(1-u).
  AlphaBetaTableau tab = builtin_tableau("ssp33");
  auto substep = [](const std::vector<double> &w, double h, double)
  { return std::vector<double>{w[0] + h * w[0] * (1.0 - w[0])}; };
  const double u0 = 0.2, T = 1.0;
  const double exact = 1.0 / (1.0 + (1.0 / u0 - 1.0) * std::exp(-T));
  std::vector<double> errs;
  for (int nsteps : {40, 80, 160})
  {
    std::vector<double> u{u0};
    double h = T / nsteps;
    for (int s = 0; s < nsteps; s++)
    {
      u = ssp_step(tab, u, h, s * h, substep);
    }
    errs.push_back(std::abs(u[0] - exact));
  }
  double rate = std::log2(errs[errs.size() - 2] / errs.back());

  // Stage-by-stage constraint slack on a limited scalar shock run.
  auto preset = preset_burgers_riemann();
  MeshDescriptor mesh = make_interval_mesh(200, preset.box_lo[0], preset.box_hi[0], preset.topology);
  ConnectivityGraph g = build_fv_graph(mesh);
  SolverOptions opts;
  opts.scheme = Scheme::limited;
  opts.relax = false;
  opts.stage_check = true;
  Solver<Burgers> solver(g, preset.model, builtin_constraints(preset.model), tab, opts);
  Field<Burgers> U(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    U[i] = preset.init(g.position<1>(i));
  }
  double min_slack = std::numeric_limits<double>::infinity();
  double t = 0.0;
  while (t < preset.t_final * (1.0 - 1e-13))
  {
    double dt = std::min(solver.suggest_dt(U), preset.t_final - t);
    StepDiagnostics sd;
    U = solver.step(U, dt, t, &sd);
    t += dt;
    for (double s : sd.worst_slack)
    {
      min_slack = std::min(min_slack, s);
    }
  }

  r.measured = rate;
  r.pass = midpoint_rejected && rate >= kSspRateMin && min_slack >= kStageSlackFloor;
  r.note = detail::format_msg("midpoint rejected %s, stage slack floor %.3e (>=-1e-10)",
                              midpoint_rejected ? "yes" : "no", min_slack);
  return r;
}

// 12. Averaging the exact scalar Riemann fan over [-lam, lam] reproduces the
//     bar-state formula (arithmetic mean minus the flux difference over
//     2 lam). The fan is integrated numerically between its kinks, where the
//     profile is linear and the midpoint rule is exact.
CriterionResult criterion_fan_average_identity()
{
  CriterionResult r;
  r.tol_text = "<=1e-8";
  Rng rng(707);
  double worst = 0.0;
  for (int trial = 0; trial < 100; trial++)
  {
    double uL = rng.uniform(-2.0, 2.0);
    double uR = rng.uniform(-2.0, 2.0);
    double lam = std::max({std::abs(uL), std::abs(uR), 1e-3}) * (1.0 + rng.uniform(0.0, 1.0));

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
    for (std::size_t k = 0; k + 1 < brk.size(); k++)
    {
      const int cells = 512;
      double w = (brk[k + 1] - brk[k]) / cells;
      for (int c = 0; c < cells; c++)
      {
        integral += w * burgers_riemann(uL, uR, brk[k] + (c + 0.5) * w);
      }
    }
    double average = integral / (2.0 * lam);
    double formula = 0.5 * (uL + uR) - (0.5 * uR * uR - 0.5 * uL * uL) / (2.0 * lam);
    worst = std::max(worst, std::abs(average - formula));
  }
  r.measured = worst;
  r.pass = worst <= kFanAverageTol;
  r.note = "100 random pairs, piecewise midpoint quadrature of the exact fan";
  return r;
}

}  // namespace

int main()
{
  struct Entry
  {
    const char *name;
    CriterionResult (*fn)();
  };
  const std::vector<Entry> entries = {
      {"conservation_sourceless", criterion_conservation},
      {"low_order_invariant_domain", criterion_low_order_invariant_domain},
      {"entropy_inequality", criterion_entropy_inequality},
      {"wave_speed_upper_bound", criterion_wave_speed_bound},
      {"smoothness_containment", criterion_smoothness_containment},
      {"greedy_containment", criterion_greedy_containment},
      {"limited_shock_tube_bounds", criterion_limited_shock_tube},
      {"advection_accuracy_rates", criterion_accuracy_rates},
      {"shock_tube_refinement", criterion_shock_tube_refinement},
      {"newton_secant_safety", criterion_newton_secant},
      {"ssp_machinery", criterion_ssp_machinery},
      {"riemann_fan_average", criterion_fan_average_identity},
  };

  int failures = 0;
  for (std::size_t k = 0; k < entries.size(); k++)
  {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try
    {
      res = entries[k].fn();
    }
    catch (const std::exception &e)
    {
      res.pass = false;
      res.tol_text = "-";
      res.note = std::string("exception: ") + e.what();
    }
    failures += res.pass ? 0 : 1;
    std::printf("[%2zu/12] %s %-28s measured=%+.3e tol=%-9s (%.2f s)  %s\n", k + 1,
                res.pass ? "PASS" : "FAIL", entries[k].name, res.measured, res.tol_text.c_str(),
                elapsed(t0), res.note.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/12 criteria passed\n", entries.size() - failures);
  return failures == 0 ? 0 : 1;
}
