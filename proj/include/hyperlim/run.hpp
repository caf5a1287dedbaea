// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>
#include "config.hpp"
#include "constraints.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "output.hpp"
#include "presets.hpp"
#include "rng.hpp"
#include "solver.hpp"
#include "systems/euler.hpp"
#include "time_integration.hpp"

namespace hyperlim
{

namespace detail
{

inline Discretization parse_disc(const std::string &s)
{
  if (s == "fv")
  {
    return Discretization::finite_volume;
  }
  if (s == "cg" || s == "cg_p1")
  {
    return Discretization::cg_p1;
  }
  throw ConfigError(detail::format_msg("unknown discretization '%s' (use fv|cg)", s.c_str()));
}

inline Scheme parse_scheme(const std::string &s)
{
  if (s == "low")
  {
    return Scheme::low_order;
  }
  if (s == "high")
  {
    return Scheme::high_order;
  }
  if (s == "limited")
  {
    return Scheme::limited;
  }
  throw ConfigError(detail::format_msg("unknown scheme '%s' (use low|high|limited)", s.c_str()));
}

inline ViscosityMethod parse_viscosity(const std::string &s)
{
  if (s == "smoothness")
  {
    return ViscosityMethod::smoothness;
  }
  if (s == "greedy")
  {
    return ViscosityMethod::greedy;
  }
  if (s == "commutator")
  {
    return ViscosityMethod::commutator;
  }
  throw ConfigError(detail::format_msg("unknown viscosity method '%s' (use smoothness|greedy|commutator)",
                                       s.c_str()));
}

inline MassMode parse_mass(const std::string &s)
{
  if (s == "lumped")
  {
    return MassMode::lumped;
  }
  if (s == "consistent")
  {
    return MassMode::consistent;
  }
  if (s == "approx")
  {
    return MassMode::approx_inverse;
  }
  throw ConfigError(detail::format_msg("unknown mass mode '%s' (use lumped|consistent|approx)",
                                       s.c_str()));
}

inline std::vector<std::string> split_list(const std::string &s)
{
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s)
  {
    if (ch == ',' || ch == ' ')
    {
      if (!cur.empty())
      {
        out.push_back(cur);
        cur.clear();
      }
    }
    else
    {
      cur += ch;
    }
  }
  if (!cur.empty())
  {
    out.push_back(cur);
  }
  return out;
}

}  // namespace detail

/// Mesh + graph (+ consistent mass when requested) assembled from the config.
template <SystemModel Model>
struct Assembled
{
  MeshDescriptor mesh;
  ConnectivityGraph graph;
  std::unique_ptr<ConsistentMass> mass;
  MassMode mass_mode = MassMode::lumped;
  Discretization disc = Discretization::finite_volume;
};

template <SystemModel Model>
Assembled<Model> assemble(const Preset<Model> &preset, const Config &cfg, long n_override = 0)
{
  Assembled<Model> out;
  out.disc = detail::parse_disc(cfg.get_string("disc", "fv"));
  long n = n_override > 0 ? n_override : cfg.get_int("mesh.n", preset.default_n);
  double jitter = cfg.get_double("mesh.jitter", 0.0);
  Rng rng(static_cast<std::uint64_t>(cfg.get_int("mesh.seed", 1)));
  Rng *rng_ptr = jitter > 0.0 ? &rng : nullptr;

  if constexpr (Model::dim == 1)
  {
    out.mesh = make_interval_mesh(static_cast<std::size_t>(n), preset.box_lo[0], preset.box_hi[0],
                                  preset.topology, jitter, rng_ptr);
  }
  else
  {
    long ny = cfg.get_int("mesh.ny", n);
    std::array<double, 2> lo{preset.box_lo[0], preset.box_lo[1]};
    std::array<double, 2> hi{preset.box_hi[0], preset.box_hi[1]};
    if (out.disc == Discretization::finite_volume)
    {
      out.mesh = make_quad_mesh(static_cast<std::size_t>(n), static_cast<std::size_t>(ny), lo, hi,
                                preset.topology, jitter, rng_ptr);
    }
    else
    {
      out.mesh = make_triangle_mesh(static_cast<std::size_t>(n), static_cast<std::size_t>(ny), lo, hi,
                                    preset.topology, jitter, rng_ptr);
    }
  }

  out.graph = out.disc == Discretization::finite_volume ? build_fv_graph(out.mesh)
                                                        : build_cg_p1_graph(out.mesh);
  std::string beta = cfg.get_string("beta", "ones");
  if (beta == "stiffness")
  {
    build_beta_weights(out.mesh, out.graph, BetaWeights::stiffness);
  }
  else if (beta != "ones")
  {
    throw ConfigError(detail::format_msg("unknown beta weights '%s' (use ones|stiffness)", beta.c_str()));
  }

  out.mass_mode = detail::parse_mass(cfg.get_string("mass", "lumped"));
  if (out.mass_mode != MassMode::lumped)
  {
    if (out.disc != Discretization::cg_p1)
    {
      throw ConfigError("consistent mass requires the cg discretization");
    }
    out.mass = std::make_unique<ConsistentMass>(build_cg_consistent_mass(out.mesh, out.graph));
  }
  return out;
}

template <SystemModel Model>
std::vector<ConstraintFunctional<Model>> make_constraints(const Model &model, const Config &cfg)
{
  (void)cfg;
  return builtin_constraints(model);
}

template <int D>
std::vector<ConstraintFunctional<Euler<D>>> make_constraints(const Euler<D> &model, const Config &cfg)
{
  return builtin_constraints(model, cfg.get_bool("limiter.kinetic_max", false));
}

/// Builtin constraint list, optionally filtered by `limiter.constraints`
/// (comma separated names); the builtin nested order is always preserved.
template <SystemModel Model>
std::vector<ConstraintFunctional<Model>> constraints_from_config(const Model &model, const Config &cfg)
{
  std::vector<ConstraintFunctional<Model>> all = make_constraints(model, cfg);
  if (!cfg.has("limiter.constraints"))
  {
    return all;
  }
  std::vector<std::string> want = detail::split_list(cfg.get_string("limiter.constraints", ""));
  for (const auto &w : want)
  {
    bool known = false;
    for (const auto &c : all)
    {
      known = known || c.name == w;
    }
    if (!known)
    {
      throw ConfigError(detail::format_msg("unknown constraint '%s' in limiter.constraints", w.c_str()));
    }
  }
  std::vector<ConstraintFunctional<Model>> out;
  for (auto &c : all)
  {
    for (const auto &w : want)
    {
      if (c.name == w)
      {
        out.push_back(c);
        break;
      }
    }
  }
  if (out.empty())
  {
    throw ConfigError("limiter.constraints selected no constraints");
  }
  return out;
}

inline SolverOptions solver_options_from_config(const Config &cfg, bool relax_default)
{
  SolverOptions o;
  o.scheme = detail::parse_scheme(cfg.get_string("scheme", "limited"));
  o.viscosity = detail::parse_viscosity(cfg.get_string("high_order.method", "smoothness"));
  o.smoothness.alpha0 = cfg.get_double("high_order.alpha0", 0.5);
  o.smoothness.q = cfg.get_double("high_order.q", 4.0);
  o.smoothness.eps = cfg.get_double("high_order.eps", 1e-8);
  o.smoothness.component = static_cast<int>(cfg.get_int("high_order.indicator", 0));
  o.smoothness.entropy = cfg.get_bool("high_order.use_entropy", false) ? 0 : -1;
  o.commutator.entropy = static_cast<int>(cfg.get_int("high_order.entropy", 0));
  o.commutator.eps = cfg.get_double("high_order.eps", 1e-8);
  o.commutator.mesh_eps = cfg.get_bool("high_order.mesh_eps", false);
  o.relax = cfg.get_bool("limiter.relax", relax_default);
  o.relaxation.exponent = cfg.get_double("limiter.delta", 1.5);
  o.limiter.tol = cfg.get_double("limiter.tol", 1e-10);
  o.limiter.newton_kmax = static_cast<int>(cfg.get_int("limiter.kmax", 20));
  o.cfl = cfg.get_double("time.cfl", 0.9);
  o.cfl_gate = cfg.get_bool("time.cfl_gate", false);
  o.debug_checks = cfg.get_bool("debug.checks", false);
  o.stage_check = cfg.get_bool("debug.stage_check", false);
  o.track_entropy = cfg.get_bool("output.entropy", true);
  o.limiter.debug_checks = o.debug_checks;
  return o;
}

template <SystemModel Model>
struct ExecResult
{
  std::size_t n_vertices = 0;
  int steps = 0;
  double wall_seconds = 0.0;
  double l1 = std::numeric_limits<double>::quiet_NaN();
  double linf = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> mass_initial, mass_final;
  std::vector<double> comp_min, comp_max;
  double min_ell = 1.0;
  Field<Model> U;
};

namespace detail
{

template <SystemModel Model>
std::vector<double> total_mass(const ConnectivityGraph &g, const Field<Model> &U)
{
  std::vector<double> mass(Model::n_comp, 0.0);
  for (std::size_t i = 0; i < g.n; i++)
  {
    for (int k = 0; k < Model::n_comp; k++)
    {
      mass[static_cast<std::size_t>(k)] += g.m[i] * U[i][k];
    }
  }
  return mass;
}

template <SystemModel Model>
bool in_window(const Preset<Model> &p, const std::array<double, 2> &x)
{
  for (int ax = 0; ax < Model::dim; ax++)
  {
    auto a = static_cast<std::size_t>(ax);
    if (x[a] < p.window_lo[ax] || x[a] > p.window_hi[ax])
    {
      return false;
    }
  }
  return true;
}

/// Extra per-model health columns beyond raw components.
template <SystemModel Model>
double internal_health(const Model &, const typename Model::State &)
{
  return 0.0;
}

template <int D>
double internal_health(const Euler<D> &model, const typename Euler<D>::State &u)
{
  return model.internal_energy(u);
}

template <SystemModel Model>
constexpr bool has_internal_health()
{
  return false;
}

template <>
constexpr bool has_internal_health<Euler<1>>()
{
  return true;
}

template <>
constexpr bool has_internal_health<Euler<2>>()
{
  return true;
}

}  // namespace detail

/// Core time loop: builds everything from the preset + config, advances to
/// t_final, and (when out_dir is nonempty) writes snapshots, diagnostics,
/// and the run summary.
template <SystemModel Model>
ExecResult<Model> execute(Preset<Model> preset, const Config &cfg, long n_override = 0,
                          const std::string &out_dir = "")
{
  auto t_start = std::chrono::steady_clock::now();
  Assembled<Model> asmb = assemble(preset, cfg, n_override);
  ConnectivityGraph &g = asmb.graph;
  if (preset.setup)
  {
    preset.setup(preset.model, g);
  }

  std::vector<ConstraintFunctional<Model>> constraints = constraints_from_config(preset.model, cfg);
  SolverOptions opts = solver_options_from_config(cfg, /*relax_default=*/true);
  opts.mass = asmb.mass_mode;
  AlphaBetaTableau tableau = builtin_tableau(cfg.get_string("time.ssp", "ssp33"));
  Solver<Model> solver(g, preset.model, constraints, tableau, opts, asmb.mass.get());

  Field<Model> U(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    U[i] = preset.init(g.position<Model::dim>(i));
    if (!preset.model.admissible(U[i]))
    {
      throw InvariantError(detail::format_msg("initial data inadmissible at vertex %zu", i));
    }
  }

  double t_final = cfg.get_double("time.t_final", preset.t_final);
  if (!(t_final >= 0.0))
  {
    throw ConfigError("time.t_final must be nonnegative");
  }
  long max_steps = cfg.get_int("time.max_steps", 2000000);
  long every = cfg.get_int("output.every", 0);
  bool write = !out_dir.empty();
  if (write)
  {
    std::filesystem::create_directories(out_dir);
    write_snapshot_csv(out_dir + "/snapshot_000000.csv", g, preset.model, U);
    if (cfg.get_bool("output.graph_dump", false))
    {
      dump_graph_csv(g, out_dir + "/graph");
    }
  }

  std::vector<std::string> diag_header = {"step", "time", "dt"};
  for (int k = 0; k < Model::n_comp; k++)
  {
    diag_header.push_back(std::string("min_") + preset.model.component_name(k));
  }
  if (detail::has_internal_health<Model>())
  {
    diag_header.push_back("min_e");
  }
  diag_header.push_back("mass_total");
  diag_header.push_back("entropy_residual_max");
  diag_header.push_back("ell_min");
  diag_header.push_back("ell_mean");
  if (opts.stage_check)
  {
    for (const auto &c : constraints)
    {
      diag_header.push_back("slack_" + c.name);
    }
  }
  std::vector<std::vector<double>> diag_rows;

  ExecResult<Model> result;
  result.n_vertices = g.n;
  result.mass_initial = detail::total_mass<Model>(g, U);

  double t = 0.0;
  int step = 0;
  while (t < t_final * (1.0 - 1e-13) && t_final > 0.0)
  {
    if (step >= max_steps)
    {
      throw NumericsError(detail::format_msg("exceeded time.max_steps = %ld before t_final", max_steps));
    }
    double dt = std::min(solver.suggest_dt(U), t_final - t);
    if (!(dt > 0.0) || !std::isfinite(dt))
    {
      throw NumericsError(detail::format_msg("nonpositive step size %.3e at t = %.6g", dt, t));
    }
    StepDiagnostics sd;
    U = solver.step(U, dt, t, &sd);
    t += dt;
    step++;
    result.min_ell = std::min(result.min_ell, sd.ell_min);

    std::vector<double> row = {static_cast<double>(step), t, dt};
    for (int k = 0; k < Model::n_comp; k++)
    {
      double lo = U[0][k];
      for (std::size_t i = 1; i < g.n; i++)
      {
        lo = std::min(lo, U[i][k]);
      }
      row.push_back(lo);
    }
    if (detail::has_internal_health<Model>())
    {
      double lo = detail::internal_health(preset.model, U[0]);
      for (std::size_t i = 1; i < g.n; i++)
      {
        lo = std::min(lo, detail::internal_health(preset.model, U[i]));
      }
      row.push_back(lo);
    }
    row.push_back(detail::total_mass<Model>(g, U)[0]);
    row.push_back(sd.entropy_residual_max);
    row.push_back(sd.ell_min);
    row.push_back(sd.ell_mean);
    if (opts.stage_check)
    {
      for (std::size_t l = 0; l < constraints.size(); l++)
      {
        row.push_back(l < sd.worst_slack.size() ? sd.worst_slack[l]
                                                : std::numeric_limits<double>::infinity());
      }
    }
    diag_rows.push_back(std::move(row));

    if (write && every > 0 && step % every == 0)
    {
      char name[64];
      std::snprintf(name, sizeof(name), "/snapshot_%06d.csv", step);
      write_snapshot_csv(out_dir + name, g, preset.model, U);
    }
  }

  result.steps = step;
  result.U = U;
  result.mass_final = detail::total_mass<Model>(g, U);
  result.comp_min.assign(Model::n_comp, std::numeric_limits<double>::infinity());
  result.comp_max.assign(Model::n_comp, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < g.n; i++)
  {
    for (int k = 0; k < Model::n_comp; k++)
    {
      auto kk = static_cast<std::size_t>(k);
      result.comp_min[kk] = std::min(result.comp_min[kk], U[i][k]);
      result.comp_max[kk] = std::max(result.comp_max[kk], U[i][k]);
    }
  }

  if (preset.exact)
  {
    double l1 = 0.0;
    double linf = 0.0;
    for (std::size_t i = 0; i < g.n; i++)
    {
      if (!detail::in_window(preset, g.x[i]))
      {
        continue;
      }
      typename Model::State ex = preset.exact(g.position<Model::dim>(i), t_final);
      double err = std::abs(U[i][0] - ex[0]);
      l1 += g.m[i] * err;
      linf = std::max(linf, err);
    }
    result.l1 = l1;
    result.linf = linf;
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (write)
  {
    write_snapshot_csv(out_dir + "/snapshot_final.csv", g, preset.model, U);
    write_table_csv(out_dir + "/diagnostics.csv", diag_header, diag_rows);
    if (cfg.get_bool("output.vtk", false) && Model::dim == 2)
    {
      write_vtk_points_2d(out_dir + "/snapshot_final.vtk", g, preset.model, U);
    }
    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("preset", preset.name);
    summary.emplace_back("vertices", std::to_string(g.n));
    summary.emplace_back("steps", std::to_string(step));
    summary.emplace_back("t_final", detail::fmt_full(t_final));
    for (int k = 0; k < Model::n_comp; k++)
    {
      auto kk = static_cast<std::size_t>(k);
      std::string nm = preset.model.component_name(k);
      summary.emplace_back("mass_" + nm + "_initial", detail::fmt_full(result.mass_initial[kk]));
      summary.emplace_back("mass_" + nm + "_final", detail::fmt_full(result.mass_final[kk]));
      summary.emplace_back("min_" + nm, detail::fmt_full(result.comp_min[kk]));
      summary.emplace_back("max_" + nm, detail::fmt_full(result.comp_max[kk]));
    }
    if (!std::isnan(result.l1))
    {
      summary.emplace_back("l1_error_window", detail::fmt_full(result.l1));
      summary.emplace_back("linf_error_window", detail::fmt_full(result.linf));
    }
    summary.emplace_back("min_ell", detail::fmt_full(result.min_ell));
    summary.emplace_back("wall_seconds", detail::fmt_full(result.wall_seconds));
    for (const auto &note : preset.notes)
    {
      summary.emplace_back("note", note);
    }
    write_summary(out_dir + "/summary.txt", summary);
  }
  return result;
}

template <SystemModel Model>
int run_preset(Preset<Model> preset, const Config &cfg)
{
  std::string out_dir = cfg.get_string("output.dir", "out");
  ExecResult<Model> r = execute(std::move(preset), cfg, 0, out_dir);
  cfg.reject_unused();
  double drift = 0.0;
  for (std::size_t k = 0; k < r.mass_initial.size(); k++)
  {
    double scale = std::max(std::abs(r.mass_initial[k]), 1e-300);
    drift = std::max(drift, std::abs(r.mass_final[k] - r.mass_initial[k]) / scale);
  }
  std::printf("vertices %zu, steps %d, wall %.3f s, rel mass drift %.3e\n", r.n_vertices, r.steps,
              r.wall_seconds, drift);
  if (!std::isnan(r.l1))
  {
    std::printf("window errors: L1 %.6e, Linf %.6e\n", r.l1, r.linf);
  }
  std::printf("outputs written to %s\n", out_dir.c_str());
  return 0;
}

template <SystemModel Model>
int convergence_preset(Preset<Model> preset, const Config &cfg, int levels)
{
  if (!preset.exact)
  {
    throw ConfigError(detail::format_msg("preset '%s' has no exact solution for convergence studies",
                                         preset.name.c_str()));
  }
  if (levels < 2)
  {
    throw ConfigError("convergence needs at least 2 levels");
  }
  long base = cfg.get_int("mesh.n", preset.default_n);
  std::vector<std::string> header = {"n", "l1", "l1_rate", "linf", "linf_rate"};
  std::vector<std::vector<double>> rows;
  std::printf("%8s %14s %8s %14s %9s\n", "n", "L1", "L1 rate", "Linf", "Linf rate");
  double prev_l1 = 0.0, prev_linf = 0.0;
  for (int k = 0; k < levels; k++)
  {
    long n = base << k;
    ExecResult<Model> r = execute(preset, cfg, n, "");
    double rate_l1 = k > 0 ? std::log2(prev_l1 / r.l1) : std::numeric_limits<double>::quiet_NaN();
    double rate_linf = k > 0 ? std::log2(prev_linf / r.linf) : std::numeric_limits<double>::quiet_NaN();
    rows.push_back({static_cast<double>(n), r.l1, rate_l1, r.linf, rate_linf});
    std::printf("%8ld %14.6e %8.3f %14.6e %9.3f\n", n, r.l1, rate_l1, r.linf, rate_linf);
    prev_l1 = r.l1;
    prev_linf = r.linf;
  }
  std::string out_dir = cfg.get_string("output.dir", "out");
  cfg.reject_unused();
  std::filesystem::create_directories(out_dir);
  write_table_csv(out_dir + "/convergence.csv", header, rows);
  std::printf("rate table written to %s/convergence.csv\n", out_dir.c_str());
  return 0;
}

/// Preset registry: builds the preset (with system.* overrides) and runs the
/// requested action through the matching system type.
template <typename Action>
int dispatch_preset(const Config &cfg, Action &&action)
{
  std::string name = cfg.get_string_required("preset");
  if (name == "constant")
  {
    return action(preset_constant());
  }
  if (name == "sine_advection")
  {
    return action(preset_sine_advection());
  }
  if (name == "sine_advection_2d")
  {
    return action(preset_sine_advection_2d());
  }
  if (name == "burgers_riemann")
  {
    return action(preset_burgers_riemann());
  }
  if (name == "burgers_sine")
  {
    return action(preset_burgers_sine());
  }
  if (name == "sod")
  {
    return action(
        preset_sod(cfg.get_double("system.gamma", 1.4), cfg.get_double("system.covolume", 0.0)));
  }
  if (name == "sod_2d")
  {
    return action(preset_sod_2d(cfg.get_double("system.gamma", 1.4)));
  }
  if (name == "dam_break")
  {
    auto p = preset_dam_break();
    p.model.gravity = cfg.get_double("system.gravity", p.model.gravity);
    p.model.manning = cfg.get_double("system.manning", p.model.manning);
    return action(p);
  }
  if (name == "lake_at_rest")
  {
    auto p = preset_lake_at_rest();
    p.model.gravity = cfg.get_double("system.gravity", p.model.gravity);
    p.model.manning = cfg.get_double("system.manning", p.model.manning);
    return action(p);
  }
  throw ConfigError(detail::format_msg("unknown preset '%s'", name.c_str()));
}

inline int dispatch_run(const Config &cfg)
{
  return dispatch_preset(cfg, [&](auto preset) { return run_preset(std::move(preset), cfg); });
}

inline int dispatch_convergence(const Config &cfg, int levels)
{
  return dispatch_preset(cfg,
                         [&](auto preset) { return convergence_preset(std::move(preset), cfg, levels); });
}

}  // namespace hyperlim
