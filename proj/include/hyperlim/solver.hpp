// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>
#include "constraints.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "high_order.hpp"
#include "limiting.hpp"
#include "low_order.hpp"
#include "systems/model.hpp"
#include "time_integration.hpp"

namespace hyperlim
{

enum class Scheme
{
  low_order,   // graph-viscosity scheme only
  high_order,  // unlimited high-order (diagnostic; may violate bounds)
  limited,     // high-order with convex limiting
};

enum class ViscosityMethod
{
  smoothness,
  greedy,
  commutator,
};

struct SolverOptions
{
  Scheme scheme = Scheme::limited;
  ViscosityMethod viscosity = ViscosityMethod::smoothness;
  SmoothnessParams smoothness;
  CommutatorParams commutator;
  MassMode mass = MassMode::lumped;
  MassSolveParams mass_solve;
  bool relax = false;
  RelaxationParams relaxation;
  LimiterParams limiter;
  double cfl = 0.9;             // fraction of the stability limit
  bool cfl_gate = false;        // restrict dt to the smoothness-theorem gate
  bool debug_checks = false;    // convex-form / correction identities per substep
  bool stage_check = false;     // evaluate constraint slacks after every substep
  bool track_entropy = false;   // record the low-order entropy residual (entropy 0)
};

/// Per-step diagnostics, aggregated over the SSP substeps.
struct StepDiagnostics
{
  double dt = 0.0;
  int substeps = 0;
  double ell_min = 1.0;
  double ell_mean = 1.0;
  std::vector<double> worst_slack;  // per constraint (relative), min over substeps
  double entropy_residual_max = -std::numeric_limits<double>::infinity();
};

/// Orchestrates one forward-Euler substep of the full scheme and wraps it
/// into SSP stages. Viscosities and bar states are rebuilt from the substep
/// input state; dt is chosen once per step from U^n with the tableau's c_os
/// headroom.
template <SystemModel Model>
class Solver
{
public:
  Solver(const ConnectivityGraph &graph, Model model,
         std::vector<ConstraintFunctional<Model>> constraints, AlphaBetaTableau tableau,
         SolverOptions opts, const ConsistentMass *mass = nullptr)
      : g_(graph), model_(std::move(model)), constraints_(std::move(constraints)),
        tableau_(std::move(tableau)), opts_(opts), mass_(mass)
  {
    validate_tableau(tableau_);
    if (!(opts_.cfl > 0.0 && opts_.cfl <= 1.0))
    {
      throw ConfigError("cfl must lie in (0, 1]");
    }
    if (opts_.viscosity == ViscosityMethod::greedy && Model::n_comp != 1)
    {
      throw ConfigError("greedy viscosity is only defined for scalar systems");
    }
    if (opts_.mass != MassMode::lumped && mass_ == nullptr)
    {
      throw ConfigError("consistent mass stepping requires an assembled mass matrix");
    }
  }

  const Model &model() const { return model_; }
  const std::vector<ConstraintFunctional<Model>> &constraints() const { return constraints_; }
  const AlphaBetaTableau &tableau() const { return tableau_; }

  /// Stable step size from the state U, including the cfl fraction, the
  /// tableau headroom, and (optionally) the smoothness-theorem gate.
  double suggest_dt(const Field<Model> &U) const
  {
    std::vector<double> dL = compute_dL(g_, model_, U);
    double dt = max_dt(g_, model_, dL, opts_.cfl);
    if (opts_.cfl_gate)
    {
      // Tighten gamma_i <= 1/2 (the plain limit) to gamma_i <= 1/(1 + k_psi c#).
      double gate = 1.0 / (1.0 + smoothness_psi_lipschitz(opts_.smoothness) * beta_ratio() *
                                     static_cast<double>(g_.max_degree));
      dt *= std::min(1.0, 2.0 * gate);
    }
    return dt * tableau_.c_os;
  }

  /// One limited forward-Euler substep (the building block of every stage).
  Field<Model> substep(const Field<Model> &U, double dt, double /*t*/, StepDiagnostics *diag) const
  {
    Field<Model> src(g_.n);
    if (model_.has_source())
    {
      parallel_for(g_.n, [&](std::size_t i) { src[i] = model_.source(U[i], i); });
    }
    FluxTable<Model> f = compute_flux_table(model_, U);
    std::vector<double> dL = compute_dL(g_, model_, U);
    Field<Model> bar = compute_bar_states(g_, model_, U, f, dL);
    Field<Model> FL = compute_low_order_fluxes(g_, U, f, dL);
    LowOrderOptions lo_opts;
    lo_opts.debug_checks = opts_.debug_checks;
    Field<Model> UL = low_order_update(g_, model_, U, FL, bar, dL, dt, src, lo_opts);

    if (diag && opts_.track_entropy && model_.n_entropies() > 0)
    {
      std::vector<double> res = entropy_inequality_residual(g_, model_, 0, U, UL, dL, dt, src);
      for (double r : res)
      {
        diag->entropy_residual_max = std::max(diag->entropy_residual_max, r);
      }
    }
    if (diag)
    {
      diag->substeps++;
    }
    if (opts_.scheme == Scheme::low_order)
    {
      return UL;
    }

    std::vector<double> dH = high_order_viscosity(U, f, bar, dL, dt);
    Field<Model> FH = compute_high_order_fluxes(g_, U, f, dH);
    Field<Model> UH;
    high_order_update(g_, U, dt, src, opts_.mass, mass_, FH, UH, opts_.mass_solve);
    if (opts_.scheme == Scheme::high_order)
    {
      return UH;
    }

    BoundSet bounds = compute_bounds(g_, model_, constraints_, U, bar, dt, src);
    if (opts_.relax)
    {
      relax_bounds(g_, bounds, opts_.relaxation);
    }
    Field<Model> A = compute_corrections(g_, FL, FH, dt);
    if (opts_.debug_checks)
    {
      check_correction_identity(g_, A, UL, UH);
    }
    LimitResult<Model> lim = limit_step(g_, constraints_, UL, A, bounds, opts_.limiter);
    if (diag)
    {
      diag->ell_min = std::min(diag->ell_min, lim.stats.ell_min);
      diag->ell_mean = std::min(diag->ell_mean, lim.stats.ell_mean);
      if (opts_.stage_check)
      {
        std::vector<ConstraintReport> reports = check_limited(g_, constraints_, bounds, lim.U);
        if (diag->worst_slack.size() != reports.size())
        {
          diag->worst_slack.assign(reports.size(), std::numeric_limits<double>::infinity());
        }
        for (std::size_t l = 0; l < reports.size(); l++)
        {
          diag->worst_slack[l] = std::min(diag->worst_slack[l], reports[l].min_relative_slack);
        }
      }
    }
    return lim.U;
  }

  /// One full SSP step of size dt.
  Field<Model> step(const Field<Model> &U, double dt, double t, StepDiagnostics *diag = nullptr) const
  {
    if (diag)
    {
      diag->dt = dt;
    }
    return ssp_step(tableau_, U, dt, t,
                    [&](const Field<Model> &w, double dt_sub, double t_sub)
                    { return substep(w, dt_sub, t_sub, diag); });
  }

private:
  double beta_ratio() const
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double b : g_.beta_e)
    {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
    return (g_.beta_e.empty() || lo <= 0.0) ? 1.0 : hi / lo;
  }

  std::vector<double> high_order_viscosity(const Field<Model> &U, const FluxTable<Model> &f,
                                           const Field<Model> &bar, const std::vector<double> &dL,
                                           double dt) const
  {
    switch (opts_.viscosity)
    {
      case ViscosityMethod::greedy:
        return dH_greedy(g_, U, bar, dL, dt, 0);
      case ViscosityMethod::commutator:
      {
        CommutatorParams p = opts_.commutator;
        if (p.mesh_eps && p.domain_measure <= 0.0)
        {
          p.domain_measure = g_.volume;
        }
        return dH_commutator(g_, model_, U, f, dL, p);
      }
      case ViscosityMethod::smoothness:
      default:
      {
        std::vector<double> gval = smoothness_values(model_, U, opts_.smoothness);
        std::vector<double> alpha = smoothness_alpha(g_, gval, opts_.smoothness);
        return dH_smoothness(g_, dL, alpha, opts_.smoothness);
      }
    }
  }

  const ConnectivityGraph &g_;
  Model model_;
  std::vector<ConstraintFunctional<Model>> constraints_;
  AlphaBetaTableau tableau_;
  SolverOptions opts_;
  const ConsistentMass *mass_;
};

}  // namespace hyperlim
