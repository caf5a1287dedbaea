// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0
//
// Convex limiter building blocks: scalar line searches, bound assembly and
// relaxation, antidiffusive corrections, the two-pass edge limiter, and the
// post-hoc bound verification.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "hyperlim/high_order.hpp"
#include "hyperlim/limiting.hpp"
#include "hyperlim/low_order.hpp"
#include "hyperlim/mesh.hpp"
#include "hyperlim/suites.hpp"
#include "hyperlim/systems/burgers.hpp"
#include "hyperlim/systems/shallow_water.hpp"

using namespace hyperlim;

namespace
{

constexpr double inf = std::numeric_limits<double>::infinity();

// Zero-flux relaxation model u' = -u / tau (finite tau0 for bound tests).
struct Decay
{
  static constexpr int n_comp = 1;
  static constexpr int dim = 1;
  using State = Vec<1>;

  double tau = 1.0;

  std::string name() const { return "decay"; }
  std::string component_name(int) const { return "u"; }
  Mat<1, 1> flux(const State &) const { return {}; }
  double max_wave_speed(const Vec<1> &, const State &, const State &) const { return 0.0; }
  bool admissible(const State &u) const { return std::isfinite(u[0]); }
  bool has_source() const { return true; }
  State source(const State &u, std::size_t) const { return State{-u[0] / tau}; }
  double tau0() const { return tau; }
  int n_entropies() const { return 1; }
  double entropy(int, const State &u) const { return 0.5 * u[0] * u[0]; }
  Vec<1> entropy_flux(int, const State &) const { return {}; }
  State entropy_grad(int, const State &u) const { return State{u[0]}; }
};

}  // namespace

TEST_CASE("largest feasible step of a quadratic slack", "[limiting]")
{
  // Infeasible start.
  CHECK(quadratic_max_ell(1.0, 1.0, -0.5) == 0.0);

  // Marginal start g(0) = 0: the sign of b decides.
  CHECK(quadratic_max_ell(-2.0, 1.0, 0.0) == Catch::Approx(0.5));
  CHECK(quadratic_max_ell(1.0, 1.0, 0.0) == inf);
  CHECK(quadratic_max_ell(1.0, 0.0, 0.0) == inf);
  CHECK(quadratic_max_ell(-1.0, 0.0, 0.0) == 0.0);
  CHECK(quadratic_max_ell(1.0, -1.0, 0.0) == 0.0);

  // Linear slack.
  CHECK(quadratic_max_ell(0.0, 2.0, 1.0) == inf);
  CHECK(quadratic_max_ell(0.0, -2.0, 1.0) == Catch::Approx(0.5));

  // Upward parabola: feasible forever without positive roots ahead.
  CHECK(quadratic_max_ell(1.0, 0.0, 1.0) == inf);
  CHECK(quadratic_max_ell(1.0, 3.0, 2.0) == inf);          // roots -1, -2
  CHECK(quadratic_max_ell(1.0, -3.0, 2.0) == Catch::Approx(1.0));  // roots 1, 2

  // Downward parabola: single positive root.
  CHECK(quadratic_max_ell(-1.0, 0.0, 1.0) == Catch::Approx(1.0));
  CHECK(quadratic_max_ell(-1.0, 2.0, 3.0) == Catch::Approx(3.0));

  // Internal energy worked example: W = (1, 0, 1), P = (0, 2, 0),
  // floor 1/2 gives rho g = 1/2 - 2 l^2 and l = 1/2.
  CHECK(quadratic_max_ell(-2.0, 0.0, 0.5) == Catch::Approx(0.5));
}

TEST_CASE("newton-secant and bisection brackets", "[limiting]")
{
  auto g = [](double l) { return 1.0 - l * l * l; };
  auto gp = [](double l) { return -3.0 * l * l; };

  auto r = newton_secant(g, gp, 4.0);
  CHECK(r.ell == Catch::Approx(1.0).margin(1e-9));
  CHECK(g(r.ell) >= 0.0);  // the left iterate is always feasible
  CHECK(r.iters >= 1);
  CHECK(r.iters <= 20);

  CHECK(bisection_max_ell(g, 4.0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(g(bisection_max_ell(g, 4.0)) >= 0.0);

  // Infeasible start and fully feasible segment short-circuit.
  auto neg = [](double l) { return -1.0 - l; };
  CHECK(newton_secant(neg, gp, 2.0).ell == 0.0);
  CHECK(newton_secant(neg, gp, 2.0).iters == 0);
  auto pos = [](double l) { return 1.0 - l; };
  CHECK(newton_secant(pos, gp, 0.5).ell == Catch::Approx(0.5));
  CHECK(bisection_max_ell(neg, 2.0) == 0.0);
  CHECK(bisection_max_ell(pos, 0.5) == Catch::Approx(0.5));

  // Tight tolerance converges within the iteration budget on a transcendental
  // slack (root of 2 - exp(l) at log 2).
  auto ge = [](double l) { return 2.0 - std::exp(l); };
  auto gpe = [](double l) { return -std::exp(l); };
  auto re = newton_secant(ge, gpe, 5.0, 1e-12, 20);
  CHECK(re.ell == Catch::Approx(std::log(2.0)).margin(1e-11));
}

TEST_CASE("bounds take the minimum over the convex decomposition", "[limiting]")
{
  auto mesh = make_interval_mesh(3, 0.0, 1.0, Topology::compact_support);
  auto g = build_fv_graph(mesh);
  Decay model;
  model.tau = 1.0;

  Field<Decay> U = {Vec<1>{1.0}, Vec<1>{0.5}, Vec<1>{0.25}};
  Field<Decay> src(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    src[i] = model.source(U[i], i);
  }
  auto f = compute_flux_table(model, U);
  auto dL = compute_dL(g, model, U);
  auto bar = compute_bar_states(g, model, U, f, dL);  // zero flux: midpoints
  double dt = 0.2;

  ConstraintFunctional<Decay> lo;
  lo.name = "u_min";
  lo.kind = ConstraintFunctional<Decay>::Kind::linear;
  lo.value = [](const Vec<1> &u) { return u[0]; };

  auto bounds = compute_bounds(g, model, {lo}, U, bar, dt, src);
  REQUIRE(bounds.psi_min.size() == 1);
  // Candidates per vertex: u_i, u_i + 2 dt s_i = 0.6 u_i, adjacent midpoints.
  CHECK(bounds.psi_min[0][0] == Catch::Approx(0.6));
  CHECK(bounds.psi_min[0][1] == Catch::Approx(0.3));
  CHECK(bounds.psi_min[0][2] == Catch::Approx(0.15));

  // The source substep gate 2 dt <= tau0 is enforced.
  CHECK_THROWS_AS(compute_bounds(g, model, {lo}, U, bar, 0.6, src), InvariantError);
}

TEST_CASE("bound relaxation lowers bounds and respects signs", "[limiting]")
{
  auto mesh = make_interval_mesh(3, 0.0, 1.0, Topology::compact_support);
  auto g = build_fv_graph(mesh);

  BoundSet bounds;
  bounds.psi_min = {{0.0, 1.0, 4.0}};
  relax_bounds(g, bounds);
  // The three wrapped cells are pairwise adjacent, so the neighbor averages
  // of the differences d2 = {5/2, 1, -7/2} give {5/24, 1/12, -7/24}.
  // Vertex 0 is clamped at zero (sign 0 keeps sign-definite bounds, and the
  // max picks 0 over -5/24); vertices 1 and 2 take psi - |avg| since with
  // r = (1/3)^1.5 the scaled branch (1-r)psi drops further.
  CHECK(bounds.psi_min[0][0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(bounds.psi_min[0][1] == Catch::Approx(1.0 - 1.0 / 12.0));
  CHECK(bounds.psi_min[0][2] == Catch::Approx(4.0 - 7.0 / 24.0));

  // Relaxation never raises a bound and keeps strictly positive bounds
  // positive; checked on random data.
  Rng rng(4807);
  auto mesh2 = make_interval_mesh(24, -1.0, 2.0, Topology::periodic, 0.3, &rng);
  auto g2 = build_fv_graph(mesh2);
  BoundSet rnd;
  rnd.psi_min.resize(2);
  rnd.psi_min[0].resize(g2.n);
  rnd.psi_min[1].resize(g2.n);
  for (std::size_t i = 0; i < g2.n; i++)
  {
    rnd.psi_min[0][i] = rng.uniform(-2.0, 2.0);
    rnd.psi_min[1][i] = rng.uniform(0.1, 3.0);
  }
  BoundSet before = rnd;
  relax_bounds(g2, rnd);
  for (std::size_t c = 0; c < 2; c++)
  {
    for (std::size_t i = 0; i < g2.n; i++)
    {
      CHECK(rnd.psi_min[c][i] <= before.psi_min[c][i] + 1e-15);
    }
  }
  for (std::size_t i = 0; i < g2.n; i++)
  {
    CHECK(rnd.psi_min[1][i] > 0.0);
  }

  RelaxationParams bad;
  bad.exponent = 2.0;
  CHECK_THROWS_AS(relax_bounds(g2, rnd, bad), ConfigError);
  bad.exponent = 0.0;
  CHECK_THROWS_AS(relax_bounds(g2, rnd, bad), ConfigError);
}

TEST_CASE("corrections and the reconstruction identity", "[limiting]")
{
  Rng rng(17);
  auto g = checks::random_interval_graph(rng, 20, Discretization::finite_volume);
  using Model = Burgers;
  double dt = 0.03;

  Field<Model> FL(g.n_edges()), FH(g.n_edges());
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    FL[e] = Vec<1>{rng.uniform(-1.0, 1.0)};
    FH[e] = Vec<1>{rng.uniform(-1.0, 1.0)};
  }
  auto A = compute_corrections(g, FL, FH, dt);
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    CHECK(A[e][0] == Catch::Approx(dt * (FL[e][0] - FH[e][0])).margin(1e-16));
  }

  Field<Model> UL(g.n), UH(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    UL[i] = Vec<1>{rng.uniform(-1.0, 1.0)};
    typename Model::State acc{};
    for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
    {
      if (g.edge_of[s] != no_edge)
      {
        acc += g.orient[s] * A[g.edge_of[s]];
      }
    }
    UH[i] = UL[i] + (1.0 / g.m[i]) * acc;
  }
  CHECK_NOTHROW(check_correction_identity(g, A, UL, UH));
  UH[0][0] += 1e-6;
  CHECK_THROWS_AS(check_correction_identity(g, A, UL, UH), InvariantError);
}

TEST_CASE("zero antidiffusion passes through unlimited", "[limiting]")
{
  Rng rng(29);
  auto g = checks::random_interval_graph(rng, 16, Discretization::finite_volume);
  Burgers model;
  auto constraints = builtin_constraints(model);
  auto UL = checks::random_scalar_field<Burgers>(rng, g, 0.0, 1.0);
  Field<Burgers> src(g.n, Vec<1>{});

  auto f = compute_flux_table(model, UL);
  auto dL = compute_dL(g, model, UL);
  auto bar = compute_bar_states(g, model, UL, f, dL);
  auto bounds = compute_bounds(g, model, constraints, UL, bar, 0.01, src);

  Field<Burgers> A(g.n_edges(), Vec<1>{});
  auto res = limit_step(g, constraints, UL, A, bounds);
  CHECK(res.stats.ell_min == 1.0);
  CHECK(res.stats.ell_mean == 1.0);
  for (std::size_t i = 0; i < g.n; i++)
  {
    CHECK(res.U[i][0] == Catch::Approx(UL[i][0]).margin(1e-15));
  }
}

TEST_CASE("limited update enforces bounds and conserves mass", "[limiting]")
{
  Rng rng(61);
  Burgers model;
  auto constraints = builtin_constraints(model);

  for (int trial = 0; trial < 4; trial++)
  {
    auto mesh = make_interval_mesh(48, -1.0, 1.0, Topology::periodic, 0.25, &rng);
    auto g = build_fv_graph(mesh);
    auto U = checks::random_scalar_field<Burgers>(rng, g, -1.0, 1.0);
    Field<Burgers> src(g.n, Vec<1>{});

    auto f = compute_flux_table(model, U);
    auto dL = compute_dL(g, model, U);
    double dt = max_dt(g, model, dL, 0.9);
    auto FL = compute_low_order_fluxes(g, U, f, dL);
    auto bar = compute_bar_states(g, model, U, f, dL);
    auto UL = low_order_update(g, model, U, FL, bar, dL, dt, src);

    // Galerkin target (zero viscosity): the most aggressive antidiffusion.
    std::vector<double> dH(g.n_edges(), 0.0);
    auto FH = compute_high_order_fluxes(g, U, f, dH);
    auto A = compute_corrections(g, FL, FH, dt);

    auto bounds = compute_bounds(g, model, constraints, U, bar, dt, src);
    LimiterParams prm;
    prm.debug_checks = true;
    auto res = limit_step(g, constraints, UL, A, bounds, prm);

    CHECK(res.stats.ell_min >= 0.0);
    CHECK(res.stats.ell_min <= 1.0);
    auto reports = check_limited(g, constraints, bounds, res.U);
    for (const auto &rep : reports)
    {
      CHECK(rep.min_relative_slack >= -1e-9);
    }

    double mass_ul = 0.0, mass_lim = 0.0;
    for (std::size_t i = 0; i < g.n; i++)
    {
      mass_ul += g.m[i] * UL[i][0];
      mass_lim += g.m[i] * res.U[i][0];
    }
    CHECK(mass_lim == Catch::Approx(mass_ul).margin(1e-13));
  }
}

TEST_CASE("depth floor survives aggressive antidiffusion", "[limiting]")
{
  ShallowWater model;
  auto constraints = builtin_constraints(model);
  auto mesh = make_interval_mesh(32, -1.0, 1.0, Topology::periodic);
  auto g = build_fv_graph(mesh);

  Field<ShallowWater> U(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    U[i] = g.x[i][0] < 0.0 ? Vec<2>{1.0, 0.0} : Vec<2>{1e-3, 0.0};
  }
  Field<ShallowWater> src(g.n, Vec<2>{});

  auto f = compute_flux_table(model, U);
  auto dL = compute_dL(g, model, U);
  double dt = max_dt(g, model, dL, 0.9);
  auto FL = compute_low_order_fluxes(g, U, f, dL);
  auto bar = compute_bar_states(g, model, U, f, dL);
  auto UL = low_order_update(g, model, U, FL, bar, dL, dt, src);

  std::vector<double> dH(g.n_edges(), 0.0);
  auto FH = compute_high_order_fluxes(g, U, f, dH);
  auto A = compute_corrections(g, FL, FH, dt);
  auto bounds = compute_bounds(g, model, constraints, U, bar, dt, src);
  auto res = limit_step(g, constraints, UL, A, bounds);

  auto reports = check_limited(g, constraints, bounds, res.U);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].name == "depth_min");
  for (const auto &rep : reports)
  {
    CHECK(rep.min_relative_slack >= -1e-9);
  }
  for (std::size_t i = 0; i < g.n; i++)
  {
    CHECK(res.U[i][0] > 0.0);
  }
}

TEST_CASE("bound verification reports the worst vertex", "[limiting]")
{
  auto mesh = make_interval_mesh(3, 0.0, 1.0, Topology::compact_support);
  auto g = build_fv_graph(mesh);
  Burgers model;
  auto constraints = builtin_constraints(model);

  BoundSet bounds;
  bounds.psi_min = {{0.0, 0.2, 0.4}, {-1.0, -1.0, -1.0}};
  Field<Burgers> U = {Vec<1>{0.5}, Vec<1>{0.1}, Vec<1>{0.9}};
  auto reports = check_limited(g, constraints, bounds, U);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].name == "u_min");
  CHECK(reports[0].argmin == 1);
  CHECK(reports[0].min_slack == Catch::Approx(-0.1));
  CHECK(reports[0].min_relative_slack == Catch::Approx(-0.1 / 1.3));
  CHECK(reports[1].name == "u_max");
  CHECK(reports[1].argmin == 2);  // -0.9 against bound -1.0
  CHECK(reports[1].min_slack == Catch::Approx(0.1));
}
