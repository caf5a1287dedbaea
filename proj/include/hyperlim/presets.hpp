// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <functional>
#include <memory>
#include <string>
#include <vector>
#include "exact_riemann.hpp"
#include "graph.hpp"
#include "mesh.hpp"
#include "systems/advection.hpp"
#include "systems/burgers.hpp"
#include "systems/euler.hpp"
#include "systems/model.hpp"
#include "systems/shallow_water.hpp"
#include "vec.hpp"

namespace hyperlim
{

/// A ready-to-run problem: model parameters, box geometry, initial data, and
/// (when available) the exact solution used for error measurement.
///
/// Open (Cauchy) problems are realized on a periodically wrapped box chosen
/// large enough that waves created at the wrap seam cannot reach the error
/// window before t_final; `window_lo/hi` mark the region where errors are
/// meaningful. Periodic problems use the whole box.
template <SystemModel Model>
struct Preset
{
  std::string name;
  Model model;
  Topology topology = Topology::periodic;
  int default_n = 400;
  Vec<Model::dim> box_lo, box_hi;
  double t_final = 0.5;
  Vec<Model::dim> window_lo, window_hi;
  std::function<typename Model::State(const Vec<Model::dim> &)> init;
  std::function<typename Model::State(const Vec<Model::dim> &, double)> exact;  // may be empty
  // Called after graph assembly for discretization-dependent model data
  // (e.g. nodal bathymetry gradients).
  std::function<void(Model &, const ConnectivityGraph &)> setup;
  std::vector<std::string> notes;
};

namespace detail
{

/// Wrap x into [lo, hi) periodically.
inline double wrap_periodic(double x, double lo, double hi)
{
  double len = hi - lo;
  double y = std::fmod(x - lo, len);
  if (y < 0.0)
  {
    y += len;
  }
  return lo + y;
}

}  // namespace detail

inline Preset<Advection<1>> preset_constant()
{
  Preset<Advection<1>> p;
  p.name = "constant";
  p.model.velocity = Vec<1>{1.0};
  p.topology = Topology::periodic;
  p.default_n = 100;
  p.box_lo = Vec<1>{0.0};
  p.box_hi = Vec<1>{1.0};
  p.window_lo = p.box_lo;
  p.window_hi = p.box_hi;
  p.t_final = 0.5;
  p.init = [](const Vec<1> &) { return Vec<1>{0.5}; };
  p.exact = [](const Vec<1> &, double) { return Vec<1>{0.5}; };
  return p;
}

inline Preset<Advection<1>> preset_sine_advection()
{
  Preset<Advection<1>> p;
  p.name = "sine_advection";
  p.model.velocity = Vec<1>{1.0};
  p.topology = Topology::periodic;
  p.default_n = 100;
  p.box_lo = Vec<1>{0.0};
  p.box_hi = Vec<1>{1.0};
  p.window_lo = p.box_lo;
  p.window_hi = p.box_hi;
  p.t_final = 0.5;
  auto u0 = [](double x) { return 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * x); };
  p.init = [u0](const Vec<1> &x) { return Vec<1>{u0(x[0])}; };
  p.exact = [u0](const Vec<1> &x, double t)
  { return Vec<1>{u0(detail::wrap_periodic(x[0] - t, 0.0, 1.0))}; };
  return p;
}

inline Preset<Advection<2>> preset_sine_advection_2d()
{
  Preset<Advection<2>> p;
  p.name = "sine_advection_2d";
  p.model.velocity = Vec<2>{1.0, 0.5};
  p.topology = Topology::periodic;
  p.default_n = 64;
  p.box_lo = Vec<2>{0.0, 0.0};
  p.box_hi = Vec<2>{1.0, 1.0};
  p.window_lo = p.box_lo;
  p.window_hi = p.box_hi;
  p.t_final = 0.25;
  auto u0 = [](double x, double y)
  { return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * x) * std::sin(2.0 * std::numbers::pi * y); };
  p.init = [u0](const Vec<2> &x) { return Vec<1>{u0(x[0], x[1])}; };
  p.exact = [u0](const Vec<2> &x, double t)
  {
    return Vec<1>{u0(detail::wrap_periodic(x[0] - t, 0.0, 1.0),
                     detail::wrap_periodic(x[1] - 0.5 * t, 0.0, 1.0))};
  };
  return p;
}

inline Preset<Burgers> preset_burgers_riemann()
{
  Preset<Burgers> p;
  p.name = "burgers_riemann";
  p.topology = Topology::compact_support;
  p.default_n = 400;
  p.box_lo = Vec<1>{-1.0};
  p.box_hi = Vec<1>{2.0};
  p.window_lo = Vec<1>{-0.25};
  p.window_hi = Vec<1>{0.9};
  p.t_final = 0.3;
  const double ul = 1.0, ur = 0.0, x0 = 0.25;
  p.init = [=](const Vec<1> &x) { return Vec<1>{x[0] < x0 ? ul : ur}; };
  p.exact = [=](const Vec<1> &x, double t)
  {
    if (t <= 0.0)
    {
      return Vec<1>{x[0] < x0 ? ul : ur};
    }
    return Vec<1>{burgers_riemann(ul, ur, (x[0] - x0) / t)};
  };
  return p;
}

inline Preset<Burgers> preset_burgers_sine()
{
  Preset<Burgers> p;
  p.name = "burgers_sine";
  p.topology = Topology::periodic;
  p.default_n = 400;
  p.box_lo = Vec<1>{0.0};
  p.box_hi = Vec<1>{1.0};
  p.window_lo = p.box_lo;
  p.window_hi = p.box_hi;
  p.t_final = 0.3;  // past shock formation at 1/(2 pi)
  p.init = [](const Vec<1> &x) { return Vec<1>{std::sin(2.0 * std::numbers::pi * x[0])}; };
  return p;
}

inline Preset<Euler<1>> preset_sod(double gamma = 1.4, double covolume = 0.0)
{
  Preset<Euler<1>> p;
  p.name = "sod";
  p.model.gamma = gamma;
  p.model.covolume = covolume;
  p.topology = Topology::compact_support;
  p.default_n = 400;
  p.box_lo = Vec<1>{-0.5};
  p.box_hi = Vec<1>{1.5};
  p.window_lo = Vec<1>{0.0};
  p.window_hi = Vec<1>{1.0};
  p.t_final = 0.2;
  const double x0 = 0.5;
  const RiemannState left{1.0, 0.0, 1.0};
  const RiemannState right{0.125, 0.0, 0.1};
  Euler<1> m = p.model;
  auto to_conserved = [m](const RiemannState &s)
  {
    double eps = s.p * (1.0 - m.covolume * s.rho) / (m.gamma - 1.0);
    return Vec<3>{s.rho, s.rho * s.v, eps + 0.5 * s.rho * s.v * s.v};
  };
  p.init = [=](const Vec<1> &x) { return to_conserved(x[0] < x0 ? left : right); };
  if (covolume == 0.0)
  {
    auto solver = std::make_shared<ExactRiemann>(gamma, left, right);
    p.exact = [=](const Vec<1> &x, double t)
    {
      if (t <= 0.0)
      {
        return to_conserved(x[0] < x0 ? left : right);
      }
      return to_conserved(solver->sample((x[0] - x0) / t));
    };
  }
  return p;
}

inline Preset<Euler<2>> preset_sod_2d(double gamma = 1.4)
{
  Preset<Euler<2>> p;
  p.name = "sod_2d";
  p.model.gamma = gamma;
  p.topology = Topology::compact_support;
  p.default_n = 128;
  p.box_lo = Vec<2>{-1.0, -1.0};
  p.box_hi = Vec<2>{1.0, 1.0};
  p.window_lo = Vec<2>{-0.9, -0.9};
  p.window_hi = Vec<2>{0.9, 0.9};
  p.t_final = 0.2;
  const double r0 = 0.4;
  Euler<2> m = p.model;
  p.init = [=](const Vec<2> &x)
  {
    bool inner = std::hypot(x[0], x[1]) < r0;
    double rho = inner ? 1.0 : 0.125;
    double pres = inner ? 1.0 : 0.1;
    return Vec<4>{rho, 0.0, 0.0, pres / (m.gamma - 1.0)};
  };
  return p;
}

inline Preset<ShallowWater> preset_dam_break()
{
  Preset<ShallowWater> p;
  p.name = "dam_break";
  p.model.gravity = 9.81;
  p.topology = Topology::compact_support;
  p.default_n = 400;
  p.box_lo = Vec<1>{-8.0};
  p.box_hi = Vec<1>{8.0};
  p.window_lo = Vec<1>{-4.0};
  p.window_hi = Vec<1>{4.0};
  p.t_final = 0.8;
  const double hl = 1.0, hr = 0.1, x0 = 0.0;
  p.init = [=](const Vec<1> &x) { return Vec<2>{x[0] < x0 ? hl : hr, 0.0}; };
  return p;
}

inline Preset<ShallowWater> preset_lake_at_rest()
{
  Preset<ShallowWater> p;
  p.name = "lake_at_rest";
  p.model.gravity = 9.81;
  p.model.manning = 0.03;
  p.topology = Topology::compact_support;
  p.default_n = 200;
  p.box_lo = Vec<1>{0.0};
  p.box_hi = Vec<1>{10.0};
  p.window_lo = p.box_lo;
  p.window_hi = p.box_hi;
  p.t_final = 0.5;
  // Physical bump of elevation B(x); the momentum source is written as
  // +g h dz/dx with depth-signed z, so the model receives dz/dx = -B'(x).
  // The continuous steady state is then h = 1 - B (flat free surface).
  auto bed = [](double x) { return 0.2 * std::exp(-2.0 * (x - 5.0) * (x - 5.0)); };
  auto bed_slope = [](double x)
  { return 0.2 * std::exp(-2.0 * (x - 5.0) * (x - 5.0)) * (-4.0 * (x - 5.0)); };
  p.init = [=](const Vec<1> &x) { return Vec<2>{1.0 - bed(x[0]), 0.0}; };
  p.setup = [=](ShallowWater &model, const ConnectivityGraph &g)
  {
    model.bed_gradient.resize(g.n);
    for (std::size_t i = 0; i < g.n; i++)
    {
      model.bed_gradient[i] = -bed_slope(g.x[i][0]);
    }
  };
  p.notes = {"scheme is not well-balanced: the lake surface develops O(h) ripples",
             "friction uses the regularized Manning closure"};
  return p;
}

}  // namespace hyperlim
