// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>
#include "error.hpp"
#include "rng.hpp"

namespace hyperlim
{

/// Both topologies are realized on a wrapped (torus) node set. A
/// compact-support mesh models a Cauchy box: data is constant near the wrap
/// seam and the run must end before any wave reaches it, which keeps every
/// graph identity (skew-symmetry, zero row sums, exact conservation) global.
enum class Topology
{
  periodic,
  compact_support
};

enum class CellKind
{
  interval,
  quad,
  triangle
};

/// Geometry container shared by both discretizations. Finite volume graphs
/// use cells as degrees of freedom; continuous P1 graphs use nodes.
struct MeshDescriptor
{
  int dim = 1;
  Topology topology = Topology::periodic;
  CellKind kind = CellKind::interval;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 4>> cells;  // node ids, unused entries -1
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  double extent(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }

  /// Minimal-image displacement from a to b along one axis.
  double delta(double a, double b, int axis) const
  {
    double L = extent(axis);
    double d = b - a;
    d -= L * std::round(d / L);
    return d;
  }

  int nodes_per_cell() const
  {
    switch (kind)
    {
      case CellKind::interval:
        return 2;
      case CellKind::triangle:
        return 3;
      case CellKind::quad:
        return 4;
    }
    return 0;
  }

  /// Cell corner coordinates unwrapped around the first corner so the cell
  /// is geometrically contiguous even when it crosses the wrap seam.
  std::array<std::array<double, 2>, 4> cell_coords(std::size_t c) const
  {
    std::array<std::array<double, 2>, 4> xs{};
    const auto &cell = cells[c];
    const auto &anchor = nodes[static_cast<std::size_t>(cell[0])];
    xs[0] = anchor;
    for (int k = 1; k < nodes_per_cell(); k++)
    {
      const auto &p = nodes[static_cast<std::size_t>(cell[static_cast<std::size_t>(k)])];
      for (int ax = 0; ax < dim; ax++)
      {
        auto a = static_cast<std::size_t>(ax);
        xs[static_cast<std::size_t>(k)][a] = anchor[a] + delta(anchor[a], p[a], ax);
      }
    }
    return xs;
  }

  /// Signed measure: interval length or polygon area (shoelace).
  double cell_measure(std::size_t c) const
  {
    auto xs = cell_coords(c);
    if (kind == CellKind::interval)
    {
      return xs[1][0] - xs[0][0];
    }
    int nv = nodes_per_cell();
    double area2 = 0.0;
    for (int k = 0; k < nv; k++)
    {
      const auto &p = xs[static_cast<std::size_t>(k)];
      const auto &q = xs[static_cast<std::size_t>((k + 1) % nv)];
      area2 += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * area2;
  }

  std::array<double, 2> cell_centroid(std::size_t c) const
  {
    auto xs = cell_coords(c);
    int nv = nodes_per_cell();
    std::array<double, 2> ctr{0.0, 0.0};
    for (int k = 0; k < nv; k++)
    {
      ctr[0] += xs[static_cast<std::size_t>(k)][0] / nv;
      ctr[1] += xs[static_cast<std::size_t>(k)][1] / nv;
    }
    return ctr;
  }
};

/// Uniform (optionally node-jittered) wrapped interval mesh with n cells.
/// Jitter is a fraction of the uniform spacing, capped so cells stay
/// positively oriented.
inline MeshDescriptor make_interval_mesh(std::size_t n, double x0, double x1,
                                         Topology topology = Topology::periodic,
                                         double jitter = 0.0, Rng *rng = nullptr)
{
  if (n < 3)
  {
    throw ConfigError("interval mesh needs at least 3 cells");
  }
  if (!(x1 > x0))
  {
    throw ConfigError("interval mesh needs x1 > x0");
  }
  MeshDescriptor mesh;
  mesh.dim = 1;
  mesh.topology = topology;
  mesh.kind = CellKind::interval;
  mesh.lo = {x0, 0.0};
  mesh.hi = {x1, 1.0};
  const double h = (x1 - x0) / static_cast<double>(n);
  const double cap = std::min(std::abs(jitter), 0.45);
  mesh.nodes.resize(n);
  for (std::size_t i = 0; i < n; i++)
  {
    double x = x0 + static_cast<double>(i) * h;
    if (cap > 0.0 && rng != nullptr)
    {
      x += cap * h * rng->uniform(-1.0, 1.0);
    }
    mesh.nodes[i] = {x, 0.0};
  }
  mesh.cells.resize(n);
  for (std::size_t i = 0; i < n; i++)
  {
    mesh.cells[i] = {static_cast<int>(i), static_cast<int>((i + 1) % n), -1, -1};
  }
  return mesh;
}

/// Axis-aligned wrapped quad mesh with independently jittered per-axis
/// spacings (tensor grid). For finite volume use only.
inline MeshDescriptor make_quad_mesh(std::size_t nx, std::size_t ny,
                                     std::array<double, 2> lo, std::array<double, 2> hi,
                                     Topology topology = Topology::periodic,
                                     double jitter = 0.0, Rng *rng = nullptr)
{
  if (nx < 3 || ny < 3)
  {
    throw ConfigError("quad mesh needs at least 3 cells per axis");
  }
  MeshDescriptor mesh;
  mesh.dim = 2;
  mesh.topology = topology;
  mesh.kind = CellKind::quad;
  mesh.lo = lo;
  mesh.hi = hi;
  auto axis_nodes = [&](std::size_t n, int ax)
  {
    std::vector<double> xs(n);
    double h = mesh.extent(ax) / static_cast<double>(n);
    double cap = std::min(std::abs(jitter), 0.45);
    for (std::size_t i = 0; i < n; i++)
    {
      xs[i] = lo[static_cast<std::size_t>(ax)] + static_cast<double>(i) * h;
      if (cap > 0.0 && rng != nullptr)
      {
        xs[i] += cap * h * rng->uniform(-1.0, 1.0);
      }
    }
    return xs;
  };
  auto xs = axis_nodes(nx, 0);
  auto ys = axis_nodes(ny, 1);
  mesh.nodes.resize(nx * ny);
  for (std::size_t j = 0; j < ny; j++)
  {
    for (std::size_t i = 0; i < nx; i++)
    {
      mesh.nodes[j * nx + i] = {xs[i], ys[j]};
    }
  }
  auto id = [&](std::size_t i, std::size_t j)
  { return static_cast<int>((j % ny) * nx + (i % nx)); };
  mesh.cells.resize(nx * ny);
  for (std::size_t j = 0; j < ny; j++)
  {
    for (std::size_t i = 0; i < nx; i++)
    {
      mesh.cells[j * nx + i] = {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
    }
  }
  return mesh;
}

/// Wrapped triangulation: structured node grid, each quad split along an
/// alternating diagonal, nodes optionally jittered. For continuous P1 use.
inline MeshDescriptor make_triangle_mesh(std::size_t nx, std::size_t ny,
                                         std::array<double, 2> lo, std::array<double, 2> hi,
                                         Topology topology = Topology::periodic,
                                         double jitter = 0.0, Rng *rng = nullptr)
{
  if (nx < 3 || ny < 3)
  {
    throw ConfigError("triangle mesh needs at least 3 nodes per axis");
  }
  MeshDescriptor mesh;
  mesh.dim = 2;
  mesh.topology = topology;
  mesh.kind = CellKind::triangle;
  mesh.lo = lo;
  mesh.hi = hi;
  const double hx = mesh.extent(0) / static_cast<double>(nx);
  const double hy = mesh.extent(1) / static_cast<double>(ny);
  const double cap = std::min(std::abs(jitter), 0.25) * std::min(hx, hy);
  mesh.nodes.resize(nx * ny);
  for (std::size_t j = 0; j < ny; j++)
  {
    for (std::size_t i = 0; i < nx; i++)
    {
      double x = lo[0] + static_cast<double>(i) * hx;
      double y = lo[1] + static_cast<double>(j) * hy;
      if (cap > 0.0 && rng != nullptr)
      {
        x += cap * rng->uniform(-1.0, 1.0);
        y += cap * rng->uniform(-1.0, 1.0);
      }
      mesh.nodes[j * nx + i] = {x, y};
    }
  }
  auto id = [&](std::size_t i, std::size_t j)
  { return static_cast<int>((j % ny) * nx + (i % nx)); };
  mesh.cells.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; j++)
  {
    for (std::size_t i = 0; i < nx; i++)
    {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0)
      {
        mesh.cells.push_back({a, b, c, -1});
        mesh.cells.push_back({a, c, d, -1});
      }
      else
      {
        mesh.cells.push_back({a, b, d, -1});
        mesh.cells.push_back({b, c, d, -1});
      }
    }
  }
  return mesh;
}

}  // namespace hyperlim
