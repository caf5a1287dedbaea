// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>
#include "error.hpp"
#include "mesh.hpp"
#include "vec.hpp"

namespace hyperlim
{

enum class Discretization
{
  finite_volume,
  cg_p1
};

enum class BetaWeights
{
  ones,
  stiffness
};

constexpr std::size_t no_edge = std::numeric_limits<std::size_t>::max();

/// Vertex/edge view of the discretization. Stencils are stored in CSR form
/// with the vertex itself included (I(i) contains i); the c vectors live on
/// undirected edges with the orientation i < j, so c_ij = -c_ji holds
/// exactly by construction.
///
/// Invariants validated on assembly:
///   - adjacency is symmetric and includes the diagonal,
///   - sum_{j in I(i)} c_ij = 0 for every i (relative to sum ||c_ij||),
///   - m_i > 0.
struct ConnectivityGraph
{
  int dim = 1;
  Discretization disc = Discretization::finite_volume;
  Topology topology = Topology::periodic;
  std::size_t n = 0;

  std::vector<double> m;                    // lumped mass per vertex
  std::vector<std::array<double, 2>> x;     // representative coordinates
  double volume = 0.0;                      // sum of m

  // CSR adjacency (cols sorted, diagonal included)
  std::vector<std::size_t> row;
  std::vector<std::size_t> col;
  std::vector<std::size_t> edge_of;         // undirected edge id, no_edge on diagonal
  std::vector<double> orient;               // +1 if row < col, -1 if row > col, 0 on diagonal

  // undirected edges, first < second
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::array<double, 2>> c_e;   // c_{ij} for i = first, j = second
  std::vector<double> beta_e;               // symmetric edge weights (default 1)
  std::vector<std::pair<std::size_t, std::size_t>> edge_slots;  // CSR slots (in row first, in row second)

  std::size_t max_degree = 0;               // max over i of card(I(i))

  std::size_t degree(std::size_t i) const { return row[i + 1] - row[i]; }
  std::size_t n_edges() const { return edges.size(); }

  /// c vector of CSR slot s (includes orientation sign; zero on diagonal).
  template <int D>
  Vec<D> c_slot(std::size_t s) const
  {
    Vec<D> v;
    if (edge_of[s] != no_edge)
    {
      const auto &ce = c_e[edge_of[s]];
      for (int ax = 0; ax < D; ax++)
      {
        v[ax] = orient[s] * ce[static_cast<std::size_t>(ax)];
      }
    }
    return v;
  }

  template <int D>
  Vec<D> c_edge(std::size_t e) const
  {
    Vec<D> v;
    for (int ax = 0; ax < D; ax++)
    {
      v[ax] = c_e[e][static_cast<std::size_t>(ax)];
    }
    return v;
  }

  template <int D>
  Vec<D> position(std::size_t i) const
  {
    Vec<D> v;
    for (int ax = 0; ax < D; ax++)
    {
      v[ax] = x[i][static_cast<std::size_t>(ax)];
    }
    return v;
  }
};

/// Consistent P1 mass matrix on the same sparsity pattern as the graph.
/// Row sums reproduce the lumped mass exactly (partition of unity).
struct ConsistentMass
{
  std::vector<double> diag;       // m_ii
  std::vector<double> offdiag_e;  // m_ij per undirected edge

  /// y = M u for per-vertex scalars.
  template <typename T>
  void apply(const ConnectivityGraph &g, const std::vector<T> &u, std::vector<T> &y) const
  {
    for (std::size_t i = 0; i < g.n; i++)
    {
      y[i] = diag[i] * u[i];
    }
    for (std::size_t e = 0; e < g.n_edges(); e++)
    {
      auto [i, j] = g.edges[e];
      y[i] += offdiag_e[e] * u[j];
      y[j] += offdiag_e[e] * u[i];
    }
  }
};

namespace detail
{

// Accumulates directed c contributions into symmetrized undirected storage:
// a contribution x to c_ij adds x/2 on the i<j orientation, so the final
// edge value is (c_ij - c_ji)/2 once both directions are visited.
struct GraphAccumulator
{
  std::map<std::pair<std::size_t, std::size_t>, std::array<double, 2>> acc;

  void add_directed(std::size_t i, std::size_t j, double cx, double cy)
  {
    if (i < j)
    {
      auto &v = acc[{i, j}];
      v[0] += 0.5 * cx;
      v[1] += 0.5 * cy;
    }
    else
    {
      auto &v = acc[{j, i}];
      v[0] -= 0.5 * cx;
      v[1] -= 0.5 * cy;
    }
  }

  // Full undirected contribution (used when c_ji = -c_ij is implied, e.g. a
  // finite volume face).
  void add_face(std::size_t i, std::size_t j, double cx, double cy)
  {
    add_directed(i, j, cx, cy);
    add_directed(j, i, -cx, -cy);
  }
};

inline void finalize_graph(ConnectivityGraph &g, GraphAccumulator &&accum)
{
  g.edges.clear();
  g.c_e.clear();
  g.edges.reserve(accum.acc.size());
  g.c_e.reserve(accum.acc.size());
  for (const auto &[key, val] : accum.acc)
  {
    g.edges.push_back(key);
    g.c_e.push_back(val);
  }
  g.beta_e.assign(g.edges.size(), 1.0);

  // CSR with diagonal, cols sorted ascending.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(g.n);
  for (std::size_t i = 0; i < g.n; i++)
  {
    adj[i].push_back({i, no_edge});
  }
  for (std::size_t e = 0; e < g.edges.size(); e++)
  {
    auto [i, j] = g.edges[e];
    adj[i].push_back({j, e});
    adj[j].push_back({i, e});
  }
  g.row.assign(g.n + 1, 0);
  g.col.clear();
  g.edge_of.clear();
  g.orient.clear();
  g.max_degree = 0;
  for (std::size_t i = 0; i < g.n; i++)
  {
    std::sort(adj[i].begin(), adj[i].end());
    g.row[i + 1] = g.row[i] + adj[i].size();
    g.max_degree = std::max(g.max_degree, adj[i].size());
    for (auto [j, e] : adj[i])
    {
      g.col.push_back(j);
      g.edge_of.push_back(e);
      g.orient.push_back(j == i ? 0.0 : (i < j ? 1.0 : -1.0));
    }
  }
  g.edge_slots.assign(g.n_edges(), {0, 0});
  for (std::size_t i = 0; i < g.n; i++)
  {
    for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
    {
      std::size_t e = g.edge_of[s];
      if (e != no_edge)
      {
        (i == g.edges[e].first ? g.edge_slots[e].first : g.edge_slots[e].second) = s;
      }
    }
  }

  g.volume = 0.0;
  for (std::size_t i = 0; i < g.n; i++)
  {
    if (!(g.m[i] > 0.0) || !std::isfinite(g.m[i]))
    {
      throw AssemblyError(detail::format_msg("vertex %zu has nonpositive mass %.3e", i, g.m[i]));
    }
    g.volume += g.m[i];
  }

  // Zero row sums, relative to the row's total |c|.
  for (std::size_t i = 0; i < g.n; i++)
  {
    double sx = 0.0, sy = 0.0, scale = 0.0;
    for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
    {
      if (g.edge_of[s] == no_edge)
      {
        continue;
      }
      const auto &ce = g.c_e[g.edge_of[s]];
      sx += g.orient[s] * ce[0];
      sy += g.orient[s] * ce[1];
      scale += std::hypot(ce[0], ce[1]);
    }
    double defect = std::hypot(sx, sy);
    if (defect > 1e-12 * std::max(scale, 1e-300))
    {
      throw AssemblyError(
          detail::format_msg("row %zu violates zero c sum: defect %.3e (scale %.3e)", i, defect, scale));
    }
  }
}

inline void check_cell_nodes(const MeshDescriptor &mesh, std::size_t c)
{
  int nv = mesh.nodes_per_cell();
  const auto &cell = mesh.cells[c];
  for (int a = 0; a < nv; a++)
  {
    int na = cell[static_cast<std::size_t>(a)];
    if (na < 0 || static_cast<std::size_t>(na) >= mesh.nodes.size())
    {
      throw AssemblyError(detail::format_msg("cell %zu references invalid node %d", c, na));
    }
    for (int b = a + 1; b < nv; b++)
    {
      if (na == cell[static_cast<std::size_t>(b)])
      {
        throw AssemblyError(detail::format_msg("cell %zu repeats node %d", c, na));
      }
    }
  }
}

}  // namespace detail

/// Finite volume graph: one vertex per cell, c_ij = (|face|/2) n_ij over the
/// shared face, c_ii = 0. Supports wrapped interval meshes and axis-aligned
/// quad meshes.
inline ConnectivityGraph build_fv_graph(const MeshDescriptor &mesh)
{
  if (mesh.kind == CellKind::triangle)
  {
    throw ConfigError("finite volume graphs support interval and quad cells only");
  }
  ConnectivityGraph g;
  g.dim = mesh.dim;
  g.disc = Discretization::finite_volume;
  g.topology = mesh.topology;
  g.n = mesh.cells.size();
  g.m.resize(g.n);
  g.x.resize(g.n);
  for (std::size_t c = 0; c < g.n; c++)
  {
    detail::check_cell_nodes(mesh, c);
    double meas = mesh.cell_measure(c);
    if (!(meas > 0.0) || !std::isfinite(meas))
    {
      throw AssemblyError(detail::format_msg("cell %zu has nonpositive measure %.3e", c, meas));
    }
    g.m[c] = meas;
    g.x[c] = mesh.cell_centroid(c);
  }

  detail::GraphAccumulator accum;
  if (mesh.kind == CellKind::interval)
  {
    // Faces are shared nodes; |face| = 1 in 1D.
    std::map<int, std::vector<std::size_t>> node_cells;
    for (std::size_t c = 0; c < g.n; c++)
    {
      node_cells[mesh.cells[c][0]].push_back(c);
      node_cells[mesh.cells[c][1]].push_back(c);
    }
    for (const auto &[node, cells] : node_cells)
    {
      if (cells.size() != 2)
      {
        throw AssemblyError(
            detail::format_msg("node %d is shared by %zu cells, mesh is not closed", node, cells.size()));
      }
      std::size_t a = cells[0], b = cells[1];
      // Normal points from a toward b.
      double dx = mesh.delta(g.x[a][0], g.x[b][0], 0);
      double nrm = dx > 0.0 ? 1.0 : -1.0;
      accum.add_face(a, b, 0.5 * nrm, 0.0);
    }
  }
  else
  {
    // Faces are shared (sorted) node pairs of quad cells.
    std::map<std::pair<int, int>, std::vector<std::size_t>> face_cells;
    for (std::size_t c = 0; c < g.n; c++)
    {
      const auto &cell = mesh.cells[c];
      for (int k = 0; k < 4; k++)
      {
        int a = cell[static_cast<std::size_t>(k)];
        int b = cell[static_cast<std::size_t>((k + 1) % 4)];
        face_cells[{std::min(a, b), std::max(a, b)}].push_back(c);
      }
    }
    for (const auto &[face, cells] : face_cells)
    {
      if (cells.size() != 2)
      {
        throw AssemblyError(detail::format_msg("face (%d,%d) is shared by %zu cells, mesh is not closed",
                                               face.first, face.second, cells.size()));
      }
      std::size_t a = cells[0], b = cells[1];
      const auto &p = mesh.nodes[static_cast<std::size_t>(face.first)];
      const auto &q = mesh.nodes[static_cast<std::size_t>(face.second)];
      double tx = mesh.delta(p[0], q[0], 0);
      double ty = mesh.delta(p[1], q[1], 1);
      double len = std::hypot(tx, ty);
      if (!(len > 0.0))
      {
        throw AssemblyError(detail::format_msg("face (%d,%d) has zero length", face.first, face.second));
      }
      // Unit normal oriented from cell a to cell b.
      double nx = -ty / len, ny = tx / len;
      double dx = mesh.delta(g.x[a][0], g.x[b][0], 0);
      double dy = mesh.delta(g.x[a][1], g.x[b][1], 1);
      if (nx * dx + ny * dy < 0.0)
      {
        nx = -nx;
        ny = -ny;
      }
      accum.add_face(a, b, 0.5 * len * nx, 0.5 * len * ny);
    }
  }
  detail::finalize_graph(g, std::move(accum));
  return g;
}

namespace detail
{

struct P1Element
{
  std::size_t nv;
  std::array<std::size_t, 3> ids;
  std::array<std::array<double, 2>, 3> grad;  // constant P1 gradients
  double measure;
};

inline P1Element p1_element(const MeshDescriptor &mesh, std::size_t c)
{
  check_cell_nodes(mesh, c);
  P1Element el{};
  auto xs = mesh.cell_coords(c);
  if (mesh.kind == CellKind::interval)
  {
    el.nv = 2;
    el.measure = xs[1][0] - xs[0][0];
    if (!(el.measure > 0.0))
    {
      throw AssemblyError(format_msg("cell %zu has nonpositive measure %.3e", c, el.measure));
    }
    el.grad[0] = {-1.0 / el.measure, 0.0};
    el.grad[1] = {1.0 / el.measure, 0.0};
  }
  else if (mesh.kind == CellKind::triangle)
  {
    el.nv = 3;
    el.measure = mesh.cell_measure(c);
    if (!(el.measure > 0.0))
    {
      throw AssemblyError(format_msg("cell %zu has nonpositive measure %.3e", c, el.measure));
    }
    for (int k = 0; k < 3; k++)
    {
      const auto &p1 = xs[static_cast<std::size_t>((k + 1) % 3)];
      const auto &p2 = xs[static_cast<std::size_t>((k + 2) % 3)];
      double ex = p2[0] - p1[0], ey = p2[1] - p1[1];
      el.grad[static_cast<std::size_t>(k)] = {-ey / (2.0 * el.measure), ex / (2.0 * el.measure)};
    }
  }
  else
  {
    throw ConfigError("continuous P1 graphs support interval and triangle cells only");
  }
  for (std::size_t k = 0; k < el.nv; k++)
  {
    el.ids[k] = static_cast<std::size_t>(mesh.cells[c][k]);
  }
  return el;
}

}  // namespace detail

/// Continuous P1 graph: one vertex per node, m_i = integral of the hat
/// function, c_ij = integral of phi_i grad phi_j (exact for P1), stored
/// symmetrized so c_ij = -c_ji holds to the bit.
inline ConnectivityGraph build_cg_p1_graph(const MeshDescriptor &mesh)
{
  ConnectivityGraph g;
  g.dim = mesh.dim;
  g.disc = Discretization::cg_p1;
  g.topology = mesh.topology;
  g.n = mesh.nodes.size();
  g.m.assign(g.n, 0.0);
  g.x = mesh.nodes;

  detail::GraphAccumulator accum;
  for (std::size_t c = 0; c < mesh.cells.size(); c++)
  {
    auto el = detail::p1_element(mesh, c);
    double w = el.measure / static_cast<double>(el.nv);  // integral of each phi over the cell
    for (std::size_t a = 0; a < el.nv; a++)
    {
      g.m[el.ids[a]] += w;
      for (std::size_t b = 0; b < el.nv; b++)
      {
        if (a != b)
        {
          accum.add_directed(el.ids[a], el.ids[b], w * el.grad[b][0], w * el.grad[b][1]);
        }
      }
    }
  }
  detail::finalize_graph(g, std::move(accum));
  return g;
}

/// Consistent P1 mass matrix; requires a cg_p1 graph built from the same
/// mesh. Validates that row sums reproduce the lumped mass.
inline ConsistentMass build_cg_consistent_mass(const MeshDescriptor &mesh, const ConnectivityGraph &g)
{
  if (g.disc != Discretization::cg_p1)
  {
    throw ConfigError("consistent mass requires a continuous P1 graph");
  }
  ConsistentMass mm;
  mm.diag.assign(g.n, 0.0);
  mm.offdiag_e.assign(g.n_edges(), 0.0);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    edge_index[g.edges[e]] = e;
  }
  for (std::size_t c = 0; c < mesh.cells.size(); c++)
  {
    auto el = detail::p1_element(mesh, c);
    // Exact P1 mass: |K| (1 + delta_ab) / ((d+1)(d+2)).
    double base = el.measure / static_cast<double>(el.nv * (el.nv + 1));
    for (std::size_t a = 0; a < el.nv; a++)
    {
      mm.diag[el.ids[a]] += 2.0 * base;
      for (std::size_t b = a + 1; b < el.nv; b++)
      {
        auto key = std::minmax(el.ids[a], el.ids[b]);
        auto it = edge_index.find({key.first, key.second});
        if (it == edge_index.end())
        {
          throw AssemblyError("mass matrix entry outside the graph sparsity pattern");
        }
        mm.offdiag_e[it->second] += base;
      }
    }
  }
  // Row sums must reproduce the lumped mass.
  std::vector<double> rowsum = mm.diag;
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    auto [i, j] = g.edges[e];
    rowsum[i] += mm.offdiag_e[e];
    rowsum[j] += mm.offdiag_e[e];
  }
  for (std::size_t i = 0; i < g.n; i++)
  {
    if (std::abs(rowsum[i] - g.m[i]) > 1e-12 * g.m[i])
    {
      throw AssemblyError(detail::format_msg("mass matrix row %zu sums to %.17g, lumped mass is %.17g", i,
                                             rowsum[i], g.m[i]));
    }
  }
  return mm;
}

/// Edge weights for the smoothness indicator and bound relaxation. The
/// stiffness choice stores |stiffness| entries and is only defined for
/// continuous P1 graphs; requesting it on a finite volume graph is a
/// configuration error.
inline void build_beta_weights(const MeshDescriptor &mesh, ConnectivityGraph &g, BetaWeights choice)
{
  if (choice == BetaWeights::ones)
  {
    g.beta_e.assign(g.n_edges(), 1.0);
    return;
  }
  if (g.disc != Discretization::cg_p1)
  {
    throw ConfigError("stiffness beta weights require a continuous P1 graph; finite volume uses ones");
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    edge_index[g.edges[e]] = e;
  }
  std::vector<double> raw(g.n_edges(), 0.0);
  for (std::size_t c = 0; c < mesh.cells.size(); c++)
  {
    auto el = detail::p1_element(mesh, c);
    for (std::size_t a = 0; a < el.nv; a++)
    {
      for (std::size_t b = a + 1; b < el.nv; b++)
      {
        double s = el.measure * (el.grad[a][0] * el.grad[b][0] + el.grad[a][1] * el.grad[b][1]);
        auto key = std::minmax(el.ids[a], el.ids[b]);
        raw[edge_index.at({key.first, key.second})] += s;
      }
    }
  }
  for (std::size_t e = 0; e < g.n_edges(); e++)
  {
    g.beta_e[e] = std::abs(raw[e]);
  }
}

/// Debug dump: <prefix>_edges.csv with one row per directed edge
/// (i,j,c_x[,c_y],beta) and <prefix>_vertices.csv with (i,m,x[,y]).
inline void dump_graph_csv(const ConnectivityGraph &g, const std::string &prefix)
{
  char buf[256];
  std::ofstream ef(prefix + "_edges.csv");
  if (!ef)
  {
    throw ConfigError("cannot open " + prefix + "_edges.csv for writing");
  }
  ef << (g.dim == 1 ? "i,j,c_x,beta\n" : "i,j,c_x,c_y,beta\n");
  for (std::size_t i = 0; i < g.n; i++)
  {
    for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
    {
      std::size_t e = g.edge_of[s];
      if (e == no_edge)
      {
        continue;
      }
      double cx = g.orient[s] * g.c_e[e][0];
      double cy = g.orient[s] * g.c_e[e][1];
      if (g.dim == 1)
      {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", i, g.col[s], cx, g.beta_e[e]);
      }
      else
      {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g\n", i, g.col[s], cx, cy, g.beta_e[e]);
      }
      ef << buf;
    }
  }
  std::ofstream vf(prefix + "_vertices.csv");
  if (!vf)
  {
    throw ConfigError("cannot open " + prefix + "_vertices.csv for writing");
  }
  vf << (g.dim == 1 ? "i,m,x\n" : "i,m,x,y\n");
  for (std::size_t i = 0; i < g.n; i++)
  {
    if (g.dim == 1)
    {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, g.m[i], g.x[i][0]);
    }
    else
    {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, g.m[i], g.x[i][0], g.x[i][1]);
    }
    vf << buf;
  }
}

}  // namespace hyperlim
