// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>
#include "error.hpp"
#include "graph.hpp"
#include "low_order.hpp"
#include "mesh.hpp"
#include "systems/model.hpp"

namespace hyperlim
{

namespace detail
{

/// Shortest round-trip decimal representation.
inline std::string fmt_full(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw ConfigError(detail::format_msg("cannot open output file '%s'", path.c_str()));
  }
  return out;
}

}  // namespace detail

/// One row per vertex: x[,y],<component names...>.
template <SystemModel Model>
void write_snapshot_csv(const std::string &path, const ConnectivityGraph &g, const Model &model,
                        const Field<Model> &U)
{
  std::ofstream out = detail::open_out(path);
  out << "x";
  if (g.dim == 2)
  {
    out << ",y";
  }
  for (int k = 0; k < Model::n_comp; k++)
  {
    out << "," << model.component_name(k);
  }
  out << "\n";
  for (std::size_t i = 0; i < g.n; i++)
  {
    out << detail::fmt_full(g.x[i][0]);
    if (g.dim == 2)
    {
      out << "," << detail::fmt_full(g.x[i][1]);
    }
    for (int k = 0; k < Model::n_comp; k++)
    {
      out << "," << detail::fmt_full(U[i][k]);
    }
    out << "\n";
  }
}

/// Generic numeric table with a caller-supplied header.
inline void write_table_csv(const std::string &path, const std::vector<std::string> &header,
                            const std::vector<std::vector<double>> &rows)
{
  std::ofstream out = detail::open_out(path);
  for (std::size_t c = 0; c < header.size(); c++)
  {
    out << (c ? "," : "") << header[c];
  }
  out << "\n";
  for (const auto &row : rows)
  {
    for (std::size_t c = 0; c < row.size(); c++)
    {
      out << (c ? "," : "") << detail::fmt_full(row[c]);
    }
    out << "\n";
  }
}

/// Key/value run summary, one `key: value` per line.
inline void write_summary(const std::string &path,
                          const std::vector<std::pair<std::string, std::string>> &entries)
{
  std::ofstream out = detail::open_out(path);
  for (const auto &[k, v] : entries)
  {
    out << k << ": " << v << "\n";
  }
}

/// Legacy-ASCII VTK point data (2D): the vertices as a point cloud with one
/// scalar array per component. Intended for quick visual checks.
template <SystemModel Model>
void write_vtk_points_2d(const std::string &path, const ConnectivityGraph &g, const Model &model,
                         const Field<Model> &U)
{
  std::ofstream out = detail::open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "hyperlim snapshot\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << g.n << " double\n";
  for (std::size_t i = 0; i < g.n; i++)
  {
    out << detail::fmt_full(g.x[i][0]) << " " << detail::fmt_full(g.x[i][1]) << " 0\n";
  }
  out << "CELLS " << g.n << " " << 2 * g.n << "\n";
  for (std::size_t i = 0; i < g.n; i++)
  {
    out << "1 " << i << "\n";
  }
  out << "CELL_TYPES " << g.n << "\n";
  for (std::size_t i = 0; i < g.n; i++)
  {
    out << "1\n";  // VTK_VERTEX
  }
  out << "POINT_DATA " << g.n << "\n";
  for (int k = 0; k < Model::n_comp; k++)
  {
    out << "SCALARS " << model.component_name(k) << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < g.n; i++)
    {
      out << detail::fmt_full(U[i][k]) << "\n";
    }
  }
}

}  // namespace hyperlim
