// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>
#include "error.hpp"

namespace hyperlim
{

/// Explicit SSP Runge-Kutta scheme in alpha-beta form: stage k produces
///   w^(k+1) = sum_{j <= k} [ alpha_kj w^(j) + beta_kj dt L(w^(j)) ],
/// a convex combination of forward Euler substeps w^(j) + (beta/alpha) dt
/// L(w^(j)). Admissible tableaus need alpha >= 0, beta >= 0, unit row sums of
/// alpha, and alpha_kj > 0 wherever beta_kj > 0 (otherwise some term is not an
/// Euler substep and the convexity argument collapses). c_os is the CFL
/// amplification factor: substeps stay below dt_FE when dt <= c_os dt_FE.
struct AlphaBetaTableau
{
  std::string name;
  std::vector<std::vector<double>> alpha;  // alpha[k] holds k+1 entries
  std::vector<std::vector<double>> beta;
  std::vector<double> stage_time;          // time factor of stage state w^(k)
  double c_os = 0.0;                       // min over beta_kj > 0 of alpha_kj / beta_kj

  std::size_t stages() const { return alpha.size(); }
};

/// Structural validation; fills in c_os. Throws ConfigError on any violation,
/// e.g. for the classical midpoint rule whose alpha-beta form would need a
/// beta against a vanishing alpha.
inline void validate_tableau(AlphaBetaTableau &t)
{
  std::size_t s = t.alpha.size();
  if (s == 0 || t.beta.size() != s || t.stage_time.size() != s)
  {
    throw ConfigError("tableau must have matching alpha/beta/stage-time rows");
  }
  double c_os = std::numeric_limits<double>::infinity();
  bool any_beta = false;
  for (std::size_t k = 0; k < s; k++)
  {
    if (t.alpha[k].size() != k + 1 || t.beta[k].size() != k + 1)
    {
      throw ConfigError(detail::format_msg("tableau stage %zu must have %zu coefficients", k, k + 1));
    }
    double asum = 0.0;
    for (std::size_t j = 0; j <= k; j++)
    {
      double a = t.alpha[k][j];
      double b = t.beta[k][j];
      if (!(a >= 0.0) || !(b >= 0.0))
      {
        throw ConfigError(detail::format_msg("tableau coefficients must be nonnegative (stage %zu)", k));
      }
      if (b > 0.0 && a == 0.0)
      {
        throw ConfigError(detail::format_msg(
            "tableau stage %zu pairs beta = %.3g with alpha = 0: not a convex combination of Euler "
            "substeps",
            k, b));
      }
      if (b > 0.0)
      {
        any_beta = true;
        c_os = std::min(c_os, a / b);
      }
      asum += a;
    }
    if (std::abs(asum - 1.0) > 1e-14)
    {
      throw ConfigError(detail::format_msg("tableau stage %zu alpha row sums to %.17g, expected 1", k,
                                           asum));
    }
  }
  if (!any_beta)
  {
    throw ConfigError("tableau never applies the operator (all beta are zero)");
  }
  t.c_os = c_os;
}

/// Shipped schemes: forward Euler and the SSP Runge-Kutta families of orders
/// 2 and 3 (the four-stage third-order variant trades stages for c_os = 2).
inline AlphaBetaTableau builtin_tableau(const std::string &name)
{
  AlphaBetaTableau t;
  t.name = name;
  if (name == "fe" || name == "euler")
  {
    t.alpha = {{1.0}};
    t.beta = {{1.0}};
    t.stage_time = {0.0};
  }
  else if (name == "ssp22")
  {
    t.alpha = {{1.0}, {0.5, 0.5}};
    t.beta = {{1.0}, {0.0, 0.5}};
    t.stage_time = {0.0, 1.0};
  }
  else if (name == "ssp33")
  {
    t.alpha = {{1.0}, {0.75, 0.25}, {1.0 / 3.0, 0.0, 2.0 / 3.0}};
    t.beta = {{1.0}, {0.0, 0.25}, {0.0, 0.0, 2.0 / 3.0}};
    t.stage_time = {0.0, 1.0, 0.5};
  }
  else if (name == "ssp43")
  {
    t.alpha = {{1.0}, {0.0, 1.0}, {2.0 / 3.0, 0.0, 1.0 / 3.0}, {0.0, 0.0, 0.0, 1.0}};
    t.beta = {{0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0 / 6.0}, {0.0, 0.0, 0.0, 0.5}};
    t.stage_time = {0.0, 0.5, 1.0, 0.5};
  }
  else
  {
    throw ConfigError(detail::format_msg("unknown time scheme '%s' (use fe|ssp22|ssp33|ssp43)",
                                         name.c_str()));
  }
  validate_tableau(t);
  return t;
}

/// One SSP step. `substep(w, dt_sub, t_sub)` must return the (limited)
/// forward-Euler update of the field w; every stage is then the convex
/// combination prescribed by the tableau, so stagewise admissibility follows
/// from substep admissibility and convexity of the constraint sets.
template <typename State, typename Substep>
std::vector<State> ssp_step(const AlphaBetaTableau &tab, const std::vector<State> &U, double dt, double t,
                            Substep &&substep)
{
  std::vector<std::vector<State>> w;
  w.reserve(tab.stages() + 1);
  w.push_back(U);
  for (std::size_t k = 0; k < tab.stages(); k++)
  {
    std::vector<State> next(U.size());
    for (std::size_t j = 0; j <= k; j++)
    {
      double a = tab.alpha[k][j];
      double b = tab.beta[k][j];
      if (a == 0.0 && b == 0.0)
      {
        continue;
      }
      if (b == 0.0)
      {
        for (std::size_t i = 0; i < U.size(); i++)
        {
          next[i] += a * w[j][i];
        }
      }
      else
      {
        std::vector<State> sub = substep(w[j], (b / a) * dt, t + tab.stage_time[j] * dt);
        for (std::size_t i = 0; i < U.size(); i++)
        {
          next[i] += a * sub[i];
        }
      }
    }
    w.push_back(std::move(next));
  }
  return std::move(w.back());
}

}  // namespace hyperlim
