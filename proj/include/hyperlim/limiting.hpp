// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>
#include "constraints.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "low_order.hpp"
#include "parallel.hpp"
#include "systems/model.hpp"
#include "vec.hpp"

namespace hyperlim
{

// --- Scalar line searches -----------------------------------------------------

/// Largest L >= 0 such that a l^2 + b l + c >= 0 on all of [0, L], for c >= 0.
/// Returns +inf when the polynomial never turns negative.
inline double quadratic_max_ell(double a, double b, double c)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c < 0.0)
  {
    return 0.0;
  }
  if (c == 0.0)
  {
    // g(l) = l (a l + b): the sign near 0+ is the sign of b.
    if (b > 0.0)
    {
      return a < 0.0 ? -b / a : inf;
    }
    if (b == 0.0)
    {
      return a >= 0.0 ? inf : 0.0;
    }
    return 0.0;
  }
  if (a == 0.0)
  {
    return b >= 0.0 ? inf : -c / b;
  }
  double disc = b * b - 4.0 * a * c;
  if (a > 0.0)
  {
    if (disc <= 0.0)
    {
      return inf;  // no real roots and g(0) > 0
    }
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + std::copysign(sq, b));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : r1;
    double lo = std::min(r1, r2);
    double hi = std::max(r1, r2);
    if (hi <= 0.0)
    {
      return inf;  // both roots behind us
    }
    return lo > 0.0 ? lo : hi;  // g(0) > 0 puts 0 outside (lo, hi)
  }
  // a < 0 with g(0) > 0: exactly one positive root.
  double sq = std::sqrt(std::max(disc, 0.0));
  double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  return std::max(r1, r2);
}

struct NewtonSecantResult
{
  double ell = 0.0;
  int iters = 0;
};

/// Newton-secant root bracketing for a concave g with g(0) >= 0 > g(l_right):
/// the left end advances by secant steps (which stay below the root by
/// concavity), the right end by Newton steps (which stay above). Each
/// candidate is assigned to the bracket side matching its sign, with a
/// midpoint fallback when a step degenerates, so the bracket always shrinks
/// even when roundoff flips a sign near the root. Returns the left iterate,
/// so g(result.ell) >= 0 holds regardless of the tolerance; the bracket width
/// at exit bounds |ell - ell*| by tol.
template <typename G, typename GP>
NewtonSecantResult newton_secant(G &&g, GP &&gp, double l_right, double tol = 1e-10, int kmax = 20)
{
  double ll = 0.0;
  double lr = l_right;
  double gl = g(ll);
  double gr = g(lr);
  if (gl <= 0.0)
  {
    return {0.0, 0};
  }
  if (gr >= 0.0)
  {
    return {lr, 0};
  }
  auto place = [&](double cand, double gc)
  {
    (gc >= 0.0 ? ll : lr) = cand;
    (gc >= 0.0 ? gl : gr) = gc;
  };
  int k = 0;
  while (k < kmax && lr - ll > tol)
  {
    k++;
    double slope = (gr - gl) / (lr - ll);
    double cand = slope < 0.0 ? ll - gl / slope : 0.5 * (ll + lr);
    if (!(cand > ll && cand < lr))
    {
      cand = 0.5 * (ll + lr);
    }
    double gc = g(cand);
    if (gc == 0.0)
    {
      return {cand, k};  // the root to machine precision; bracketing cannot improve it
    }
    place(cand, gc);
    double deriv = gp(lr);
    if (deriv < 0.0)
    {
      cand = lr - gr / deriv;
      if (cand > ll && cand < lr)
      {
        gc = g(cand);
        if (gc == 0.0)
        {
          return {cand, k};
        }
        place(cand, gc);
      }
    }
  }
  return {ll, k};
}

/// Bisection fallback for generic quasiconcave slacks; same bracket contract
/// as newton_secant, returning the feasible left end.
template <typename G>
double bisection_max_ell(G &&g, double l_right, double tol = 1e-10, int kmax = 100)
{
  double ll = 0.0;
  double lr = l_right;
  if (g(ll) < 0.0)
  {
    return 0.0;
  }
  if (g(lr) >= 0.0)
  {
    return lr;
  }
  for (int k = 0; k < kmax && lr - ll > tol; k++)
  {
    double mid = 0.5 * (ll + lr);
    (g(mid) >= 0.0 ? ll : lr) = mid;
  }
  return ll;
}

// --- Bounds ---------------------------------------------------------------------

/// Per-constraint, per-vertex lower bounds Psi_i^min = min over the convex
/// decomposition states of the low-order update: U_i itself, U_i + 2 dt S_i,
/// and the bar states toward every neighbor.
struct BoundSet
{
  std::vector<std::vector<double>> psi_min;  // [constraint][vertex]
};

template <SystemModel Model>
BoundSet compute_bounds(const ConnectivityGraph &g, const Model &model,
                        const std::vector<ConstraintFunctional<Model>> &constraints,
                        const Field<Model> &U, const Field<Model> &bar, double dt,
                        const Field<Model> &src)
{
  double tau0 = model.tau0();
  if (std::isfinite(tau0) && 2.0 * dt > tau0 * (1.0 + 1e-12))
  {
    throw InvariantError(detail::format_msg("bound states need 2 dt <= tau0, got 2 dt = %.3e", 2.0 * dt));
  }
  BoundSet bounds;
  bounds.psi_min.resize(constraints.size());
  for (std::size_t l = 0; l < constraints.size(); l++)
  {
    const auto &c = constraints[l];
    auto &out = bounds.psi_min[l];
    out.resize(g.n);
    parallel_for(g.n,
                 [&](std::size_t i)
                 {
                   auto eval = [&](const typename Model::State &u)
                   {
                     if (!c.in_domain(u))
                     {
                       throw InvariantError(detail::format_msg(
                           "state outside the domain of constraint %s near vertex %zu", c.name.c_str(),
                           i));
                     }
                     return c.value(u);
                   };
                   double best = eval(U[i]);
                   best = std::min(best, eval(U[i] + (2.0 * dt) * src[i]));
                   for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                   {
                     std::size_t e = g.edge_of[s];
                     if (e != no_edge)
                     {
                       best = std::min(best, eval(bar[e]));
                     }
                   }
                   out[i] = best;
                 });
  }
  return bounds;
}

struct RelaxationParams
{
  double exponent = 1.5;  // delta in r_i = (m_i/|D|)^(delta/d), must lie in (0, 2)
};

/// Mesh-size-dependent bound relaxation restoring high-order accuracy at
/// smooth extrema: Psi_i^min is lowered by a second-difference estimate,
/// guarded so sign-definite bounds never cross zero,
///   relaxed = max( (1 - sign(Psi) r_i) Psi, Psi - |avg second difference| ).
inline void relax_bounds(const ConnectivityGraph &g, BoundSet &bounds, const RelaxationParams &p = {})
{
  if (!(p.exponent > 0.0 && p.exponent < 2.0))
  {
    throw ConfigError("relaxation exponent must lie in (0, 2)");
  }
  for (auto &psi : bounds.psi_min)
  {
    std::vector<double> d2(g.n, 0.0);
    parallel_for(g.n,
                 [&](std::size_t i)
                 {
                   double num = 0.0;
                   double den = 0.0;
                   for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                   {
                     std::size_t j = g.col[s];
                     if (j == i)
                     {
                       continue;
                     }
                     double b = g.beta_e[g.edge_of[s]];
                     num += b * (psi[j] - psi[i]);
                     den += b;
                   }
                   d2[i] = den != 0.0 ? num / den : 0.0;
                 });
    std::vector<double> relaxed(g.n);
    parallel_for(g.n,
                 [&](std::size_t i)
                 {
                   double avg = 0.0;
                   for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                   {
                     std::size_t j = g.col[s];
                     if (j != i)
                     {
                       avg += 0.5 * d2[i] + 0.5 * d2[j];
                     }
                   }
                   avg /= 2.0 * static_cast<double>(g.degree(i));
                   double r = std::pow(g.m[i] / g.volume, p.exponent / static_cast<double>(g.dim));
                   double sign = psi[i] > 0.0 ? 1.0 : (psi[i] < 0.0 ? -1.0 : 0.0);
                   relaxed[i] = std::max((1.0 - sign * r) * psi[i], psi[i] - std::abs(avg));
                 });
    psi.swap(relaxed);
  }
}

// --- Corrections and the limited update ------------------------------------------

/// Antidiffusive corrections A_ij = dt (F^L_ij - F^H_ij) on the i < j
/// orientation; by flux skew-symmetry A_ij = -A_ji, and
/// m_i (U^H_i - U^L_i) = sum_j A_ij holds exactly.
template <int N>
std::vector<Vec<N>> compute_corrections(const ConnectivityGraph &g, const std::vector<Vec<N>> &FL,
                                        const std::vector<Vec<N>> &FH, double dt)
{
  std::vector<Vec<N>> A(g.n_edges());
  parallel_for(g.n_edges(), [&](std::size_t e) { A[e] = dt * (FL[e] - FH[e]); });
  return A;
}

/// Debug check of the reconstruction identity m_i U^H_i = m_i U^L_i + sum_j A_ij.
template <int N>
void check_correction_identity(const ConnectivityGraph &g, const std::vector<Vec<N>> &A,
                               const std::vector<Vec<N>> &UL, const std::vector<Vec<N>> &UH,
                               double rel_tol = 1e-12)
{
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 Vec<N> acc{};
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e != no_edge)
                   {
                     acc += g.orient[s] * A[e];
                   }
                 }
                 Vec<N> lhs = UL[i] + (1.0 / g.m[i]) * acc;
                 double scale = 1.0 + norm_inf(UL[i]) + norm_inf(UH[i]);
                 if (norm_inf(lhs - UH[i]) > rel_tol * scale)
                 {
                   throw InvariantError(detail::format_msg(
                       "correction identity violated at vertex %zu by %.3e", i, norm_inf(lhs - UH[i])));
                 }
               });
}

struct LimiterParams
{
  double tol = 1e-10;      // line search tolerance
  int newton_kmax = 20;    // Newton-secant iteration cap
  double pre_slack = 1e-9; // tolerated relative infeasibility of U^L at the bounds
  bool debug_checks = false;
};

struct LimiterStats
{
  double ell_min = 1.0;
  double ell_mean = 1.0;
};

template <SystemModel Model>
struct LimitResult
{
  Field<Model> U;
  std::vector<double> ell;  // per undirected edge
  LimiterStats stats;
};

namespace detail
{

/// Largest l in [0, upper] keeping constraint c satisfied along W + l P
/// against `bound`. Dispatches on the constraint kind; `upper` realizes both
/// the running multi-constraint clamp and the transform-validity cap.
template <SystemModel Model>
double constrained_step(const ConstraintFunctional<Model> &c, const typename Model::State &W,
                        const typename Model::State &P, double bound, double upper,
                        const LimiterParams &prm, std::size_t vertex)
{
  using Kind = typename ConstraintFunctional<Model>::Kind;
  if (!(upper > 0.0))
  {
    return 0.0;
  }
  switch (c.kind)
  {
    case Kind::linear:
    {
      double slack = c.value(W) - bound;
      double slope = c.value(P);  // homogeneous linear functional
      if (slack < 0.0)
      {
        if (slack < -prm.pre_slack * (1.0 + std::abs(bound)))
        {
          throw InvariantError(detail::format_msg(
              "limiter precondition failed: constraint %s infeasible at vertex %zu (slack %.3e)",
              c.name.c_str(), vertex, slack));
        }
        slack = 0.0;
      }
      if (slope >= 0.0)
      {
        return upper;
      }
      return std::min(upper, slack / -slope);
    }
    case Kind::quadratic:
    {
      QuadCoeffs q = c.quad(W, P, bound);
      if (q.c < 0.0)
      {
        if (q.c < -prm.pre_slack * (1.0 + std::abs(q.a) + std::abs(q.b) + std::abs(q.c)))
        {
          throw InvariantError(detail::format_msg(
              "limiter precondition failed: constraint %s infeasible at vertex %zu (slack %.3e)",
              c.name.c_str(), vertex, q.c));
        }
        q.c = 0.0;
      }
      double ell = std::min(upper, quadratic_max_ell(q.a, q.b, q.c));
      if (prm.debug_checks)
      {
        for (int k = 0; k <= 100; k++)
        {
          double l = ell * static_cast<double>(k) / 100.0;
          double val = (q.a * l + q.b) * l + q.c;
          if (val < -1e-11 * (1.0 + std::abs(q.a) + std::abs(q.b) + std::abs(q.c)))
          {
            throw InvariantError(detail::format_msg(
                "quadratic search for %s returned an infeasible interval at vertex %zu (g(%.3e) = %.3e)",
                c.name.c_str(), vertex, l, val));
          }
        }
      }
      return ell;
    }
    case Kind::concave:
    {
      auto gfun = [&](double l) { return c.g(W, P, l, bound); };
      auto gpfun = [&](double l) { return c.gp(W, P, l, bound); };
      double g0 = gfun(0.0);
      if (g0 < 0.0 && g0 < -prm.pre_slack * (1.0 + std::abs(bound)))
      {
        throw InvariantError(detail::format_msg(
            "limiter precondition failed: constraint %s infeasible at vertex %zu (slack %.3e)",
            c.name.c_str(), vertex, g0));
      }
      if (gfun(upper) >= 0.0)
      {
        return upper;
      }
      return newton_secant(gfun, gpfun, upper, prm.tol, prm.newton_kmax).ell;
    }
    case Kind::generic:
    default:
    {
      auto gfun = [&](double l) { return c.g(W, P, l, bound); };
      return bisection_max_ell(gfun, upper, prm.tol);
    }
  }
}

}  // namespace detail

/// Two-pass convex limiter. Pass 1 computes directed limiters l^i_j: for each
/// vertex the constraints are processed in their nested-admissible-set order;
/// each constraint first caps a vertex limiter along the mean direction
/// U^H_i - U^L_i, then refines it per neighbor along P_ij = A_ij/(m_i lam),
/// always clamped by the running value (so earlier constraints keep holding on
/// the whole remaining segment and transformed searches stay valid). Pass 2
/// symmetrizes l_ij = min(l^i_j, l^j_i) and applies
///   U^{n+1}_i = U^L_i + (1/m_i) sum_j l_ij A_ij.
template <SystemModel Model>
LimitResult<Model> limit_step(const ConnectivityGraph &g,
                              const std::vector<ConstraintFunctional<Model>> &constraints,
                              const Field<Model> &UL, const Field<Model> &A, const BoundSet &bounds,
                              const LimiterParams &prm = {})
{
  std::vector<double> lcand(g.col.size(), 1.0);  // directed l^i_j per CSR slot
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 std::size_t nb = g.degree(i) - 1;
                 if (nb == 0)
                 {
                   return;
                 }
                 typename Model::State mean_dir{};
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e != no_edge)
                   {
                     mean_dir += g.orient[s] * A[e];
                   }
                 }
                 mean_dir = (1.0 / g.m[i]) * mean_dir;  // = U^H_i - U^L_i

                 double l_vertex = 1.0;
                 for (std::size_t l = 0; l < constraints.size(); l++)
                 {
                   const auto &c = constraints[l];
                   double bound = bounds.psi_min[l][i];
                   l_vertex = detail::constrained_step<Model>(c, UL[i], mean_dir, bound, l_vertex, prm, i);
                   for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                   {
                     std::size_t e = g.edge_of[s];
                     if (e == no_edge)
                     {
                       continue;
                     }
                     typename Model::State P =
                         (static_cast<double>(nb) * g.orient[s] / g.m[i]) * A[e];
                     double upper = std::min(lcand[s], l_vertex);
                     lcand[s] = detail::constrained_step<Model>(c, UL[i], P, bound, upper, prm, i);
                   }
                 }
               });

  LimitResult<Model> out;
  out.ell.resize(g.n_edges());
  parallel_for(g.n_edges(),
               [&](std::size_t e)
               { out.ell[e] = std::min(lcand[g.edge_slots[e].first], lcand[g.edge_slots[e].second]); });

  out.U.resize(g.n);
  parallel_for(g.n,
               [&](std::size_t i)
               {
                 typename Model::State acc{};
                 for (std::size_t s = g.row[i]; s < g.row[i + 1]; s++)
                 {
                   std::size_t e = g.edge_of[s];
                   if (e != no_edge)
                   {
                     acc += (out.ell[e] * g.orient[s]) * A[e];
                   }
                 }
                 out.U[i] = UL[i] + (1.0 / g.m[i]) * acc;
               });

  if (!out.ell.empty())
  {
    double lo = out.ell[0];
    double sum = 0.0;
    for (double v : out.ell)
    {
      lo = std::min(lo, v);
      sum += v;
    }
    out.stats.ell_min = lo;
    out.stats.ell_mean = sum / static_cast<double>(out.ell.size());
  }
  return out;
}

struct ConstraintReport
{
  std::string name;
  double min_slack = 0.0;          // min over vertices of Psi(U_i) - bound_i
  double min_relative_slack = 0.0; // same, scaled by 1 + |bound| + |Psi|
  std::size_t argmin = 0;
};

/// Post-hoc verification that a field satisfies the bounds of every constraint.
template <SystemModel Model>
std::vector<ConstraintReport> check_limited(const ConnectivityGraph &g,
                                            const std::vector<ConstraintFunctional<Model>> &constraints,
                                            const BoundSet &bounds, const Field<Model> &U)
{
  std::vector<ConstraintReport> reports;
  reports.reserve(constraints.size());
  for (std::size_t l = 0; l < constraints.size(); l++)
  {
    const auto &c = constraints[l];
    ConstraintReport rep;
    rep.name = c.name;
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.min_relative_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.n; i++)
    {
      double psi = c.value(U[i]);
      double slack = psi - bounds.psi_min[l][i];
      double rel = slack / (1.0 + std::abs(bounds.psi_min[l][i]) + std::abs(psi));
      if (rel < rep.min_relative_slack)
      {
        rep.min_relative_slack = rel;
        rep.min_slack = slack;
        rep.argmin = i;
      }
    }
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace hyperlim
