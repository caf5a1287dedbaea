// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include "error.hpp"

namespace hyperlim
{

/// Primitive state for the 1D gamma-law Riemann problem.
struct RiemannState
{
  double rho;
  double v;
  double p;
};

/// Exact solution of the gamma-law (b = 0) Riemann problem. Built as an
/// independent reference: the pressure function is solved with a bisection
/// safeguarded Newton iteration, and sample() evaluates the self-similar
/// solution by the standard case analysis.
class ExactRiemann
{
public:
  ExactRiemann(double gamma, RiemannState left, RiemannState right)
    : gamma_(gamma), L_(left), R_(right)
  {
    if (!(gamma > 1.0))
    {
      throw ConfigError("exact Riemann solver requires gamma > 1");
    }
    if (!(L_.rho > 0.0) || !(R_.rho > 0.0) || !(L_.p > 0.0) || !(R_.p > 0.0))
    {
      throw NumericsError("exact Riemann solver requires positive density and pressure");
    }
    cL_ = std::sqrt(gamma_ * L_.p / L_.rho);
    cR_ = std::sqrt(gamma_ * R_.p / R_.rho);
    if (2.0 * (cL_ + cR_) / (gamma_ - 1.0) <= R_.v - L_.v)
    {
      throw NumericsError("Riemann data generates vacuum");
    }
    solve_pressure();
  }

  double p_star() const { return p_star_; }
  double v_star() const { return v_star_; }
  double residual() const { return residual_; }

  /// Fastest signal speed: max(|leftmost|, |rightmost|) of the fan edges.
  double max_wave_speed() const
  {
    return std::max({-left_edge(), right_edge(), 0.0});
  }

  double left_edge() const  // leftmost signal
  {
    if (p_star_ > L_.p)
    {
      return shock_speed_left();
    }
    return L_.v - cL_;
  }

  double right_edge() const  // rightmost signal
  {
    if (p_star_ > R_.p)
    {
      return shock_speed_right();
    }
    return R_.v + cR_;
  }

  /// Self-similar solution at xi = x / t.
  RiemannState sample(double xi) const
  {
    if (xi <= v_star_)
    {
      return sample_left(xi);
    }
    return sample_right(xi);
  }

private:
  double gamma_;
  RiemannState L_, R_;
  double cL_, cR_;
  double p_star_ = 0.0, v_star_ = 0.0, residual_ = 0.0;

  // Toro's pressure function for one side: f(p) and f'(p).
  void side_function(double p, const RiemannState &s, double c, double &f, double &df) const
  {
    if (p > s.p)
    {
      double A = 2.0 / ((gamma_ + 1.0) * s.rho);
      double B = (gamma_ - 1.0) / (gamma_ + 1.0) * s.p;
      double root = std::sqrt(A / (p + B));
      f = (p - s.p) * root;
      df = root * (1.0 - 0.5 * (p - s.p) / (p + B));
    }
    else
    {
      double ex = (gamma_ - 1.0) / (2.0 * gamma_);
      f = 2.0 * c / (gamma_ - 1.0) * (std::pow(p / s.p, ex) - 1.0);
      df = std::pow(p / s.p, -(gamma_ + 1.0) / (2.0 * gamma_)) / (s.rho * c);
    }
  }

  double pressure_residual(double p, double &df) const
  {
    double fL, dLp, fR, dRp;
    side_function(p, L_, cL_, fL, dLp);
    side_function(p, R_, cR_, fR, dRp);
    df = dLp + dRp;
    return fL + fR + (R_.v - L_.v);
  }

  void solve_pressure()
  {
    // Two-rarefaction initial guess; f is monotone increasing in p with
    // f(0+) < 0 by the vacuum check, so a positive root exists and is
    // unique.
    double ex = (gamma_ - 1.0) / (2.0 * gamma_);
    double num = cL_ + cR_ - 0.5 * (gamma_ - 1.0) * (R_.v - L_.v);
    double p = 0.5 * (L_.p + R_.p);
    if (num > 0.0)
    {
      p = std::pow(num / (cL_ * std::pow(L_.p, -ex) + cR_ * std::pow(R_.p, -ex)), 1.0 / ex);
    }
    p = std::max(p, 1e-300);
    double lo = 0.0, hi = std::max({p, L_.p, R_.p});
    double df = 0.0;
    while (pressure_residual(hi, df) < 0.0)
    {
      lo = hi;
      hi *= 4.0;
      if (!std::isfinite(hi))
      {
        throw NumericsError("exact Riemann pressure bracket failed");
      }
    }
    p = std::clamp(p, lo, hi);
    for (int it = 0; it < 200; it++)
    {
      double f = pressure_residual(p, df);
      if (f > 0.0)
      {
        hi = p;
      }
      else
      {
        lo = p;
      }
      double step = df > 0.0 ? f / df : 0.0;
      double p_new = p - step;
      if (!(p_new > lo) || !(p_new < hi))
      {
        p_new = 0.5 * (lo + hi);
      }
      double change = std::abs(p_new - p);
      p = p_new;
      if (change <= 1e-15 * p && it > 1)
      {
        break;
      }
    }
    p_star_ = p;
    residual_ = std::abs(pressure_residual(p, df));
    double fL, dLp, fR, dRp;
    side_function(p, L_, cL_, fL, dLp);
    side_function(p, R_, cR_, fR, dRp);
    v_star_ = 0.5 * (L_.v + R_.v) + 0.5 * (fR - fL);
  }

  double shock_speed_left() const
  {
    double g1 = (gamma_ + 1.0) / (2.0 * gamma_);
    double g2 = (gamma_ - 1.0) / (2.0 * gamma_);
    return L_.v - cL_ * std::sqrt(g1 * p_star_ / L_.p + g2);
  }

  double shock_speed_right() const
  {
    double g1 = (gamma_ + 1.0) / (2.0 * gamma_);
    double g2 = (gamma_ - 1.0) / (2.0 * gamma_);
    return R_.v + cR_ * std::sqrt(g1 * p_star_ / R_.p + g2);
  }

  RiemannState sample_left(double xi) const
  {
    double gm = gamma_ - 1.0, gp = gamma_ + 1.0;
    if (p_star_ > L_.p)
    {
      double s = shock_speed_left();
      if (xi <= s)
      {
        return L_;
      }
      double ratio = p_star_ / L_.p;
      double rho = L_.rho * (ratio + gm / gp) / (gm / gp * ratio + 1.0);
      return {rho, v_star_, p_star_};
    }
    double head = L_.v - cL_;
    if (xi <= head)
    {
      return L_;
    }
    double c_star = cL_ * std::pow(p_star_ / L_.p, gm / (2.0 * gamma_));
    double tail = v_star_ - c_star;
    if (xi >= tail)
    {
      double rho = L_.rho * std::pow(p_star_ / L_.p, 1.0 / gamma_);
      return {rho, v_star_, p_star_};
    }
    // Inside the left fan.
    double v = (2.0 / gp) * (cL_ + 0.5 * gm * L_.v + xi);
    double c = cL_ - 0.5 * gm * (v - L_.v);
    double rho = L_.rho * std::pow(c / cL_, 2.0 / gm);
    double p = L_.p * std::pow(c / cL_, 2.0 * gamma_ / gm);
    return {rho, v, p};
  }

  RiemannState sample_right(double xi) const
  {
    double gm = gamma_ - 1.0, gp = gamma_ + 1.0;
    if (p_star_ > R_.p)
    {
      double s = shock_speed_right();
      if (xi >= s)
      {
        return R_;
      }
      double ratio = p_star_ / R_.p;
      double rho = R_.rho * (ratio + gm / gp) / (gm / gp * ratio + 1.0);
      return {rho, v_star_, p_star_};
    }
    double head = R_.v + cR_;
    if (xi >= head)
    {
      return R_;
    }
    double c_star = cR_ * std::pow(p_star_ / R_.p, gm / (2.0 * gamma_));
    double tail = v_star_ + c_star;
    if (xi <= tail)
    {
      double rho = R_.rho * std::pow(p_star_ / R_.p, 1.0 / gamma_);
      return {rho, v_star_, p_star_};
    }
    // Inside the right fan.
    double v = (2.0 / gp) * (-cR_ + 0.5 * gm * R_.v + xi);
    double c = cR_ + 0.5 * gm * (v - R_.v);
    double rho = R_.rho * std::pow(c / cR_, 2.0 / gm);
    double p = R_.p * std::pow(c / cR_, 2.0 * gamma_ / gm);
    return {rho, v, p};
  }
};

/// Exact self-similar solution of the Burgers Riemann problem at xi = x/t:
/// a shock at speed (uL+uR)/2 for uL > uR, otherwise a rarefaction fan.
inline double burgers_riemann(double uL, double uR, double xi)
{
  if (uL > uR)
  {
    double s = 0.5 * (uL + uR);
    return xi < s ? uL : uR;
  }
  if (xi <= uL)
  {
    return uL;
  }
  if (xi >= uR)
  {
    return uR;
  }
  return xi;
}

}  // namespace hyperlim
