// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>

namespace hyperlim
{

/// Fixed-size state/coordinate vector. Component count is a compile time
/// property of the system model (1 for scalars, 2 for 1D shallow water,
/// d+2 for Euler in d dimensions).
template <int N>
struct Vec
{
  static_assert(N >= 1);
  std::array<double, N> a{};

  constexpr Vec() = default;
  constexpr Vec(std::initializer_list<double> init)
  {
    int k = 0;
    for (double v : init)
    {
      if (k < N)
      {
        a[static_cast<std::size_t>(k)] = v;
      }
      ++k;
    }
  }

  static constexpr int size() { return N; }
  constexpr double &operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  constexpr Vec &operator+=(const Vec &o)
  {
    for (int i = 0; i < N; i++)
    {
      a[static_cast<std::size_t>(i)] += o[i];
    }
    return *this;
  }
  constexpr Vec &operator-=(const Vec &o)
  {
    for (int i = 0; i < N; i++)
    {
      a[static_cast<std::size_t>(i)] -= o[i];
    }
    return *this;
  }
  constexpr Vec &operator*=(double s)
  {
    for (int i = 0; i < N; i++)
    {
      a[static_cast<std::size_t>(i)] *= s;
    }
    return *this;
  }

  friend constexpr Vec operator+(Vec x, const Vec &y) { return x += y; }
  friend constexpr Vec operator-(Vec x, const Vec &y) { return x -= y; }
  friend constexpr Vec operator*(double s, Vec x) { return x *= s; }
  friend constexpr Vec operator*(Vec x, double s) { return x *= s; }
  friend constexpr Vec operator-(const Vec &x)
  {
    Vec r;
    for (int i = 0; i < N; i++)
    {
      r[i] = -x[i];
    }
    return r;
  }
};

template <int N>
constexpr double dot(const Vec<N> &x, const Vec<N> &y)
{
  double s = 0.0;
  for (int i = 0; i < N; i++)
  {
    s += x[i] * y[i];
  }
  return s;
}

template <int N>
inline double norm(const Vec<N> &x)
{
  return std::sqrt(dot(x, x));
}

template <int N>
inline double norm_inf(const Vec<N> &x)
{
  double s = 0.0;
  for (int i = 0; i < N; i++)
  {
    s = std::max(s, std::abs(x[i]));
  }
  return s;
}

/// Component-wise flux table: row k holds the d-vector flux of conserved
/// component k, so contracting with an edge vector yields a state vector.
template <int M, int D>
struct Mat
{
  std::array<Vec<D>, M> rows{};

  constexpr Vec<D> &row(int k) { return rows[static_cast<std::size_t>(k)]; }
  constexpr const Vec<D> &row(int k) const { return rows[static_cast<std::size_t>(k)]; }

  friend constexpr Mat operator+(const Mat &x, const Mat &y)
  {
    Mat r;
    for (int k = 0; k < M; k++)
    {
      r.rows[static_cast<std::size_t>(k)] =
          x.rows[static_cast<std::size_t>(k)] + y.rows[static_cast<std::size_t>(k)];
    }
    return r;
  }
  friend constexpr Mat operator-(const Mat &x, const Mat &y)
  {
    Mat r;
    for (int k = 0; k < M; k++)
    {
      r.rows[static_cast<std::size_t>(k)] =
          x.rows[static_cast<std::size_t>(k)] - y.rows[static_cast<std::size_t>(k)];
    }
    return r;
  }
};

/// Contraction (f · c): maps a flux table and a d-vector to a state vector.
template <int M, int D>
constexpr Vec<M> contract(const Mat<M, D> &f, const Vec<D> &c)
{
  Vec<M> r;
  for (int k = 0; k < M; k++)
  {
    r[k] = dot(f.rows[static_cast<std::size_t>(k)], c);
  }
  return r;
}

}  // namespace hyperlim
