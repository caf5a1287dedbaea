// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include "../vec.hpp"

namespace hyperlim
{

/// A hyperbolic system u_t + div f(u) = S(u). Models provide the flux, a
/// guaranteed upper bound on the fastest wave in the 1D Riemann problem
/// along a unit direction, admissibility of states, source terms with their
/// stability time scale tau0, and at least one convex entropy pair.
template <typename M>
concept SystemModel = requires(const M m, const typename M::State u, const Vec<M::dim> n, std::size_t i,
                               int k) {
  { M::n_comp } -> std::convertible_to<int>;
  { M::dim } -> std::convertible_to<int>;
  requires std::same_as<typename M::State, Vec<M::n_comp>>;
  { m.name() } -> std::convertible_to<std::string>;
  { m.component_name(k) } -> std::convertible_to<std::string>;
  { m.flux(u) } -> std::same_as<Mat<M::n_comp, M::dim>>;
  { m.max_wave_speed(n, u, u) } -> std::convertible_to<double>;
  { m.admissible(u) } -> std::convertible_to<bool>;
  { m.has_source() } -> std::convertible_to<bool>;
  { m.source(u, i) } -> std::same_as<typename M::State>;
  { m.tau0() } -> std::convertible_to<double>;
  { m.n_entropies() } -> std::convertible_to<int>;
  { m.entropy(k, u) } -> std::convertible_to<double>;
  { m.entropy_flux(k, u) } -> std::same_as<Vec<M::dim>>;
  { m.entropy_grad(k, u) } -> std::same_as<typename M::State>;
};

constexpr double infinite_tau0 = std::numeric_limits<double>::infinity();

}  // namespace hyperlim
