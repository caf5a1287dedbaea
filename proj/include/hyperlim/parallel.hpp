// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace hyperlim
{

/// Worker cap: hardware concurrency clamped by the HYPERLIM_THREADS
/// environment variable. Always at least 1.
inline unsigned max_threads()
{
  static const unsigned cached = []()
  {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0)
    {
      hw = 1;
    }
    if (const char *env = std::getenv("HYPERLIM_THREADS"))
    {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && static_cast<unsigned>(v) < hw)
      {
        hw = static_cast<unsigned>(v);
      }
    }
    return hw;
  }();
  return cached;
}

namespace detail
{

// Work is split into a fixed number of chunks independent of the worker
// count, so reductions that combine per-chunk results in chunk order are
// bit-identical for any HYPERLIM_THREADS setting.
constexpr std::size_t chunk_count = 64;
constexpr std::size_t serial_cutoff = 2048;

template <typename Body>
void run_chunks(std::size_t n, Body &&body)
{
  if (n == 0)
  {
    return;
  }
  const std::size_t chunks = std::min(chunk_count, n);
  const std::size_t per = (n + chunks - 1) / chunks;
  unsigned workers = std::min<std::size_t>(max_threads(), chunks);
  if (n <= serial_cutoff || workers <= 1)
  {
    for (std::size_t c = 0; c < chunks; c++)
    {
      body(c, std::min(c * per, n), std::min((c + 1) * per, n));
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; w++)
  {
    pool.emplace_back(
        [&, w]()
        {
          for (std::size_t c = w; c < chunks; c += workers)
          {
            body(c, std::min(c * per, n), std::min((c + 1) * per, n));
          }
        });
  }
  for (auto &t : pool)
  {
    t.join();
  }
}

}  // namespace detail

/// Apply body(i) for i in [0, n). Bodies must write disjoint locations.
template <typename Body>
void parallel_for(std::size_t n, Body &&body)
{
  detail::run_chunks(n,
                     [&](std::size_t, std::size_t lo, std::size_t hi)
                     {
                       for (std::size_t i = lo; i < hi; i++)
                       {
                         body(i);
                       }
                     });
}

/// Deterministic reduction: body(i) values are folded with combine within a
/// chunk and the per-chunk results are folded in chunk order.
template <typename T, typename Body, typename Combine>
T parallel_reduce(std::size_t n, T init, Body &&body, Combine &&combine)
{
  const std::size_t chunks = std::min(detail::chunk_count, std::max<std::size_t>(n, 1));
  std::vector<T> partial(chunks, init);
  detail::run_chunks(n,
                     [&](std::size_t c, std::size_t lo, std::size_t hi)
                     {
                       T acc = init;
                       for (std::size_t i = lo; i < hi; i++)
                       {
                         acc = combine(acc, body(i));
                       }
                       partial[c] = acc;
                     });
  T acc = init;
  for (std::size_t c = 0; c < chunks; c++)
  {
    acc = combine(acc, partial[c]);
  }
  return acc;
}

}  // namespace hyperlim
