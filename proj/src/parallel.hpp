#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include <Eigen/Sparse>

namespace dgflow::detail {

using Triplets = std::vector<Eigen::Triplet<double>>;
using Scatter = std::vector<std::pair<int, double>>;

/// Runs fn(begin, end, chunk) over contiguous chunks of [0, n). Chunk results
/// merged in chunk order reproduce the serial loop order exactly.
template <class Fn>
void for_chunks(int n, int threads, int chunks, Fn&& fn) {
  if (chunks <= 1 || threads <= 1 || n < 2 * chunks) {
    fn(0, n, 0);
    for (int c = 1; c < chunks; ++c) fn(n, n, c);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  for (int c = 0; c < chunks; ++c) {
    const int b = static_cast<int>(static_cast<long>(n) * c / chunks);
    const int e = static_cast<int>(static_cast<long>(n) * (c + 1) / chunks);
    pool.emplace_back([&, b, e, c] {
      try {
        fn(b, e, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline int chunk_count(int threads) { return std::max(1, threads); }

inline void merge(Triplets& out, std::vector<Triplets>& parts) {
  std::size_t total = out.size();
  for (auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
    Triplets().swap(p);
  }
}

inline void apply(Eigen::VectorXd& out, const std::vector<Scatter>& parts) {
  for (const auto& p : parts) {
    for (const auto& [i, v] : p) out[i] += v;
  }
}

}  // namespace dgflow::detail
