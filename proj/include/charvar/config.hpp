#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "charvar/bigint.hpp"
#include "charvar/error.hpp"

namespace charvar {

// Resource bounds shared by every enumeration kernel.
struct Limits {
  // Matrix-group enumerations (class tables, commutator passes).
  std::uint64_t max_group_order = 100'000'000;
  // Tuple / filter iterations for brute-force and representation scans.
  std::uint64_t max_iterations = 1'000'000'000;
  unsigned workers = 1;

  // CHARVAR_MAX_ITER overrides both iteration bounds.
  static Limits from_environment() {
    Limits limits;
    if (const char* env = std::getenv("CHARVAR_MAX_ITER")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0') {
        fail(ErrorCode::InvalidArgument, std::string("CHARVAR_MAX_ITER is not an integer: ") + env);
      }
      limits.max_iterations = v;
      limits.max_group_order = std::min<std::uint64_t>(limits.max_group_order, v);
    }
    return limits;
  }
};

inline void require_within(const BigInt& amount, std::uint64_t limit, const std::string& what) {
  if (amount > limit) {
    fail(ErrorCode::EnumerationTooLarge,
         what + " needs " + amount.str() + " iterations, limit is " + std::to_string(limit));
  }
}

// Splits [0, count) into `workers` contiguous chunks, runs `body(begin, end)`
// on each and returns the per-chunk results in chunk order. Merging in chunk
// order keeps results independent of the worker count.
template <typename Result, typename Body>
std::vector<Result> parallel_chunks(std::uint64_t count, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  const std::uint64_t chunks = std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1));
  std::vector<Result> results(chunks);
  if (chunks == 1) {
    results[0] = body(std::uint64_t{0}, count);
    return results;
  }
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = count * c / chunks;
    const std::uint64_t end = count * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        results[c] = body(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace charvar
