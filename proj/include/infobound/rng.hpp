#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace infobound {

// Deterministic pseudo-random stream identified by (seed, stream_id).
//
// All randomness in the library flows through this class so that results are
// reproducible across platforms and thread counts.  Substreams are derived
// from identifiers, never from engine state, so a worker can reconstruct its
// stream without knowing how much any other stream has consumed.  uniform()
// and normal() are implemented here (rather than with std::distribution
// classes) because the standard leaves distribution algorithms unspecified
// and we need bit-identical output everywhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_),
                      static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(stream_id_),
                      static_cast<std::uint32_t>(stream_id_ >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream with an id derived from (parent id, child_id).  Distinct
  // children of distinct parents map to distinct stream ids with overwhelming
  // probability (splitmix64 finalizer over the combined identifier).
  RngStream substream(std::uint64_t child_id) const {
    return RngStream(seed_, derive_id(stream_id_, child_id));
  }

  // Child stream keyed off the current position: advances this stream by one
  // draw, so sequential forks from the same parent are independent.
  RngStream fork() { return substream(next_u64()); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Marsaglia polar method; the spare deviate is
  // cached, so consecutive calls consume a variable number of uniforms.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Index in [0, pmf.size()) drawn by inverse-CDF walk.  The caller is
  // responsible for pmf validity; the last bucket absorbs rounding slack.
  template <class VectorLike>
  int discrete(const VectorLike& pmf) {
    const double u = uniform();
    double acc = 0.0;
    const int n = static_cast<int>(pmf.size());
    for (int i = 0; i < n; ++i) {
      acc += pmf[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

 private:
  static std::uint64_t derive_id(std::uint64_t parent, std::uint64_t child) {
    std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (child + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Worker-thread count: INFOBOUND_THREADS if set (clamped to [1, 256]),
// otherwise 1.  Results never depend on this value, only wall time does.
inline int default_thread_count() {
  if (const char* env = std::getenv("INFOBOUND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v < 1) return 1;
    if (v > 256) return 256;
    return static_cast<int>(v);
  }
  return 1;
}

// Running mean / standard-error accumulator over scalar observations.
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
  double variance() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double v = (sum_sq - sum * sum / n) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// Splits [0, total) into fixed-size chunks, reduces each chunk into its own
// Partial, and merges the partials in ascending chunk order.  The chunk
// layout and merge order are fixed, so the result is bit-identical for any
// thread count.  ChunkFn signature: void(int64_t begin, int64_t end, Partial&).
template <class Partial, class ChunkFn>
Partial chunked_reduce(std::int64_t total, std::int64_t chunk_size, int n_threads,
                       ChunkFn&& chunk_fn) {
  if (total < 0) throw std::invalid_argument("chunked_reduce: negative total");
  if (chunk_size < 1) throw std::invalid_argument("chunked_reduce: chunk_size must be >= 1");
  const std::int64_t n_chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<Partial> partials(static_cast<std::size_t>(n_chunks));

  auto run_chunk = [&](std::int64_t c) {
    const std::int64_t begin = c * chunk_size;
    const std::int64_t end = std::min(total, begin + chunk_size);
    chunk_fn(begin, end, partials[static_cast<std::size_t>(c)]);
  };

  if (n_threads <= 1 || n_chunks <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= n_chunks || failed.load()) break;
        try {
          run_chunk(c);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    };
    std::vector<std::thread> pool;
    const int k = static_cast<int>(std::min<std::int64_t>(n_threads, n_chunks));
    pool.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  Partial result{};
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    result.merge(partials[static_cast<std::size_t>(c)]);
  }
  return result;
}

}  // namespace infobound
