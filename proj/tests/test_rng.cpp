#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "infobound/rng.hpp"

using infobound::MeanAccumulator;
using infobound::RngStream;
using infobound::chunked_reduce;

TEST_CASE("identical seed and stream id reproduce the same sequence") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(42, 7);
  RngStream d(42, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.uniform() == d.uniform());
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("different stream ids and seeds give different sequences") {
  RngStream a(42, 0);
  RngStream b(42, 1);
  RngStream c(43, 0);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++equal_ab;
    if (va == c.next_u64()) ++equal_ac;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("substreams depend only on identifiers, not on consumption") {
  RngStream parent(7, 3);
  RngStream child_before = parent.substream(11);
  for (int i = 0; i < 57; ++i) parent.next_u64();
  RngStream child_after = parent.substream(11);
  for (int i = 0; i < 100; ++i) {
    CHECK(child_before.next_u64() == child_after.next_u64());
  }
}

TEST_CASE("fork advances the parent and yields distinct children") {
  RngStream parent(7, 0);
  RngStream c1 = parent.fork();
  RngStream c2 = parent.fork();
  CHECK(c1.stream_id() != c2.stream_id());
  CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and has the right moments") {
  RngStream rng(123);
  MeanAccumulator acc;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    acc.add(u);
  }
  // mean 1/2, variance 1/12; allow four standard errors
  CHECK(std::abs(acc.mean() - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal passes mean/variance/tail sanity checks") {
  RngStream rng(321);
  MeanAccumulator acc;
  const int n = 200000;
  int beyond_2sd = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    acc.add(z);
    if (std::abs(z) > 2.0) ++beyond_2sd;
  }
  CHECK(std::abs(acc.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.02));
  // P(|Z| > 2) = 0.0455; binomial four-sigma band
  const double p = 0.04550026;
  const double band = 4.0 * std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(beyond_2sd) / n - p) < band);
}

TEST_CASE("discrete sampling matches the pmf") {
  RngStream rng(99);
  const std::vector<double> pmf{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.discrete(pmf))];
  for (int k = 0; k < 3; ++k) {
    const double phat = static_cast<double>(counts[static_cast<std::size_t>(k)]) / n;
    const double band = 4.0 * std::sqrt(pmf[static_cast<std::size_t>(k)] *
                                        (1.0 - pmf[static_cast<std::size_t>(k)]) / n);
    CHECK(std::abs(phat - pmf[static_cast<std::size_t>(k)]) < band);
  }
}

TEST_CASE("MeanAccumulator matches hand-computed statistics") {
  MeanAccumulator acc;
  for (const double v : {1.0, 2.0, 3.0, 4.0}) acc.add(v);
  CHECK(acc.mean() == doctest::Approx(2.5));
  // sample variance of {1,2,3,4} is 5/3
  CHECK(acc.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(acc.std_error() == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));

  MeanAccumulator left, right;
  left.add(1.0);
  left.add(2.0);
  right.add(3.0);
  right.add(4.0);
  left.merge(right);
  CHECK(left.mean() == doctest::Approx(2.5));
  CHECK(left.variance() == doctest::Approx(5.0 / 3.0));
}

namespace {

struct SumPartial {
  double sum = 0.0;
  std::vector<std::int64_t> order;
  void merge(const SumPartial& o) {
    sum += o.sum;
    order.insert(order.end(), o.order.begin(), o.order.end());
  }
};

SumPartial run_chunked(int threads) {
  const RngStream base(5, 0);
  return chunked_reduce<SumPartial>(
      1000, 64, threads, [&](std::int64_t begin, std::int64_t end, SumPartial& out) {
        RngStream stream = base.substream(static_cast<std::uint64_t>(begin / 64));
        out.order.push_back(begin);
        for (std::int64_t i = begin; i < end; ++i) out.sum += stream.uniform();
      });
}

}  // namespace

TEST_CASE("chunked reduction is bit-identical across thread counts") {
  const SumPartial one = run_chunked(1);
  const SumPartial three = run_chunked(3);
  const SumPartial eight = run_chunked(8);
  CHECK(one.sum == three.sum);
  CHECK(one.sum == eight.sum);
  // merge order is ascending chunk order regardless of scheduling
  REQUIRE(one.order.size() == three.order.size());
  for (std::size_t i = 0; i < one.order.size(); ++i) {
    CHECK(one.order[i] == static_cast<std::int64_t>(i) * 64);
    CHECK(one.order[i] == three.order[i]);
    CHECK(one.order[i] == eight.order[i]);
  }
}

TEST_CASE("chunked reduction covers a total that is not a chunk multiple") {
  struct CountPartial {
    std::int64_t count = 0;
    void merge(const CountPartial& o) { count += o.count; }
  };
  const auto result = chunked_reduce<CountPartial>(
      1001, 64, 3, [](std::int64_t begin, std::int64_t end, CountPartial& out) {
        out.count += end - begin;
      });
  CHECK(result.count == 1001);
}

TEST_CASE("worker exceptions propagate out of chunked_reduce") {
  struct Empty {
    void merge(const Empty&) {}
  };
  auto boom = [](std::int64_t begin, std::int64_t, Empty&) {
    if (begin >= 128) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(chunked_reduce<Empty>(1000, 64, 3, boom), std::runtime_error);
  CHECK_THROWS_AS(chunked_reduce<Empty>(1000, 64, 1, boom), std::runtime_error);
}

TEST_CASE("thread count environment override is clamped") {
  CHECK(infobound::default_thread_count() >= 1);
  setenv("INFOBOUND_THREADS", "3", 1);
  CHECK(infobound::default_thread_count() == 3);
  setenv("INFOBOUND_THREADS", "0", 1);
  CHECK(infobound::default_thread_count() == 1);
  unsetenv("INFOBOUND_THREADS");
  CHECK(infobound::default_thread_count() == 1);
}
