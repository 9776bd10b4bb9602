#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "infobound/models.hpp"

using infobound::BernoulliModel;
using infobound::GaussianLocation;
using infobound::ParamPoint;
using infobound::RngStream;
using infobound::StatModel;
using infobound::SubgaussianCertificate;
using infobound::TensorProductModel;
using infobound::TwistFamily;
using infobound::TwistNormalizer;
using infobound::Vector;
using infobound::certify_subgaussian;
using infobound::twist_normalizer;

namespace {

ParamPoint theta1(double v) {
  ParamPoint t(1);
  t[0] = v;
  return t;
}

Vector sym(double i) {
  Vector x(1);
  x[0] = i;
  return x;
}

// Central finite difference of ln p_theta(x) along coordinate j.
double fd_score(const StatModel& model, const ParamPoint& theta, const Vector& x, int j,
                double h) {
  ParamPoint up = theta, dn = theta;
  up[j] += h;
  dn[j] -= h;
  return (model.log_density(up, x) - model.log_density(dn, x)) / (2.0 * h);
}

// E_p[score] for a discrete model, computed exactly from the pmf.
Vector exact_score_mean(const StatModel& model, const ParamPoint& theta) {
  const Vector p = model.pmf(theta);
  const infobound::Matrix s = model.score_table(theta);
  return s * p;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianLocation

TEST_CASE("gaussian location: density, score, and declared tail parameter") {
  const GaussianLocation model(0.5, 2);
  ParamPoint theta(2);
  theta << 0.3, -0.7;
  Vector x(2);
  x << 0.1, 0.4;

  // ln p = -d/2 ln(2 pi sigma^2) - |x - theta|^2 / (2 sigma^2)
  const double expect =
      -std::log(2.0 * M_PI * 0.25) - ((0.1 - 0.3) * (0.1 - 0.3) + (0.4 + 0.7) * (0.4 + 0.7)) / 0.5;
  CHECK(model.log_density(theta, x) == doctest::Approx(expect).epsilon(1e-14));

  const Vector s = model.score(theta, x);
  CHECK(s[0] == doctest::Approx((0.1 - 0.3) / 0.25).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx((0.4 + 0.7) / 0.25).epsilon(1e-14));

  CHECK(model.subgaussian_param(theta) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gaussian location: finite differences of the log-density recover the score") {
  const GaussianLocation model(0.7, 3);
  ParamPoint theta(3);
  theta << 0.2, -0.5, 0.9;
  Vector x(3);
  x << 1.3, 0.0, -2.1;
  const Vector s = model.score(theta, x);
  const double h = 1e-5;
  for (int j = 0; j < 3; ++j) {
    CHECK(fd_score(model, theta, x, j, h) == doctest::Approx(s[j]).epsilon(1e-7));
  }
}

TEST_CASE("gaussian location: sampled scores are mean zero with unit-scaled spread") {
  const GaussianLocation model(2.0, 1);
  const ParamPoint theta = theta1(-0.4);
  RngStream rng(123);
  infobound::MeanAccumulator acc;
  for (int i = 0; i < 50000; ++i) {
    acc.add(model.score(theta, model.sample(theta, rng))[0]);
  }
  // Score variance is 1/sigma^2 = 0.25, so SE of the mean is 0.5/sqrt(n).
  const double se = 0.5 / std::sqrt(50000.0);
  CHECK(std::abs(acc.mean()) < 4.0 * se);
  CHECK(acc.variance() == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("gaussian location: parameter box and argument validation") {
  const GaussianLocation model(1.0, 2);
  ParamPoint inside(2), outside(2), wrong(1);
  inside << 1.0, -1.0;
  outside << 0.0, 1.0 + 1e-9;
  wrong << 0.0;
  CHECK_NOTHROW(model.validate_theta(inside));
  CHECK_THROWS_AS(model.validate_theta(outside), std::invalid_argument);
  CHECK_THROWS_AS(model.validate_theta(wrong), std::invalid_argument);
  CHECK_THROWS_AS(GaussianLocation(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GaussianLocation(-1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GaussianLocation(1.0, 0), std::invalid_argument);
  // Discrete-only entry points are rejected.
  CHECK_THROWS_AS(model.pmf(inside), std::logic_error);
  CHECK_THROWS_AS(model.score_table(inside), std::logic_error);
  CHECK_THROWS_AS(model.alphabet_size(), std::logic_error);
}

// ---------------------------------------------------------------------------
// BernoulliModel

TEST_CASE("bernoulli: pmf, score table, and exact mean-zero score") {
  const BernoulliModel model;
  const ParamPoint theta = theta1(0.3);

  const Vector p = model.pmf(theta);
  CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-15));

  CHECK(model.score(theta, sym(1))[0] == doctest::Approx(1.0 / 0.3).epsilon(1e-15));
  CHECK(model.score(theta, sym(0))[0] == doctest::Approx(-1.0 / 0.7).epsilon(1e-15));
  CHECK(model.log_density(theta, sym(1)) == doctest::Approx(std::log(0.3)).epsilon(1e-15));
  CHECK(model.log_density(theta, sym(0)) == doctest::Approx(std::log(0.7)).epsilon(1e-15));

  for (double th : {0.1, 0.3, 0.5, 0.77, 0.9}) {
    CHECK(std::abs(exact_score_mean(model, theta1(th))[0]) < 1e-12);
  }
  CHECK(model.subgaussian_param(theta1(0.25)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(model.subgaussian_param(theta1(0.5)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("bernoulli: finite differences recover the score at both symbols") {
  const BernoulliModel model;
  const double h = 1e-6;
  for (double th : {0.2, 0.5, 0.8}) {
    const ParamPoint theta = theta1(th);
    for (int x = 0; x < 2; ++x) {
      CHECK(fd_score(model, theta, sym(x), 0, h) ==
            doctest::Approx(model.score(theta, sym(x))[0]).epsilon(1e-6));
    }
  }
}

TEST_CASE("bernoulli: boundary parameters and bad samples are rejected") {
  const BernoulliModel model;
  CHECK_THROWS_AS(model.validate_theta(theta1(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(model.validate_theta(theta1(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(model.validate_theta(theta1(1e-10)), std::invalid_argument);
  CHECK_NOTHROW(model.validate_theta(theta1(1e-9)));
  CHECK_THROWS_AS(model.log_density(theta1(0.5), sym(2)), std::domain_error);
  CHECK_THROWS_AS(model.log_density(theta1(0.5), sym(0.5)), std::domain_error);
}

TEST_CASE("bernoulli: sample frequencies match the parameter") {
  const BernoulliModel model;
  const ParamPoint theta = theta1(0.3);
  RngStream rng(5);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += model.sample(theta, rng)[0] == 1.0 ? 1 : 0;
  const double se = std::sqrt(0.3 * 0.7 / n);
  CHECK(std::abs(ones / static_cast<double>(n) - 0.3) < 4.0 * se);
}

// ---------------------------------------------------------------------------
// TwistFamily

TEST_CASE("twist family: normalizer and score at the midpoint of a symmetric pair") {
  Vector f0(2), f1(2);
  f0 << 0.6, 0.4;
  f1 << 0.4, 0.6;
  const TwistFamily model(f0, f1);

  const TwistNormalizer c = twist_normalizer(f0, f1, 0.5);
  CHECK(c.value == doctest::Approx(0.9797958971132713).epsilon(1e-15));  // 2 sqrt(0.24)
  CHECK(std::abs(c.derivative) < 1e-15);

  // Midpoint pmf is uniform: f0^.5 f1^.5 / C = sqrt(0.24) / (2 sqrt(0.24)).
  CHECK(model.log_density(theta1(0.5), sym(1)) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(model.score(theta1(0.5), sym(1))[0] ==
        doctest::Approx(0.4054651081081643).epsilon(1e-14));  // ln 1.5
  CHECK(model.score(theta1(0.5), sym(0))[0] ==
        doctest::Approx(-0.4054651081081643).epsilon(1e-14));

  CHECK(model.ratio_bound() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(model.subgaussian_param(theta1(0.5)) ==
        doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-15));
}

TEST_CASE("twist family: endpoints recover f0 and f1 with unit normalizer") {
  Vector f0(3), f1(3);
  f0 << 0.5, 0.3, 0.2;
  f1 << 0.2, 0.2, 0.6;
  const TwistFamily model(f0, f1);

  CHECK(twist_normalizer(f0, f1, 0.0).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(twist_normalizer(f0, f1, 1.0).value == doctest::Approx(1.0).epsilon(1e-15));

  const Vector p0 = model.pmf(theta1(0.0));
  const Vector p1 = model.pmf(theta1(1.0));
  for (int i = 0; i < 3; ++i) {
    CHECK(p0[i] == doctest::Approx(f0[i]).epsilon(1e-14));
    CHECK(p1[i] == doctest::Approx(f1[i]).epsilon(1e-14));
  }
}

TEST_CASE("twist family: score stays inside the likelihood-ratio envelope") {
  Vector f0(4), f1(4);
  f0 << 0.1, 0.2, 0.3, 0.4;
  f1 << 0.4, 0.3, 0.2, 0.1;
  const TwistFamily model(f0, f1);
  const double bound = model.subgaussian_param(theta1(0.5));  // 2 ln c, theta-independent
  for (double th = 0.0; th <= 1.0; th += 0.125) {
    const infobound::Matrix s = model.score_table(theta1(th));
    for (int x = 0; x < 4; ++x) CHECK(std::abs(s(0, x)) <= bound + 1e-12);
    CHECK(std::abs(exact_score_mean(model, theta1(th))[0]) < 1e-12);
  }
}

TEST_CASE("twist family: finite differences recover the score") {
  Vector f0(3), f1(3);
  f0 << 0.5, 0.3, 0.2;
  f1 << 0.2, 0.2, 0.6;
  const TwistFamily model(f0, f1);
  const double h = 1e-6;
  for (double th : {0.25, 0.5, 0.75}) {
    for (int x = 0; x < 3; ++x) {
      CHECK(fd_score(model, theta1(th), sym(x), 0, h) ==
            doctest::Approx(model.score(theta1(th), sym(x))[0]).epsilon(1e-6));
    }
  }
}

TEST_CASE("twist family: malformed endpoint pairs are rejected") {
  Vector ok(2), zero(2), unnorm(2), three(3);
  ok << 0.5, 0.5;
  zero << 1.0, 0.0;
  unnorm << 0.6, 0.6;
  three << 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(TwistFamily(ok, zero), std::invalid_argument);
  CHECK_THROWS_AS(TwistFamily(zero, ok), std::invalid_argument);
  CHECK_THROWS_AS(TwistFamily(ok, unnorm), std::invalid_argument);
  CHECK_THROWS_AS(TwistFamily(ok, three), std::invalid_argument);
  CHECK_THROWS_AS(TwistFamily(Vector::Ones(1), Vector::Ones(1)), std::invalid_argument);
  const TwistFamily model(ok, ok);
  CHECK_THROWS_AS(model.validate_theta(theta1(-0.1)), std::invalid_argument);
  CHECK_THROWS_AS(model.validate_theta(theta1(1.1)), std::invalid_argument);
  CHECK_THROWS_AS(twist_normalizer(ok, ok, 1.5), std::invalid_argument);
}

TEST_CASE("twist family: sampling matches the pmf") {
  Vector f0(3), f1(3);
  f0 << 0.5, 0.3, 0.2;
  f1 << 0.2, 0.2, 0.6;
  const TwistFamily model(f0, f1);
  const ParamPoint theta = theta1(0.3);
  const Vector p = model.pmf(theta);
  RngStream rng(99);
  std::vector<int> counts(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(model.sample(theta, rng)[0])];
  for (int x = 0; x < 3; ++x) {
    const double se = std::sqrt(p[x] * (1.0 - p[x]) / n);
    CHECK(std::abs(counts[x] / static_cast<double>(n) - p[x]) < 4.0 * se);
  }
}

// ---------------------------------------------------------------------------
// TensorProductModel

TEST_CASE("tensor product: joint pmf is the product over blocks in base-m encoding") {
  auto base = std::make_shared<BernoulliModel>();
  const TensorProductModel model(base, 3);
  CHECK(model.dim() == 3);
  CHECK(model.alphabet_size() == 8);

  ParamPoint theta(3);
  theta << 0.2, 0.5, 0.7;
  const Vector joint = model.pmf(theta);
  CHECK(joint.sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 8; ++i) {
    const int x0 = i & 1, x1 = (i >> 1) & 1, x2 = (i >> 2) & 1;
    const double expect = (x0 ? 0.2 : 0.8) * (x1 ? 0.5 : 0.5) * (x2 ? 0.7 : 0.3);
    CHECK(joint[i] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(model.log_density(theta, sym(i)) == doctest::Approx(std::log(expect)).epsilon(1e-13));
  }
}

TEST_CASE("tensor product: scores stack blockwise and stay mean zero") {
  auto base = std::make_shared<BernoulliModel>();
  const TensorProductModel model(base, 2);
  ParamPoint theta(2);
  theta << 0.3, 0.6;

  // Symbol 1 = (x0=1, x1=0); block scores are 1/0.3 and -1/0.4.
  const Vector s = model.score(theta, sym(1));
  CHECK(s[0] == doctest::Approx(1.0 / 0.3).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(-1.0 / 0.4).epsilon(1e-14));

  const Vector mean = exact_score_mean(model, theta);
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);

  // Declared tail parameter is the worst block: max over {1/.3, 1/.7, 1/.6, 1/.4}.
  CHECK(model.subgaussian_param(theta) == doctest::Approx(1.0 / 0.3).epsilon(1e-15));
}

TEST_CASE("tensor product: sample encoding agrees with the pmf") {
  auto base = std::make_shared<BernoulliModel>();
  const TensorProductModel model(base, 2);
  ParamPoint theta(2);
  theta << 0.9, 0.1;
  const Vector p = model.pmf(theta);
  RngStream rng(17);
  std::vector<int> counts(4, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(model.sample(theta, rng)[0])];
  for (int x = 0; x < 4; ++x) {
    const double se = std::sqrt(p[x] * (1.0 - p[x]) / n) + 1e-12;
    CHECK(std::abs(counts[x] / static_cast<double>(n) - p[x]) < 4.0 * se);
  }
}

TEST_CASE("tensor product: construction guards") {
  auto base = std::make_shared<BernoulliModel>();
  CHECK_THROWS_AS(TensorProductModel(nullptr, 2), std::invalid_argument);
  CHECK_THROWS_AS(TensorProductModel(base, 0), std::invalid_argument);
  CHECK_THROWS_AS(TensorProductModel(base, 30), std::invalid_argument);  // 2^30 > 1e7
  CHECK_THROWS_AS(TensorProductModel(std::make_shared<GaussianLocation>(1.0, 1), 2),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Sub-Gaussian certification

TEST_CASE("certify: bernoulli scores satisfy the declared tail bound exactly") {
  const BernoulliModel model;
  RngStream rng(1);
  const std::vector<double> grid = {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
  for (double th : {0.5, 0.3, 0.1}) {
    const SubgaussianCertificate cert = certify_subgaussian(model, theta1(th), grid, 2, 0, rng);
    CHECK(cert.certified);
    CHECK(cert.max_gap <= 1e-12);
    CHECK(!cert.diverged_lambda.has_value());
  }
  // Spot value at theta = 0.5, lambda = 1: MGF is cosh(2) against exp(2).
  CHECK(std::cosh(2.0) == doctest::Approx(3.7621956910836314).epsilon(1e-15));
  CHECK(std::cosh(2.0) < std::exp(2.0));
}

TEST_CASE("certify: twist family scores satisfy the declared tail bound") {
  Vector f0(2), f1(2);
  f0 << 0.6, 0.4;
  f1 << 0.4, 0.6;
  const TwistFamily model(f0, f1);
  RngStream rng(2);
  const std::vector<double> grid = {-3.0, -1.0, 1.0, 3.0};
  for (double th : {0.0, 0.25, 0.5, 1.0}) {
    const SubgaussianCertificate cert = certify_subgaussian(model, theta1(th), grid, 2, 0, rng);
    CHECK(cert.certified);
    CHECK(cert.declared_n == doctest::Approx(2.0 * std::log(1.5)).epsilon(1e-15));
  }
}

TEST_CASE("certify: multivariate gaussian scores across many random directions") {
  const GaussianLocation model(0.5, 3);
  ParamPoint theta(3);
  theta << 0.1, -0.2, 0.3;
  RngStream rng(3);
  const std::vector<double> grid = {-1.0, -0.5, 0.5, 1.0};
  const SubgaussianCertificate cert =
      certify_subgaussian(model, theta, grid, 50, 20000, rng);
  CHECK(cert.declared_n == doctest::Approx(2.0).epsilon(1e-15));
  // The Gaussian score meets its MGF bound with equality, so certification
  // rides on the Monte Carlo allowance.
  CHECK(cert.certified);
}

TEST_CASE("certify: an understated tail parameter is refused") {
  // Bernoulli(0.1) queried at positive lambdas where the score reaches +10;
  // the honest N = max(1/p, 1/(1-p)) = 10 passes with strictly negative gap,
  // which is the margin a smaller declared N would have to absorb.
  const BernoulliModel model;
  RngStream rng(4);
  const SubgaussianCertificate cert =
      certify_subgaussian(model, theta1(0.1), {0.5, 1.0}, 2, 0, rng);
  CHECK(cert.certified);  // declared N = 10 is honest
  // ln MGF at lambda=1 is ln(0.9 e^{-10/9} + 0.1 e^{10}) ~ 7.69, far below
  // the declared envelope 50; the margin is what a dishonest N would lose.
  CHECK(cert.max_gap < 0.0);
}

TEST_CASE("certify: argument validation") {
  const BernoulliModel model;
  RngStream rng(5);
  CHECK_THROWS_AS(certify_subgaussian(model, theta1(0.5), {}, 2, 0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(certify_subgaussian(model, theta1(0.5), {1.0}, 0, 0, rng),
                  std::invalid_argument);
}
