#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "disorder/model.hpp"

using namespace disorder;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
ModelParams params_with(double mu, double lambda) {
  ModelParams p;
  p.mu = mu;
  p.lambda = lambda;
  return p;
}
}  // namespace

TEST_CASE("quadratic roots: known values") {
  // mu=1, lambda=2: m(m-1) = 4
  const Roots r12 = compute_roots(params_with(1.0, 2.0));
  CHECK_THAT(r12.m1, WithinAbs(2.5615528128088303, 1e-12));
  CHECK_THAT(r12.m2, WithinAbs(-1.5615528128088303, 1e-12));
  // mu=2, lambda=2: m(m-1) = 1, golden ratio
  const Roots r22 = compute_roots(params_with(2.0, 2.0));
  CHECK_THAT(r22.m1, WithinAbs(1.6180339887498949, 1e-12));
  CHECK_THAT(r22.m2, WithinAbs(-0.6180339887498949, 1e-12));
}

TEST_CASE("quadratic roots: defining equation and Vieta over random params") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> range(0.1, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double mu = range(rng), lambda = range(rng);
    const Roots r = compute_roots(params_with(mu, lambda));
    const double q = 2.0 * lambda / (mu * mu);
    CHECK(r.m1 > 1.0);
    CHECK(r.m2 < 0.0);
    CHECK_THAT(r.m1 * (r.m1 - 1.0), WithinRel(q, 1e-12));
    CHECK_THAT(r.m2 * (r.m2 - 1.0), WithinRel(q, 1e-12));
    CHECK_THAT(r.m1 + r.m2, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("invalid parameters are rejected") {
  ModelParams p;
  SECTION("mu = 0") {
    p.mu = 0.0;
    CHECK_THROWS_AS(compute_roots(p), domain_error);
  }
  SECTION("lambda <= 0") {
    p.lambda = 0.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
  }
  SECTION("p outside (0,1]") {
    p.p = 0.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    p.p = 1.5;
    CHECK_THROWS_AS(p.validate(), domain_error);
  }
  SECTION("negative c") {
    p.c = -1.0;
    CHECK_THROWS_AS(p.validate(true), domain_error);
  }
  SECTION("c = 0 needs the false-alarm flag") {
    p.c = 0.0;
    CHECK_THROWS_AS(p.validate(), domain_error);
    CHECK_NOTHROW(p.validate(true));
  }
  SECTION("pi0 outside [0,1]") {
    p.pi0 = 1.2;
    CHECK_THROWS_AS(p.validate(), domain_error);
  }
}

TEST_CASE("eigenfunctions: point values and boundary behaviour") {
  const Roots r = compute_roots(params_with(1.0, 2.0));

  // psi(1/2) = 1/2 regardless of the roots
  CHECK_THAT(psi(0.5, r), WithinAbs(0.5, 1e-15));
  CHECK_THAT(eta(0.5, r), WithinAbs(0.5, 1e-15));

  // log-space evaluation cross-checked against extended precision
  CHECK_THAT(psi(0.9, r), WithinRel(27.819068517392329, 1e-13));

  // boundary limits psi(0+) = 0, eta(1-) = 0, psi'(0+) = 0
  CHECK(psi(1e-10, r) < 1e-20);
  CHECK(eta(1.0 - 1e-10, r) < 1e-15);
  CHECK(std::abs(psi_prime(1e-10, r)) < 1e-12);

  // derivative at the midpoint: psi'(1/2) = 2 m1 - 1
  CHECK_THAT(psi_prime(0.5, r), WithinRel(2.0 * r.m1 - 1.0, 1e-13));

  SECTION("domain errors at the endpoints") {
    CHECK_THROWS_AS(psi(0.0, r), domain_error);
    CHECK_THROWS_AS(eta(1.0, r), domain_error);
    CHECK_THROWS_AS(psi_prime(-0.1, r), domain_error);
    CHECK_THROWS_AS(eta_prime(1.0, r), domain_error);
  }
}

TEST_CASE("eigenfunctions: no overflow at the clamped extremes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> range(0.1, 10.0);
  for (int k = 0; k < 50; ++k) {
    const Roots r = compute_roots(params_with(range(rng), range(rng)));
    CHECK(std::isfinite(psi(1.0 - 1e-12, r)));
    CHECK(std::isfinite(eta(1e-12, r)));
  }
}

TEST_CASE("psi increasing, eta decreasing on a 1000-point grid") {
  const Roots r = compute_roots(params_with(1.3, 0.7));
  double prev_psi = 0.0, prev_eta = 1.0 / 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    const double ps = psi(x, r), et = eta(x, r);
    CHECK(ps > prev_psi);
    CHECK(et < prev_eta);
    prev_psi = ps;
    prev_eta = et;
  }
}

TEST_CASE("Wronskian psi' eta - psi eta' = m1 - m2") {
  const Roots r = compute_roots(params_with(1.0, 2.0));
  for (double x : {0.3, 0.5, 0.7}) {
    const double w = psi_prime(x, r) * eta(x, r) - psi(x, r) * eta_prime(x, r);
    CHECK_THAT(w, WithinRel(r.m1 - r.m2, 1e-12));
  }
  // and across (0,1) away from the clamped ends
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> range(0.1, 10.0);
  for (int k = 0; k < 20; ++k) {
    const Roots rr = compute_roots(params_with(range(rng), range(rng)));
    for (int i = 0; i <= 200; ++i) {
      const double x = 1e-6 + (1.0 - 2e-6) * i / 200.0;
      const double w =
          psi_prime(x, rr) * eta(x, rr) - psi(x, rr) * eta_prime(x, rr);
      CHECK_THAT(w, WithinRel(rr.m1 - rr.m2, 1e-10));
    }
  }
}

TEST_CASE("second derivatives satisfy A0 f = lambda f") {
  const ModelParams p = params_with(1.7, 3.1);
  const Roots r = compute_roots(p);
  for (double x : {0.05, 0.3, 0.6, 0.95}) {
    CHECK_THAT(0.5 * sigma_sq(x, p) * psi_second(x, r),
               WithinRel(p.lambda * psi(x, r), 1e-12));
    CHECK_THAT(0.5 * sigma_sq(x, p) * eta_second(x, r),
               WithinRel(p.lambda * eta(x, r), 1e-12));
  }
}

TEST_CASE("jump map") {
  CHECK(jump_map(0.0, 0.3) == 0.3);
  CHECK(jump_map(1.0, 0.3) == 1.0);
  CHECK_THAT(jump_map(0.5, 0.5), WithinAbs(0.75, 1e-15));
  CHECK_THROWS_AS(jump_map(-0.1, 0.5), domain_error);
  CHECK_THROWS_AS(jump_map(1.1, 0.5), domain_error);

  // affine, increasing, S(pi) >= pi, unique fixed point at 1
  const double p = 0.37;
  double prev = jump_map(0.0, p);
  for (int i = 1; i <= 100; ++i) {
    const double x = i / 100.0;
    const double s = jump_map(x, p);
    CHECK(s >= x);
    CHECK(s > prev);
    if (x < 1.0) CHECK(s > x);  // fixed point only at 1
    prev = s;
  }
  // affine: second difference vanishes
  const double a = jump_map(0.2, p), b = jump_map(0.4, p), c = jump_map(0.6, p);
  CHECK_THAT(a - 2 * b + c, WithinAbs(0.0, 1e-15));
}

TEST_CASE("cost functions") {
  CHECK(cost_h(1.0) == 0.0);
  CHECK(cost_g(0.0, 0.7) == 0.0);
  CHECK_THAT(cost_g(0.6, 0.5), WithinAbs(0.3, 1e-15));
  CHECK_THAT(cost_h(0.6), WithinAbs(0.4, 1e-15));
}
