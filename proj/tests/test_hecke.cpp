#include "cuspsieve/hecke.hpp"

#include <map>

#include "doctest.h"

using namespace cuspsieve;

namespace {

std::map<uint64_t, mpz_class> prime_map(const PowerSeries& f) {
  std::map<uint64_t, mpz_class> m;
  for (uint64_t p = 2; p <= f.bound(); ++p) {
    bool prime = p >= 2;
    for (uint64_t d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime) m[p] = f[p];
  }
  return m;
}

}  // namespace

TEST_CASE("coefficient assembly reproduces the expansion") {
  for (int k : {12, 16, 22}) {
    auto f = delta_k(FormId::of(k), 200);
    auto primes = prime_map(f);
    for (uint64_t n = 1; n <= 200; ++n) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(coefficient_from_primes(FormId::of(k), n, primes) == f[n]);
    }
  }
}

TEST_CASE("prime power recurrence: a_27 of the weight-16 form") {
  std::map<uint64_t, mpz_class> primes;
  primes[3] = -3348;
  CHECK(coefficient_from_primes(FormId::of(16), 27, primes) ==
        mpz_class("58552201080"));
}

TEST_CASE("assembly failures") {
  std::map<uint64_t, mpz_class> primes;
  primes[2] = -24;
  CHECK_THROWS_AS(coefficient_from_primes(FormId::of(12), 0, primes),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(coefficient_from_primes(FormId::of(12), 6, primes),
                       "insufficient data: no coefficient for prime 3",
                       std::invalid_argument);
  CHECK(coefficient_from_primes(FormId::of(12), 4, primes) ==
        mpz_class(-24) * -24 - 2048);
}

TEST_CASE("trig form matches exact coefficients at 128 bits") {
  auto f = delta_k(FormId::of(12), 130);
  auto primes = prime_map(f);
  double max128 = 0.0, max256 = 0.0;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull}) {
    for (unsigned n = 0; n <= 4; ++n) {
      mpz_class a_pn =
          coefficient_from_primes(FormId::of(12), [&] {
            uint64_t pn = 1;
            for (unsigned i = 0; i < n; ++i) pn *= p;
            return pn;
          }(), primes);
      double res = trig_check(FormId::of(12), p, n, f[p], a_pn);
      CAPTURE(p);
      CAPTURE(n);
      CHECK(res < 1e-20);
      // Each working precision meets its own residual bound 2^{-bits/2}.
      double res256 = trig_check(FormId::of(12), p, n, f[p], a_pn, 256);
      CHECK(res < 5.4e-20);    // 2^-64
      CHECK(res256 < 2.94e-39);  // 2^-128
      max128 = std::max(max128, res);
      max256 = std::max(max256, res256);
    }
  }
  // Over the suite the worst residual strictly improves with precision.
  CHECK(max128 > 0.0);
  CHECK(max256 < max128);
}

TEST_CASE("frozen residual examples") {
  // Both sides checked independently beforehand; the residuals are tiny.
  CHECK(trig_check(FormId::of(12), 2, 2, mpz_class(-24), mpz_class(-1472)) < 1e-20);
  std::map<uint64_t, mpz_class> p3{{3, mpz_class(-3348)}};
  mpz_class a27 = coefficient_from_primes(FormId::of(16), 27, p3);
  CHECK(trig_check(FormId::of(16), 3, 3, mpz_class(-3348), a27) < 1e-20);
}

TEST_CASE("trig check rejects out-of-bound and degenerate data") {
  // |a_p| beyond 2 p^{(k-1)/2} violates the coefficient bound outright.
  CHECK_THROWS_AS(trig_check(FormId::of(12), 2, 1, mpz_class(100), mpz_class(100)),
                  std::domain_error);
  // 13975^2 < 4 * 5^11 but at 4 working bits the angle collapses to 0.
  CHECK_THROWS_AS(
      trig_check(FormId::of(12), 5, 1, mpz_class(13975), mpz_class(13975), 4),
      std::domain_error);
  // The same data is fine at 128 bits (nonzero residual, no throw).
  CHECK(trig_check(FormId::of(12), 5, 1, mpz_class(13975), mpz_class(13975)) >= 0.0);
}

TEST_CASE("theorem preconditions") {
  auto f16 = delta_k(FormId::of(16), 3);
  CHECK(theorem2_preconditions(FormId::of(16), f16[2], f16[3]));
  // |a_2| = 2^{k/2} fails the first condition.
  CHECK_FALSE(theorem2_preconditions(FormId::of(12), mpz_class(64), f16[3]));
  CHECK_FALSE(theorem2_preconditions(FormId::of(12), mpz_class(-64), f16[3]));
  // |a_3| = 3^{k/2} fails the second.
  CHECK_FALSE(theorem2_preconditions(FormId::of(12), mpz_class(-24), mpz_class(729)));
}

TEST_CASE("zero scans distinguish prime-only from full scans") {
  // Zero at the composite index 6 and at the prime index 11.
  PowerSeries f = PowerSeries::from_coeffs(
      {0, 1, 5, 7, 9, 2, 0, 4, 8, 3, 6, 0, 13});
  CHECK(first_zero_index(f) == 6);
  CHECK(first_zero_prime_index(f) == 11);
  PowerSeries none = PowerSeries::from_coeffs({0, 1, 2, 3});
  CHECK_FALSE(first_zero_index(none).has_value());
  CHECK_FALSE(first_zero_prime_index(none).has_value());
}

TEST_CASE("no vanishing coefficient below 2000 for any of the six forms") {
  for (int k : FormId::weights()) {
    CAPTURE(k);
    CHECK_FALSE(smallest_vanishing_scan(FormId::of(k), 2000).has_value());
  }
  CHECK_THROWS_AS(smallest_vanishing_scan(FormId::of(12), 1), std::invalid_argument);
}
