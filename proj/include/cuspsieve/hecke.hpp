#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>

#include "cuspsieve/qseries.hpp"

namespace cuspsieve {

// Coefficient a_n of the weight-k form assembled from prime coefficients via
// multiplicativity and the prime-power recurrence
//   a_{p^{j+1}} = a_p a_{p^j} - p^{k-1} a_{p^{j-1}}.
// Throws std::invalid_argument naming the first prime factor of n that is
// missing from prime_coeffs.
mpz_class coefficient_from_primes(FormId id, uint64_t n,
                                  const std::map<uint64_t, mpz_class>& prime_coeffs);

// Relative residual of the closed trigonometric form
//   a_{p^n} = p^{(k-1)n/2} sin((n+1) theta_p) / sin(theta_p),
// where 2 cos(theta_p) = a_p p^{-(k-1)/2}, evaluated with precision_bits of
// working precision. Returns |a_{p^n} - rhs| / max(1, |a_{p^n}|).
// Throws std::domain_error when a_p^2 > 4 p^{k-1} (impossible for genuine
// coefficients) or when the angle is indistinguishable from 0 or pi at the
// working precision.
double trig_check(FormId id, uint64_t p, unsigned n, const mpz_class& a_p,
                  const mpz_class& a_pn, unsigned precision_bits = 128);

// True when |a_2| != 2^{k/2} and |a_3| != 3^{k/2}; under that hypothesis a
// vanishing coefficient forces a vanishing prime coefficient.
bool theorem2_preconditions(FormId id, const mpz_class& a2, const mpz_class& a3);

// Index of the first zero prime coefficient (resp. first zero coefficient at
// any index >= 1) of the expansion; nullopt when none exists up to the bound.
std::optional<uint64_t> first_zero_prime_index(const PowerSeries& f);
std::optional<uint64_t> first_zero_index(const PowerSeries& f);

// Smallest n in [2, bound] with a_n = 0, or nullopt. When the |a_2|, |a_3|
// preconditions hold only primes are scanned; otherwise every index is.
std::optional<uint64_t> smallest_vanishing_scan(FormId id, uint64_t bound);
std::optional<uint64_t> smallest_vanishing_scan(FormId id, const PowerSeries& expansion);

}  // namespace cuspsieve
