#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace cuspsieve {

// Primes <= n in increasing order.
std::vector<uint32_t> primes_up_to(uint32_t n);

// Deterministic trial-division test for machine-word sized n.
bool is_prime_u64(uint64_t n);

// (a|p) for odd prime p: 1, -1, or 0 when p divides a.
int legendre(const mpz_class& a, const mpz_class& p);

// b^e mod m for e >= 0, m >= 1.
mpz_class powmod(const mpz_class& b, const mpz_class& e, const mpz_class& m);
uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m);

// Inverse of a mod m; throws std::domain_error when gcd(a, m) != 1.
mpz_class invmod(const mpz_class& a, const mpz_class& m);

// a^m mod q where m may be negative (then the inverse is raised to -m).
mpz_class powmod_signed(const mpz_class& a, long m, const mpz_class& q);

// Parses a non-negative integer given as decimal digits or in scientific
// notation with a non-negative mantissa and exponent ("25", "1e9", "2.5e3").
// The value must be an exact integer; throws std::invalid_argument otherwise.
mpz_class parse_integer_expr(const std::string& text);

// 64-bit FNV-1a digest, rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& data);

}  // namespace cuspsieve
