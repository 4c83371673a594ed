#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "cuspsieve/qseries.hpp"

namespace cuspsieve {

// One branch of a congruence rule: applies when the Legendre symbol (p|q)
// equals sign, or unconditionally when sign is 0.
struct RuleBranch {
  int sign;
  int n;
};

// Built-in congruence data for a_p = p^m + p^{k-1-m} (mod ell^N), where the
// exponent N may depend on the Legendre symbol (p|branch_q). A negative
// power k-1-m acts through the modular inverse of the unit p.
struct ExceptionalRule {
  int k;
  uint64_t ell;
  unsigned long m;
  uint32_t branch_q;  // 0 when the single branch is unconditional
  std::vector<RuleBranch> branches;

  int n_max() const;
  int select_n(const mpz_class& p) const;
  uint64_t modulus_max() const;  // ell^{n_max}
};

// Rules for one weight. Empty for k = 12: its residue data enters the sieve
// directly as residue lists rather than as exponent rules.
const std::vector<ExceptionalRule>& rules_for(FormId id);

// The k = 12 residue data as (modulus, residues) components:
// p = -1 mod 2^11, 3^7, 5^3, 691 and p = -1, 19, 31 mod 7^2.
std::vector<std::pair<uint64_t, std::vector<uint64_t>>> serre_tau_components();

// (p^m + p^{k-1-m}) mod ell^{N(p)}; throws std::domain_error when p = ell.
mpz_class expected_residue(const ExceptionalRule& rule, const mpz_class& p);

struct TableViolation {
  uint64_t p;
  uint64_t ell;
  mpz_class actual;
  mpz_class expected;
};

// Checks every rule of k against the expansion for all primes p <= pmax,
// p != ell. The overload without an expansion computes delta_k itself.
std::vector<TableViolation> verify_tables(FormId id, uint64_t pmax);
std::vector<TableViolation> verify_tables(FormId id, uint64_t pmax,
                                          const PowerSeries& expansion);

// All unit residues r mod ell^{n_max} with r^m + r^{k-1-m} = 0 mod ell^{N(r)},
// the branch exponent evaluated at r. Sorted ascending.
std::vector<uint64_t> solve_zero_residues(const ExceptionalRule& rule);

enum class SplitTag { Inert, PrincipalSplit, NonPrincipalSplit, Ramified };

struct SplitClass {
  SplitTag tag;
  int disc;       // -23 or -31
  mpz_class u, v; // PrincipalSplit witness: u^2 + |disc| v^2 = p, u != 0
};

// Splitting behaviour of p in the quadratic order of discriminant -23 or -31,
// refined by whether p is represented by the principal form u^2 + |disc| v^2.
SplitClass classify(const mpz_class& p, int disc);

// Predicted a_p residue mod 23 (k=12) or mod 31 (k=16):
// Inert -> 0, PrincipalSplit -> 2, NonPrincipalSplit -> -1.
// Throws std::domain_error for the ramified prime and std::invalid_argument
// for other weights.
int type2_residue(FormId id, const mpz_class& p);

// Indices n <= nmax where 2 Delta_16 and theta(1,1,8) - theta(2,1,4) differ
// mod 31; expected empty.
std::vector<size_t> theta_congruence_check(size_t nmax);

}  // namespace cuspsieve
