#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cuspsieve {

// Projective polynomial attached to a weight-k form and exceptional prime ell:
// monic, integer coefficients in ascending degree. Irreducibility over Q is a
// trusted input property.
struct ProjPolynomial {
  uint64_t ell;
  int k;
  std::vector<mpz_class> coeffs;

  size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

// The known quartic x^4 - x^3 - 7x^2 + 11x + 3 for ell = 59, weight 16
// (projective image S4, so degree 4 instead of ell+1).
ProjPolynomial builtin_quartic_59();

// Raised for malformed polynomial data files; line is 1-based.
struct PolyParseError : std::runtime_error {
  PolyParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
  int line;
};

// Raised when a file cannot be opened or read.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict parser for the plain-text polynomial format:
//   line 1: ell=<decimal>   (prime)
//   line 2: k=<decimal>     (even)
//   line 3: coeffs=<c0>,<c1>,...,<cd>   ascending, cd = 1, d = ell+1 or 4
ProjPolynomial parse_projpoly(std::istream& in);
ProjPolynomial load_projpoly(const std::string& path);

// Polynomial over F_p: coefficients reduced to [0, p), ascending degree, no
// leading zeros (the zero polynomial has an empty list).
struct PrimeFieldPoly {
  mpz_class p;
  std::vector<mpz_class> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  // Degree of the zero polynomial is reported as -1.
  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
};

// Coefficientwise reduction of P mod p.
PrimeFieldPoly reduce_mod(const ProjPolynomial& P, const mpz_class& p);

// x^e mod (M, p) by square-and-multiply; requires deg M >= 1 and M.p == p.
PrimeFieldPoly polymod_pow_x(const mpz_class& p, const mpz_class& e,
                             const PrimeFieldPoly& M);

enum class Deg2Status { No, Yes, Ramified };

// Distinct-degree test for an irreducible quadratic factor of P mod p:
// strips linear factors with gcd(x^p - x, P), then checks
// gcd(x^{p^2} - x, remaining) for degree >= 2. Ramified when P mod p is not
// squarefree (gcd(P, P') != 1), where the criterion does not apply.
Deg2Status degree2_status(const ProjPolynomial& P, const mpz_class& p);

struct RamifiedPrimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Boolean form of degree2_status; throws RamifiedPrimeError on Ramified.
bool has_degree2_factor(const ProjPolynomial& P, const mpz_class& p);

enum class PolyVerdict { RuledOut, NotRuledOut, Indeterminate };

// RuledOut when P has no irreducible quadratic factor mod p (so a_p != 0 mod
// ell, eliminating p); NotRuledOut when it has one; Indeterminate when p
// ramifies. Throws std::domain_error when p equals P.ell.
PolyVerdict eliminate_by_poly(const ProjPolynomial& P, const mpz_class& p);

}  // namespace cuspsieve
