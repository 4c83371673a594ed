#include "cuspsieve/hecke.hpp"

#include <mpfr.h>

#include <stdexcept>
#include <string>

#include "cuspsieve/numutil.hpp"

namespace cuspsieve {

namespace {

struct Real {
  mpfr_t v;
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  ~Real() { mpfr_clear(v); }
};

// a_{p^e} from a_p by the weight-k recurrence.
mpz_class prime_power_coefficient(int k, uint64_t p, unsigned e, const mpz_class& a_p) {
  if (e == 0) return 1;
  mpz_class pk1;
  mpz_ui_pow_ui(pk1.get_mpz_t(), p, static_cast<unsigned long>(k - 1));
  mpz_class prev = 1, cur = a_p;
  for (unsigned j = 1; j < e; ++j) {
    mpz_class next = a_p * cur - pk1 * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

mpz_class coefficient_from_primes(FormId id, uint64_t n,
                                  const std::map<uint64_t, mpz_class>& prime_coeffs) {
  if (n == 0) throw std::invalid_argument("coefficient_from_primes requires n >= 1");
  mpz_class out = 1;
  uint64_t rest = n;
  for (uint64_t p = 2; p <= rest / p; p += (p == 2) ? 1 : 2) {
    if (rest % p != 0) continue;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    auto it = prime_coeffs.find(p);
    if (it == prime_coeffs.end()) {
      throw std::invalid_argument("insufficient data: no coefficient for prime " +
                                  std::to_string(p));
    }
    out *= prime_power_coefficient(id.weight(), p, e, it->second);
  }
  if (rest > 1) {
    auto it = prime_coeffs.find(rest);
    if (it == prime_coeffs.end()) {
      throw std::invalid_argument("insufficient data: no coefficient for prime " +
                                  std::to_string(rest));
    }
    out *= it->second;
  }
  return out;
}

double trig_check(FormId id, uint64_t p, unsigned n, const mpz_class& a_p,
                  const mpz_class& a_pn, unsigned precision_bits) {
  int k = id.weight();
  mpz_class pk1;
  mpz_ui_pow_ui(pk1.get_mpz_t(), p, static_cast<unsigned long>(k - 1));

  // Exact bound check first: |a_p| <= 2 p^{(k-1)/2}.
  mpz_class sq = a_p * a_p;
  mpz_class four_pk1 = 4 * pk1;
  if (sq > four_pk1) {
    throw std::domain_error("coefficient bound violated at p = " + std::to_string(p));
  }

  mpfr_prec_t prec = static_cast<mpfr_prec_t>(precision_bits);
  Real root(prec), cosv(prec), theta(prec), s1(prec), sn(prec), rhs(prec);
  Real scale(prec), diff(prec), den(prec);

  // cos(theta) = a_p / (2 sqrt(p^{k-1})).
  mpfr_set_z(root.v, pk1.get_mpz_t(), MPFR_RNDN);
  mpfr_sqrt(root.v, root.v, MPFR_RNDN);
  mpfr_mul_ui(root.v, root.v, 2, MPFR_RNDN);
  mpfr_set_z(cosv.v, a_p.get_mpz_t(), MPFR_RNDN);
  mpfr_div(cosv.v, cosv.v, root.v, MPFR_RNDN);
  if (sq == four_pk1 || mpfr_cmpabs_ui(cosv.v, 1) >= 0) {
    throw std::domain_error("degenerate angle at p = " + std::to_string(p) +
                            ": |a_p| is at the bound within working precision");
  }
  mpfr_acos(theta.v, cosv.v, MPFR_RNDN);
  mpfr_sin(s1.v, theta.v, MPFR_RNDN);
  if (mpfr_zero_p(s1.v)) {
    throw std::domain_error("degenerate angle at p = " + std::to_string(p) +
                            ": sin(theta) underflows at working precision");
  }
  mpfr_mul_ui(sn.v, theta.v, n + 1, MPFR_RNDN);
  mpfr_sin(sn.v, sn.v, MPFR_RNDN);

  // scale = p^{(k-1)n/2} = sqrt(p^{(k-1)n}).
  mpz_class pk1n;
  mpz_pow_ui(pk1n.get_mpz_t(), pk1.get_mpz_t(), n);
  mpfr_set_z(scale.v, pk1n.get_mpz_t(), MPFR_RNDN);
  mpfr_sqrt(scale.v, scale.v, MPFR_RNDN);

  mpfr_mul(rhs.v, scale.v, sn.v, MPFR_RNDN);
  mpfr_div(rhs.v, rhs.v, s1.v, MPFR_RNDN);

  mpfr_set_z(diff.v, a_pn.get_mpz_t(), MPFR_RNDN);
  mpfr_sub(diff.v, diff.v, rhs.v, MPFR_RNDN);
  mpfr_abs(diff.v, diff.v, MPFR_RNDN);

  mpz_class abs_apn = abs(a_pn);
  if (abs_apn < 1) abs_apn = 1;
  mpfr_set_z(den.v, abs_apn.get_mpz_t(), MPFR_RNDN);
  mpfr_div(diff.v, diff.v, den.v, MPFR_RNDN);
  return mpfr_get_d(diff.v, MPFR_RNDN);
}

bool theorem2_preconditions(FormId id, const mpz_class& a2, const mpz_class& a3) {
  int half = id.weight() / 2;
  mpz_class two_pow, three_pow;
  mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(half));
  mpz_ui_pow_ui(three_pow.get_mpz_t(), 3, static_cast<unsigned long>(half));
  return abs(a2) != two_pow && abs(a3) != three_pow;
}

std::optional<uint64_t> first_zero_prime_index(const PowerSeries& f) {
  if (f.bound() < 2) return std::nullopt;
  for (uint32_t p : primes_up_to(static_cast<uint32_t>(f.bound()))) {
    if (f[p] == 0) return p;
  }
  return std::nullopt;
}

std::optional<uint64_t> first_zero_index(const PowerSeries& f) {
  for (size_t n = 1; n <= f.bound(); ++n) {
    if (f[n] == 0) return n;
  }
  return std::nullopt;
}

std::optional<uint64_t> smallest_vanishing_scan(FormId id, const PowerSeries& expansion) {
  mpz_class a2, a3;
  if (expansion.bound() >= 3) {
    a2 = expansion[2];
    a3 = expansion[3];
  } else {
    auto prefix = delta_k(id, 3);
    a2 = prefix[2];
    a3 = prefix[3];
  }
  if (theorem2_preconditions(id, a2, a3)) return first_zero_prime_index(expansion);
  return first_zero_index(expansion);
}

std::optional<uint64_t> smallest_vanishing_scan(FormId id, uint64_t bound) {
  if (bound < 2) throw std::invalid_argument("smallest_vanishing_scan requires bound >= 2");
  return smallest_vanishing_scan(id, delta_k(id, bound));
}

}  // namespace cuspsieve
