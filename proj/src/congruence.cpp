#include "cuspsieve/congruence.hpp"

#include <algorithm>
#include <stdexcept>

#include "cuspsieve/numutil.hpp"

namespace cuspsieve {

namespace {

ExceptionalRule fixed(int k, uint64_t ell, unsigned long m, int n) {
  return ExceptionalRule{k, ell, m, 0, {{0, n}}};
}

// N depends on (p|ell): n_res when p is a quadratic residue, n_non otherwise.
ExceptionalRule split(int k, uint64_t ell, unsigned long m, int n_res, int n_non) {
  return ExceptionalRule{k, ell, m, static_cast<uint32_t>(ell),
                         {{+1, n_res}, {-1, n_non}}};
}

std::vector<ExceptionalRule> make_rules(int k) {
  switch (k) {
    case 12:
      return {};
    case 16:
      return {split(16, 3, 174, 5, 6), fixed(16, 5, 17, 2), fixed(16, 7, 85, 3),
              fixed(16, 11, 1, 1), fixed(16, 3617, 0, 1)};
    case 18:
      return {split(18, 3, 386, 5, 6), fixed(18, 5, 22, 3), split(18, 7, 1, 1, 2),
              split(18, 11, 1, 1, 2), fixed(18, 13, 1, 1), fixed(18, 43867, 0, 1)};
    case 20:
      return {split(20, 3, 298, 5, 6), fixed(20, 5, 13, 2), split(20, 7, 2, 1, 2),
              fixed(20, 11, 1, 1), fixed(20, 13, 1, 1), fixed(20, 283, 0, 1),
              fixed(20, 617, 0, 1)};
    case 22:
      return {split(22, 3, 18, 6, 7), fixed(22, 5, 14, 2), fixed(22, 7, 37, 2),
              fixed(22, 13, 1, 1), fixed(22, 17, 1, 1), fixed(22, 131, 0, 1),
              fixed(22, 593, 0, 1)};
    case 26:
      // The mod-11 rule carries N = 1: with N = 2 the congruence fails for
      // every prime, and the first-power modulus is what the residue system
      // for this weight uses downstream.
      return {split(26, 3, 340, 5, 6), fixed(26, 5, 6, 2), split(26, 7, 2, 1, 2),
              fixed(26, 11, 1, 1), fixed(26, 17, 1, 1), fixed(26, 19, 1, 1),
              fixed(26, 657931, 0, 1)};
    default:
      throw std::invalid_argument("no rule table for weight " + std::to_string(k));
  }
}

}  // namespace

int ExceptionalRule::n_max() const {
  int n = 1;
  for (const auto& b : branches) n = std::max(n, b.n);
  return n;
}

int ExceptionalRule::select_n(const mpz_class& p) const {
  if (branches.size() == 1 && branches[0].sign == 0) return branches[0].n;
  int sym = legendre(p, mpz_class(static_cast<unsigned long>(branch_q)));
  for (const auto& b : branches) {
    if (b.sign == sym) return b.n;
  }
  throw std::logic_error("rule branches do not cover Legendre value " +
                         std::to_string(sym));
}

uint64_t ExceptionalRule::modulus_max() const {
  uint64_t out = 1;
  for (int i = 0; i < n_max(); ++i) out *= ell;
  return out;
}

const std::vector<ExceptionalRule>& rules_for(FormId id) {
  static const auto r12 = make_rules(12);
  static const auto r16 = make_rules(16);
  static const auto r18 = make_rules(18);
  static const auto r20 = make_rules(20);
  static const auto r22 = make_rules(22);
  static const auto r26 = make_rules(26);
  switch (id.weight()) {
    case 12: return r12;
    case 16: return r16;
    case 18: return r18;
    case 20: return r20;
    case 22: return r22;
    default: return r26;
  }
}

std::vector<std::pair<uint64_t, std::vector<uint64_t>>> serre_tau_components() {
  return {{2048, {2047}},
          {2187, {2186}},
          {125, {124}},
          {691, {690}},
          {49, {19, 31, 48}}};
}

mpz_class expected_residue(const ExceptionalRule& rule, const mpz_class& p) {
  if (p == static_cast<unsigned long>(rule.ell)) {
    throw std::domain_error("p = " + std::to_string(rule.ell) +
                            " is the exceptional prime itself");
  }
  int n = rule.select_n(p);
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), rule.ell, static_cast<unsigned long>(n));
  long lo = static_cast<long>(rule.m);
  long hi = static_cast<long>(rule.k) - 1 - lo;
  mpz_class r = powmod_signed(p, lo, q) + powmod_signed(p, hi, q);
  return r % q;
}

std::vector<TableViolation> verify_tables(FormId id, uint64_t pmax,
                                          const PowerSeries& expansion) {
  if (pmax < 2) throw std::invalid_argument("verify_tables requires pmax >= 2");
  if (expansion.bound() < pmax) {
    throw std::invalid_argument("expansion bound is below pmax");
  }
  std::vector<TableViolation> out;
  auto primes = primes_up_to(static_cast<uint32_t>(pmax));
  for (const auto& rule : rules_for(id)) {
    for (uint32_t p : primes) {
      if (p == rule.ell) continue;
      mpz_class pz(static_cast<unsigned long>(p));
      mpz_class expect = expected_residue(rule, pz);
      int n = rule.select_n(pz);
      mpz_class q;
      mpz_ui_pow_ui(q.get_mpz_t(), rule.ell, static_cast<unsigned long>(n));
      mpz_class actual = expansion[p] % q;
      if (actual < 0) actual += q;
      if (actual != expect) {
        out.push_back({p, rule.ell, actual, expect});
      }
    }
  }
  return out;
}

std::vector<TableViolation> verify_tables(FormId id, uint64_t pmax) {
  return verify_tables(id, pmax, delta_k(id, pmax));
}

namespace {

// r^e mod q for a unit r and signed e, reducing e modulo phi = |units mod q|.
uint64_t unit_pow_u64(uint64_t r, long e, uint64_t q, uint64_t phi) {
  long ph = static_cast<long>(phi);
  long em = ((e % ph) + ph) % ph;
  return powmod_u64(r, static_cast<uint64_t>(em), q);
}

}  // namespace

std::vector<uint64_t> solve_zero_residues(const ExceptionalRule& rule) {
  uint64_t q_max = rule.modulus_max();
  std::vector<uint64_t> out;
  long lo = static_cast<long>(rule.m);
  long hi = static_cast<long>(rule.k) - 1 - lo;
  for (uint64_t r = 1; r < q_max; ++r) {
    if (r % rule.ell == 0) continue;
    int n = rule.select_n(mpz_class(static_cast<unsigned long>(r)));
    uint64_t q = 1;
    for (int i = 0; i < n; ++i) q *= rule.ell;
    uint64_t phi = q - q / rule.ell;
    uint64_t sum = unit_pow_u64(r % q, lo, q, phi) + unit_pow_u64(r % q, hi, q, phi);
    if (sum % q == 0) out.push_back(r);
  }
  return out;
}

SplitClass classify(const mpz_class& p, int disc) {
  if (disc != -23 && disc != -31) {
    throw std::invalid_argument("classify handles discriminants -23 and -31");
  }
  unsigned long ad = static_cast<unsigned long>(-disc);
  mpz_class d(ad);
  if (p == d) return {SplitTag::Ramified, disc, 0, 0};
  if (legendre(p, d) == -1) return {SplitTag::Inert, disc, 0, 0};
  // Quadratic residue: search p = u^2 + |disc| v^2 with u != 0.
  mpz_class vmax = sqrt(p / d);
  for (mpz_class v = 0; v <= vmax; ++v) {
    mpz_class rest = p - d * v * v;
    if (rest <= 0) break;
    if (mpz_perfect_square_p(rest.get_mpz_t())) {
      mpz_class u = sqrt(rest);
      if (u != 0) return {SplitTag::PrincipalSplit, disc, u, v};
    }
  }
  return {SplitTag::NonPrincipalSplit, disc, 0, 0};
}

int type2_residue(FormId id, const mpz_class& p) {
  int disc;
  if (id.weight() == 12) {
    disc = -23;
  } else if (id.weight() == 16) {
    disc = -31;
  } else {
    throw std::invalid_argument("mod-23/31 classification exists for weights 12 and 16");
  }
  SplitClass c = classify(p, disc);
  switch (c.tag) {
    case SplitTag::Inert: return 0;
    case SplitTag::PrincipalSplit: return 2;
    case SplitTag::NonPrincipalSplit: return -1;
    default:
      throw std::domain_error("p = " + p.get_str() + " ramifies; no residue is predicted");
  }
}

std::vector<size_t> theta_congruence_check(size_t nmax) {
  auto t1 = theta_qf(1, 1, 8, nmax);
  auto t2 = theta_qf(2, 1, 4, nmax);
  auto d16 = delta_k(FormId::of(16), nmax);
  std::vector<size_t> bad;
  for (size_t n = 0; n <= nmax; ++n) {
    mpz_class diff = 2 * d16[n] - (t1[n] - t2[n]);
    if (diff % 31 != 0) bad.push_back(n);
  }
  return bad;
}

}  // namespace cuspsieve
