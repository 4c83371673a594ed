#include "cuspsieve/fpfactor.hpp"

#include <fstream>
#include <sstream>

#include "cuspsieve/numutil.hpp"

namespace cuspsieve {

namespace {

using Vec = std::vector<mpz_class>;

void trim(Vec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Vec reduce_vec(const Vec& a, const mpz_class& p) {
  Vec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    mpz_mod(out[i].get_mpz_t(), a[i].get_mpz_t(), p.get_mpz_t());
  }
  trim(out);
  return out;
}

long deg(const Vec& a) { return static_cast<long>(a.size()) - 1; }

Vec mulmod(const Vec& a, const Vec& b, const mpz_class& p) {
  if (a.empty() || b.empty()) return {};
  Vec out(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  for (auto& c : out) mpz_mod(c.get_mpz_t(), c.get_mpz_t(), p.get_mpz_t());
  trim(out);
  return out;
}

// Remainder of a by nonzero b; both reduced mod p.
Vec rem(Vec a, const Vec& b, const mpz_class& p) {
  mpz_class inv_lead = invmod(b.back(), p);
  while (deg(a) >= deg(b)) {
    mpz_class coef = a.back() * inv_lead % p;
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      a[shift + i] -= coef * b[i];
      mpz_mod(a[shift + i].get_mpz_t(), a[shift + i].get_mpz_t(), p.get_mpz_t());
    }
    trim(a);
  }
  return a;
}

Vec quotient(Vec a, const Vec& b, const mpz_class& p) {
  Vec q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
  mpz_class inv_lead = invmod(b.back(), p);
  while (deg(a) >= deg(b)) {
    mpz_class coef = a.back() * inv_lead % p;
    size_t shift = a.size() - b.size();
    q[shift] = coef;
    for (size_t i = 0; i < b.size(); ++i) {
      a[shift + i] -= coef * b[i];
      mpz_mod(a[shift + i].get_mpz_t(), a[shift + i].get_mpz_t(), p.get_mpz_t());
    }
    trim(a);
  }
  trim(q);
  return q;
}

Vec make_monic(Vec a, const mpz_class& p) {
  if (a.empty() || a.back() == 1) return a;
  mpz_class inv = invmod(a.back(), p);
  for (auto& c : a) c = c * inv % p;
  return a;
}

Vec gcd_monic(Vec a, Vec b, const mpz_class& p) {
  while (!b.empty()) {
    Vec r = rem(std::move(a), b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(std::move(a), p);
}

Vec derivative(const Vec& a, const mpz_class& p) {
  if (a.size() <= 1) return {};
  Vec out(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) {
    out[i - 1] = a[i] * static_cast<unsigned long>(i) % p;
  }
  trim(out);
  return out;
}

Vec powmod_vec(Vec base, mpz_class e, const Vec& M, const mpz_class& p) {
  Vec acc{1};
  base = rem(std::move(base), M, p);
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) {
      acc = rem(mulmod(acc, base, p), M, p);
    }
    base = rem(mulmod(base, base, p), M, p);
    e >>= 1;
  }
  return acc;
}

}  // namespace

ProjPolynomial builtin_quartic_59() {
  return ProjPolynomial{59, 16, {3, 11, -7, -1, 1}};
}

namespace {

std::string expect_key(const std::string& line, const std::string& key, int lineno) {
  auto pos = line.find('=');
  if (pos == std::string::npos || line.substr(0, pos) != key) {
    throw PolyParseError(lineno, "expected '" + key + "=...'");
  }
  return line.substr(pos + 1);
}

mpz_class parse_int(const std::string& text, int lineno) {
  if (text.empty()) throw PolyParseError(lineno, "empty integer");
  size_t start = (text[0] == '-') ? 1 : 0;
  if (start == text.size()) throw PolyParseError(lineno, "bad integer '" + text + "'");
  for (size_t i = start; i < text.size(); ++i) {
    if (!isdigit(static_cast<unsigned char>(text[i]))) {
      throw PolyParseError(lineno, "bad integer '" + text + "'");
    }
  }
  return mpz_class(text, 10);
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

ProjPolynomial parse_projpoly(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PolyParseError(1, "missing 'ell=' line");
  mpz_class ell = parse_int(expect_key(strip_cr(line), "ell", 1), 1);
  if (ell < 2 || !ell.fits_ulong_p() || !is_prime_u64(ell.get_ui())) {
    throw PolyParseError(1, "ell must be a prime that fits a machine word");
  }

  if (!std::getline(in, line)) throw PolyParseError(2, "missing 'k=' line");
  mpz_class kz = parse_int(expect_key(strip_cr(line), "k", 2), 2);
  if (kz < 2 || kz % 2 != 0 || !kz.fits_sint_p()) {
    throw PolyParseError(2, "k must be a positive even integer");
  }

  if (!std::getline(in, line)) throw PolyParseError(3, "missing 'coeffs=' line");
  std::string body = expect_key(strip_cr(line), "coeffs", 3);
  ProjPolynomial P;
  P.ell = ell.get_ui();
  P.k = static_cast<int>(kz.get_si());
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    P.coeffs.push_back(parse_int(tok, 3));
  }
  if (P.coeffs.size() < 2) throw PolyParseError(3, "need at least degree 1");
  if (P.coeffs.back() != 1) throw PolyParseError(3, "polynomial must be monic");
  size_t d = P.coeffs.size() - 1;
  if (d != P.ell + 1 && d != 4) {
    throw PolyParseError(3, "degree must be ell+1 or 4, got " + std::to_string(d));
  }

  int lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (!strip_cr(line).empty()) {
      throw PolyParseError(lineno, "unexpected content after the coeffs line");
    }
  }
  return P;
}

ProjPolynomial load_projpoly(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open polynomial file: " + path);
  return parse_projpoly(in);
}

PrimeFieldPoly reduce_mod(const ProjPolynomial& P, const mpz_class& p) {
  return PrimeFieldPoly{p, reduce_vec(P.coeffs, p)};
}

PrimeFieldPoly polymod_pow_x(const mpz_class& p, const mpz_class& e,
                             const PrimeFieldPoly& M) {
  if (M.degree() < 1) {
    throw std::invalid_argument("polymod_pow_x requires deg M >= 1");
  }
  if (M.p != p) {
    throw std::invalid_argument("modulus polynomial lives over a different prime");
  }
  if (e < 0) throw std::invalid_argument("polymod_pow_x requires e >= 0");
  Vec x{0, 1};
  return PrimeFieldPoly{p, powmod_vec(std::move(x), e, M.coeffs, p)};
}

Deg2Status degree2_status(const ProjPolynomial& P, const mpz_class& p) {
  Vec Pb = reduce_vec(P.coeffs, p);
  if (deg(Pb) < 2) return Deg2Status::No;

  Vec d = derivative(Pb, p);
  Vec g = d.empty() ? make_monic(Pb, p) : gcd_monic(Pb, d, p);
  if (deg(g) != 0) return Deg2Status::Ramified;

  // Linear factors: g1 = gcd(x^p - x, P).
  Vec xp = powmod_vec(Vec{0, 1}, p, Pb, p);
  Vec xp_minus_x = xp;
  if (xp_minus_x.size() < 2) xp_minus_x.resize(2);
  xp_minus_x[1] -= 1;
  mpz_mod(xp_minus_x[1].get_mpz_t(), xp_minus_x[1].get_mpz_t(), p.get_mpz_t());
  trim(xp_minus_x);
  Vec g1 = gcd_monic(xp_minus_x, Pb, p);
  Vec P1 = (deg(g1) == 0) ? Pb : quotient(Pb, g1, p);
  if (deg(P1) < 2) return Deg2Status::No;

  // Quadratic factors: g2 = gcd(x^{p^2} - x, P1), Frobenius applied twice.
  Vec xp1 = rem(std::move(xp), P1, p);
  Vec xp2 = powmod_vec(std::move(xp1), p, P1, p);
  if (xp2.size() < 2) xp2.resize(2);
  xp2[1] -= 1;
  mpz_mod(xp2[1].get_mpz_t(), xp2[1].get_mpz_t(), p.get_mpz_t());
  trim(xp2);
  Vec g2 = gcd_monic(std::move(xp2), P1, p);
  return deg(g2) >= 2 ? Deg2Status::Yes : Deg2Status::No;
}

bool has_degree2_factor(const ProjPolynomial& P, const mpz_class& p) {
  switch (degree2_status(P, p)) {
    case Deg2Status::Yes: return true;
    case Deg2Status::No: return false;
    default:
      throw RamifiedPrimeError("p = " + p.get_str() + " ramifies in the polynomial");
  }
}

PolyVerdict eliminate_by_poly(const ProjPolynomial& P, const mpz_class& p) {
  if (p == static_cast<unsigned long>(P.ell)) {
    throw std::domain_error("p equals the polynomial's exceptional prime " +
                            std::to_string(P.ell));
  }
  switch (degree2_status(P, p)) {
    case Deg2Status::Yes: return PolyVerdict::NotRuledOut;
    case Deg2Status::No: return PolyVerdict::RuledOut;
    default: return PolyVerdict::Indeterminate;
  }
}

}  // namespace cuspsieve
