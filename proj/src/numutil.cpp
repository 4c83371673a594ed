#include "cuspsieve/numutil.hpp"

#include <cctype>
#include <stdexcept>

namespace cuspsieve {

std::vector<uint32_t> primes_up_to(uint32_t n) {
  std::vector<uint32_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
  for (uint64_t p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    out.push_back(static_cast<uint32_t>(p));
    for (uint64_t q = p * p; q <= n; q += p) composite[q] = true;
  }
  return out;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (uint64_t d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

int legendre(const mpz_class& a, const mpz_class& p) {
  return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

mpz_class powmod(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
  if (m == 1) return 0;
  unsigned __int128 acc = 1;
  unsigned __int128 base = b % m;
  while (e > 0) {
    if (e & 1) acc = acc * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return static_cast<uint64_t>(acc);
}

mpz_class invmod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw std::domain_error("invmod: argument is not a unit modulo " + m.get_str());
  }
  return r;
}

mpz_class powmod_signed(const mpz_class& a, long m, const mpz_class& q) {
  if (m >= 0) return powmod(a, mpz_class(m), q);
  return powmod(invmod(a, q), mpz_class(-m), q);
}

mpz_class parse_integer_expr(const std::string& text) {
  const auto fail = [&text]() -> mpz_class {
    throw std::invalid_argument("not a non-negative integer: '" + text + "'");
  };
  if (text.empty()) return fail();

  size_t epos = text.find_first_of("eE");
  std::string mantissa = (epos == std::string::npos) ? text : text.substr(0, epos);
  std::string exponent = (epos == std::string::npos) ? "" : text.substr(epos + 1);
  if (mantissa.empty()) return fail();

  size_t dot = mantissa.find('.');
  std::string digits = mantissa;
  size_t frac_len = 0;
  if (dot != std::string::npos) {
    digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    frac_len = mantissa.size() - dot - 1;
  }
  if (digits.empty()) return fail();
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return fail();
  }

  long exp10 = 0;
  if (epos != std::string::npos) {
    if (exponent.empty()) return fail();
    size_t i = 0;
    if (exponent[0] == '+') i = 1;
    if (i >= exponent.size()) return fail();
    for (size_t j = i; j < exponent.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(exponent[j]))) return fail();
    }
    exp10 = std::stol(exponent.substr(i));
    if (exp10 > 1000000) return fail();
  }

  long shift = exp10 - static_cast<long>(frac_len);
  mpz_class value(digits, 10);
  if (shift > 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift));
    value *= scale;
  } else if (shift < 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(-shift));
    if (!mpz_divisible_p(value.get_mpz_t(), scale.get_mpz_t())) return fail();
    mpz_divexact(value.get_mpz_t(), value.get_mpz_t(), scale.get_mpz_t());
  }
  return value;
}

std::string fnv1a64_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace cuspsieve
