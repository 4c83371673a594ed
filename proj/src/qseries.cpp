#include "cuspsieve/qseries.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspsieve {

namespace {

const std::array<int, 6> kWeights = {12, 16, 18, 20, 22, 26};

// Coefficients of q^0..q^bound of sum_{n>=1} sigma_r(n) q^n, by sieving
// multiples of each divisor.
std::vector<mpz_class> sigma_table(unsigned r, size_t bound) {
  std::vector<mpz_class> s(bound + 1);
  mpz_class dr;
  for (size_t d = 1; d <= bound; ++d) {
    mpz_ui_pow_ui(dr.get_mpz_t(), d, r);
    for (size_t m = d; m <= bound; m += d) s[m] += dr;
  }
  return s;
}

void check_cusp_normalization(const PowerSeries& f, int k) {
  if (f.bound() >= 1 && (f[0] != 0 || f[1] != 1)) {
    throw std::logic_error("cusp form of weight " + std::to_string(k) +
                           " is not normalized");
  }
}

}  // namespace

FormId FormId::of(int k) {
  for (int w : kWeights) {
    if (w == k) return FormId(k);
  }
  throw std::invalid_argument("no level-one cusp form handled for weight " +
                              std::to_string(k));
}

const std::array<int, 6>& FormId::weights() { return kWeights; }

PowerSeries PowerSeries::from_coeffs(std::vector<mpz_class> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("a series needs at least the q^0 coefficient");
  }
  PowerSeries s(coeffs.size() - 1);
  s.c_ = std::move(coeffs);
  return s;
}

mpz_class sigma(uint64_t n, unsigned r) {
  if (n == 0) throw std::invalid_argument("sigma requires n >= 1");
  mpz_class total = 0;
  mpz_class t;
  for (uint64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    mpz_ui_pow_ui(t.get_mpz_t(), d, r);
    total += t;
    uint64_t e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(t.get_mpz_t(), e, r);
      total += t;
    }
  }
  return total;
}

PowerSeries eisenstein(int weight, size_t bound) {
  if (weight != 4 && weight != 6) {
    throw std::invalid_argument("eisenstein expects weight 4 or 6");
  }
  unsigned r = (weight == 4) ? 3 : 5;
  long factor = (weight == 4) ? 240 : -504;
  auto s = sigma_table(r, bound);
  PowerSeries e(bound);
  e.at(0) = 1;
  for (size_t n = 1; n <= bound; ++n) e.at(n) = factor * s[n];
  return e;
}

PowerSeries add(const PowerSeries& a, const PowerSeries& b) {
  size_t bound = std::min(a.bound(), b.bound());
  PowerSeries out(bound);
  for (size_t n = 0; n <= bound; ++n) out.at(n) = a[n] + b[n];
  return out;
}

PowerSeries sub(const PowerSeries& a, const PowerSeries& b) {
  size_t bound = std::min(a.bound(), b.bound());
  PowerSeries out(bound);
  for (size_t n = 0; n <= bound; ++n) out.at(n) = a[n] - b[n];
  return out;
}

PowerSeries mul(const PowerSeries& a, const PowerSeries& b) {
  size_t bound = std::min(a.bound(), b.bound());
  PowerSeries out(bound);
  mpz_class* c = &out.at(0);
  for (size_t i = 0; i <= bound; ++i) {
    if (mpz_sgn(a[i].get_mpz_t()) == 0) continue;
    for (size_t j = 0; i + j <= bound; ++j) {
      if (mpz_sgn(b[j].get_mpz_t()) == 0) continue;
      mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

namespace {

// Shared builder: computes exactly the products needed for the requested
// weights. Wanted weights must be a subset of FormId::weights().
std::map<int, PowerSeries> build_family(const std::vector<int>& wanted,
                                        size_t bound) {
  PowerSeries e4 = eisenstein(4, bound);
  PowerSeries e6 = eisenstein(6, bound);
  PowerSeries e4sq = mul(e4, e4);
  PowerSeries num = sub(mul(e4sq, e4), mul(e6, e6));

  PowerSeries d12(bound);
  for (size_t n = 0; n <= bound; ++n) {
    if (!mpz_divisible_ui_p(num[n].get_mpz_t(), 1728)) {
      throw std::logic_error("E4^3 - E6^2 has a coefficient not divisible by 1728");
    }
    mpz_divexact_ui(d12.at(n).get_mpz_t(), num[n].get_mpz_t(), 1728);
  }
  check_cusp_normalization(d12, 12);

  auto want = [&wanted](int k) {
    for (int w : wanted) {
      if (w == k) return true;
    }
    return false;
  };

  std::map<int, PowerSeries> out;
  if (want(16)) out.emplace(16, mul(d12, e4));
  if (want(18)) out.emplace(18, mul(d12, e6));
  if (want(20)) out.emplace(20, mul(d12, e4sq));
  if (want(22)) out.emplace(22, mul(d12, mul(e4, e6)));
  if (want(26)) out.emplace(26, mul(d12, mul(e4sq, e6)));
  if (want(12)) out.emplace(12, std::move(d12));
  for (auto& [k, f] : out) check_cusp_normalization(f, k);
  return out;
}

}  // namespace

PowerSeries delta_k(FormId id, size_t bound) {
  auto family = build_family({id.weight()}, bound);
  return std::move(family.at(id.weight()));
}

std::map<int, PowerSeries> delta_family(size_t bound) {
  std::vector<int> all(FormId::weights().begin(), FormId::weights().end());
  return build_family(all, bound);
}

PowerSeries theta_qf(long a, long b, long c, size_t bound, long box_margin) {
  long long disc = 4LL * a * c - (long long)b * b;
  if (a <= 0 || disc <= 0) {
    throw std::invalid_argument("theta_qf requires a positive definite form");
  }
  if (box_margin < 1) {
    throw std::invalid_argument("theta_qf requires box_margin >= 1");
  }
  // Values <= bound satisfy disc*m^2 <= 4c*value and disc*n^2 <= 4a*value,
  // so the box below covers every representation.
  long long mbox =
      (long long)std::ceil(std::sqrt(4.0 * c * (double)bound / (double)disc)) +
      box_margin;
  long long nbox =
      (long long)std::ceil(std::sqrt(4.0 * a * (double)bound / (double)disc)) +
      box_margin;
  std::vector<unsigned long> counts(bound + 1, 0);
  for (long long m = -mbox; m <= mbox; ++m) {
    for (long long n = -nbox; n <= nbox; ++n) {
      long long v = a * m * m + b * m * n + c * n * n;
      if (v >= 0 && (unsigned long long)v <= bound) ++counts[(size_t)v];
    }
  }
  PowerSeries out(bound);
  for (size_t n = 0; n <= bound; ++n) out.at(n) = counts[n];
  return out;
}

}  // namespace cuspsieve
