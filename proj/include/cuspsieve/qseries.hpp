#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace cuspsieve {

// Weight of one of the six level-one cusp forms with one-dimensional
// space of cusp forms: k in {12, 16, 18, 20, 22, 26}.
class FormId {
 public:
  // Throws std::invalid_argument for any other weight.
  static FormId of(int k);
  static const std::array<int, 6>& weights();

  int weight() const { return k_; }
  bool operator==(const FormId&) const = default;

 private:
  explicit FormId(int k) : k_(k) {}
  int k_;
};

// q-expansion truncated at an explicit bound: coefficients of q^0 .. q^bound,
// all exact integers. Arithmetic never extends the bound; products and sums
// carry the smaller bound of the operands.
class PowerSeries {
 public:
  explicit PowerSeries(size_t bound) : c_(bound + 1) {}
  static PowerSeries from_coeffs(std::vector<mpz_class> coeffs);

  size_t bound() const { return c_.size() - 1; }
  const mpz_class& operator[](size_t n) const { return c_.at(n); }
  mpz_class& at(size_t n) { return c_.at(n); }
  const std::vector<mpz_class>& coeffs() const { return c_; }

  bool operator==(const PowerSeries&) const = default;

 private:
  std::vector<mpz_class> c_;
};

// Sum of d^r over positive divisors d of n; n >= 1.
mpz_class sigma(uint64_t n, unsigned r);

// Normalized Eisenstein series E_4 or E_6 (constant term 1).
PowerSeries eisenstein(int weight, size_t bound);

PowerSeries add(const PowerSeries& a, const PowerSeries& b);
PowerSeries sub(const PowerSeries& a, const PowerSeries& b);
PowerSeries mul(const PowerSeries& a, const PowerSeries& b);

// q-expansion of the weight-k cusp form, normalized so the q^1 term is 1.
// The weight-12 form is (E4^3 - E6^2)/1728 with the division checked exact;
// the others are that form times monomials in E4 and E6.
PowerSeries delta_k(FormId id, size_t bound);

// All six forms at once, sharing the Eisenstein intermediates.
std::map<int, PowerSeries> delta_family(size_t bound);

// Representation counts of the positive definite binary quadratic form
// a m^2 + b m n + c n^2: coefficient n counts the pairs (m, n) with value n.
// box_margin widens the internal lattice box; any margin >= 1 is exhaustive,
// larger values exist to let tests confirm that.
PowerSeries theta_qf(long a, long b, long c, size_t bound, long box_margin = 1);

}  // namespace cuspsieve
