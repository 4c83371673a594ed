#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cuspsieve/fpfactor.hpp"
#include "cuspsieve/qseries.hpp"

namespace cuspsieve {

// One congruence component: candidates must be = one of residues mod modulus.
// source_ell names the exceptional prime the component came from.
struct SystemComponent {
  uint64_t modulus;
  std::vector<uint64_t> residues;  // sorted, unit residues
  uint64_t source_ell;
};

// Candidates must additionally be quadratic non-residues mod every filter q.
struct LegendreFilter {
  uint64_t q;
};

struct ResidueSystem {
  int k;
  std::vector<SystemComponent> components;
  std::vector<LegendreFilter> legendre_filters;

  // Deterministic serialization used for checkpoint digests.
  std::string canonical() const;
};

// The zero-forcing residue system for the weight: solve_zero_residues output
// per rule, plus the quadratic-nonresidue filters (23 for k=12, 31 for k=16,
// 7 for k=26). For k=12 the components are the fixed residue lists.
ResidueSystem build_system(FormId id);

// Ascending integers in [lo, hi) meeting every component congruence.
// Legendre filters are not applied here. An empty residue list yields an
// empty stream after a one-time warning on stderr.
class CandidateStream {
 public:
  CandidateStream(const ResidueSystem& sys, mpz_class lo, mpz_class hi);
  std::optional<mpz_class> next();

 private:
  // Components with pairwise coprime moduli are CRT-folded into the anchor
  // progression while the residue count stays small; the rest are checked
  // through per-modulus bitmaps.
  mpz_class anchor_mod_ = 1;
  std::vector<mpz_class> anchor_res_{0};
  std::vector<std::pair<uint64_t, std::vector<uint8_t>>> others_;
  mpz_class lo_, hi_, base_;
  size_t idx_ = 0;
  bool done_ = false;
};

// Collects the stream; intended for tests and small ranges.
std::vector<mpz_class> enumerate_candidates(const ResidueSystem& sys,
                                            const mpz_class& lo,
                                            const mpz_class& hi);

enum class Primality { Composite, Prime, ProbablePrime };

// Miller-Rabin with the 13 prime bases 2..41: deterministic for
// n < kDeterministicPrimalityLimit, probable beyond (extra bases 43..97).
extern const mpz_class kDeterministicPrimalityLimit;
Primality primality_test(const mpz_class& n);
bool is_prime(const mpz_class& n);

enum class EliminationStatus { Eliminated, Survivor, Indeterminate };

struct EliminationResult {
  EliminationStatus status;
  uint64_t by_ell = 0;                       // set when Eliminated
  std::vector<uint64_t> indeterminate_ells;  // ramified or own-prime skips
};

// Applies the weight's quadratic-form classifier (mod 23 or 31) and then each
// polynomial's degree-2 criterion. First RuledOut wins. Assumes p already
// passed all congruence components and Legendre filters. Polynomials whose
// weight differs from the form's are rejected with std::invalid_argument.
EliminationResult eliminate(const mpz_class& p, FormId id,
                            const std::vector<ProjPolynomial>& polys);

struct SieveCheckpoint {
  int k = 0;
  std::string system_digest;
  mpz_class scanned_upto;
  std::map<std::string, uint64_t> eliminations;
  std::vector<std::pair<mpz_class, std::string>> survivors;
};

// Digest of the system plus polynomial list; resuming under a different
// configuration is refused.
std::string system_digest(const ResidueSystem& sys,
                          const std::vector<ProjPolynomial>& polys);

void save_checkpoint(const SieveCheckpoint& ck, const std::string& path);
SieveCheckpoint load_checkpoint(const std::string& path);

struct BoundReport {
  int k = 0;
  std::optional<mpz_class> first_survivor;
  std::string survivor_status;  // survivor | probable_prime_survivor |
                                // indeterminate | unchecked_small_prime
  mpz_class scanned_upto;
  std::map<std::string, uint64_t> eliminations;
  std::vector<uint64_t> indeterminate_ells;
  std::vector<std::string> notes;
};

std::string report_to_json(const BoundReport& report);

struct SearchOptions {
  mpz_class limit;
  std::vector<ProjPolynomial> polys;
  std::string checkpoint_path;  // empty: no checkpoints written
  std::string resume_path;      // empty: fresh start
  uint64_t checkpoint_interval = 10'000'000;  // candidates examined per save
  unsigned workers = 1;
  mpz_class chunk_width;        // 0: derived from interval and density
  uint64_t direct_scan_cap = 200'000;  // largest small prime checked by expansion
};

// Scans [0, limit): primes up to the largest exceptional ell are handled by
// the direct small-prime regime, the rest by CRT enumeration, Legendre
// filters, primality and polynomial elimination. Stops at the first candidate
// that nothing eliminates.
BoundReport search(FormId id, const SearchOptions& opt);

struct ComponentCheck {
  uint64_t modulus;
  uint64_t source_ell;
  mpz_class residue;
  bool pass;
};

struct FilterCheck {
  uint64_t q;
  int symbol;
  bool pass;
};

struct CertifyReport {
  int k;
  mpz_class value;
  std::vector<ComponentCheck> components;
  std::vector<FilterCheck> filters;
  Primality primality;
  bool all_pass;
};

// Checks one value against every component, filter, and the primality test.
CertifyReport certify_bound_membership(FormId id, const mpz_class& value);

std::string certify_to_json(const CertifyReport& report);

}  // namespace cuspsieve
