#include "cuspsieve/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "cuspsieve/congruence.hpp"
#include "cuspsieve/hecke.hpp"
#include "cuspsieve/numutil.hpp"
#include "json.hpp"

namespace cuspsieve {

std::string ResidueSystem::canonical() const {
  std::ostringstream os;
  os << "k=" << k << ";";
  for (const auto& c : components) {
    os << "component m=" << c.modulus << " ell=" << c.source_ell << " r=";
    for (size_t i = 0; i < c.residues.size(); ++i) {
      if (i) os << ",";
      os << c.residues[i];
    }
    os << ";";
  }
  for (const auto& f : legendre_filters) os << "filter q=" << f.q << ";";
  return os.str();
}

ResidueSystem build_system(FormId id) {
  ResidueSystem sys;
  sys.k = id.weight();
  if (id.weight() == 12) {
    for (const auto& [m, rs] : serre_tau_components()) {
      uint64_t src = 0;
      for (uint64_t d = 2; d <= m; ++d) {
        if (m % d == 0) {
          src = d;
          break;
        }
      }
      sys.components.push_back({m, rs, src});
    }
    sys.legendre_filters.push_back({23});
    return sys;
  }
  for (const auto& rule : rules_for(id)) {
    auto residues = solve_zero_residues(rule);
    sys.components.push_back({rule.modulus_max(), std::move(residues), rule.ell});
  }
  if (id.weight() == 16) sys.legendre_filters.push_back({31});
  if (id.weight() == 26) sys.legendre_filters.push_back({7});
  return sys;
}

namespace {

// Folding stops once the anchor would carry more residues than this; the
// remaining components fall back to bitmap checks.
constexpr size_t kFoldCap = 4096;

}  // namespace

CandidateStream::CandidateStream(const ResidueSystem& sys, mpz_class lo,
                                 mpz_class hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ < 0) lo_ = 0;
  std::vector<const SystemComponent*> comps;
  for (const auto& c : sys.components) {
    if (c.residues.empty()) {
      std::cerr << "warning: component mod " << c.modulus
                << " has an empty residue list; stream is empty\n";
      done_ = true;
      return;
    }
    comps.push_back(&c);
  }
  std::sort(comps.begin(), comps.end(),
            [](const SystemComponent* a, const SystemComponent* b) {
              return a->modulus > b->modulus;
            });
  std::vector<mpz_class> res{0};
  for (const SystemComponent* c : comps) {
    mpz_class m(static_cast<unsigned long>(c->modulus));
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), anchor_mod_.get_mpz_t(), m.get_mpz_t());
    if (g == 1 && res.size() * c->residues.size() <= kFoldCap) {
      mpz_class inv = invmod(anchor_mod_ % m, m);
      std::vector<mpz_class> merged;
      merged.reserve(res.size() * c->residues.size());
      for (const auto& a : res) {
        for (uint64_t s : c->residues) {
          mpz_class t = (mpz_class(static_cast<unsigned long>(s)) - a) * inv % m;
          if (t < 0) t += m;
          merged.push_back(a + anchor_mod_ * t);
        }
      }
      anchor_mod_ *= m;
      res = std::move(merged);
    } else {
      std::vector<uint8_t> allowed(c->modulus, 0);
      for (uint64_t r : c->residues) allowed[r] = 1;
      others_.emplace_back(c->modulus, std::move(allowed));
    }
  }
  std::sort(res.begin(), res.end());
  anchor_res_ = std::move(res);
  base_ = lo_ / anchor_mod_ * anchor_mod_;
  idx_ = 0;
}

std::optional<mpz_class> CandidateStream::next() {
  if (done_) return std::nullopt;
  while (true) {
    if (idx_ == anchor_res_.size()) {
      idx_ = 0;
      base_ += anchor_mod_;
      if (base_ >= hi_) {
        done_ = true;
        return std::nullopt;
      }
    }
    mpz_class c = base_ + anchor_res_[idx_];
    ++idx_;
    if (c < lo_) continue;
    if (c >= hi_) {
      // Residues are ascending, so the rest of this block is out too.
      if (base_ + anchor_mod_ >= hi_) {
        done_ = true;
        return std::nullopt;
      }
      idx_ = anchor_res_.size();
      continue;
    }
    bool ok = true;
    for (const auto& [m, allowed] : others_) {
      if (!allowed[mpz_fdiv_ui(c.get_mpz_t(), m)]) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
}

std::vector<mpz_class> enumerate_candidates(const ResidueSystem& sys,
                                            const mpz_class& lo,
                                            const mpz_class& hi) {
  if (lo > hi) throw std::invalid_argument("enumerate_candidates requires lo <= hi");
  std::vector<mpz_class> out;
  CandidateStream stream(sys, lo, hi);
  while (auto c = stream.next()) out.push_back(std::move(*c));
  return out;
}

const mpz_class kDeterministicPrimalityLimit("3317044064679887385961981");

namespace {

// Single Miller-Rabin round; n odd, n > base, n - 1 = d 2^s.
bool mr_witness(const mpz_class& n, const mpz_class& d, unsigned long s,
                unsigned long base) {
  mpz_class x = powmod(mpz_class(base), d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned long i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return false;
  }
  return true;  // base witnesses compositeness
}

constexpr unsigned long kDeterministicBases[] = {2,  3,  5,  7,  11, 13, 17,
                                                 19, 23, 29, 31, 37, 41};
constexpr unsigned long kExtraBases[] = {43, 47, 53, 59, 61, 67, 71,
                                         73, 79, 83, 89, 97};

}  // namespace

Primality primality_test(const mpz_class& n) {
  if (n < 2) return Primality::Composite;
  for (unsigned long q : kDeterministicBases) {
    if (n == q) return Primality::Prime;
    if (mpz_divisible_ui_p(n.get_mpz_t(), q)) return Primality::Composite;
  }
  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  for (unsigned long base : kDeterministicBases) {
    if (mr_witness(n, d, s, base)) return Primality::Composite;
  }
  if (n < kDeterministicPrimalityLimit) return Primality::Prime;
  for (unsigned long base : kExtraBases) {
    if (mr_witness(n, d, s, base)) return Primality::Composite;
  }
  return Primality::ProbablePrime;
}

bool is_prime(const mpz_class& n) { return primality_test(n) != Primality::Composite; }

EliminationResult eliminate(const mpz_class& p, FormId id,
                            const std::vector<ProjPolynomial>& polys) {
  EliminationResult result{EliminationStatus::Survivor, 0, {}};
  int k = id.weight();
  if (k == 12 || k == 16) {
    uint64_t q = (k == 12) ? 23 : 31;
    if (p == static_cast<unsigned long>(q)) {
      result.indeterminate_ells.push_back(q);
    } else {
      auto c = classify(p, -static_cast<int>(q));
      if (c.tag == SplitTag::PrincipalSplit || c.tag == SplitTag::NonPrincipalSplit) {
        return {EliminationStatus::Eliminated, q, {}};
      }
    }
  }
  for (const auto& poly : polys) {
    if (poly.k != k) {
      throw std::invalid_argument("polynomial for weight " + std::to_string(poly.k) +
                                  " used with the weight-" + std::to_string(k) +
                                  " form");
    }
    if (p == static_cast<unsigned long>(poly.ell)) {
      result.indeterminate_ells.push_back(poly.ell);
      continue;
    }
    switch (eliminate_by_poly(poly, p)) {
      case PolyVerdict::RuledOut:
        return {EliminationStatus::Eliminated, poly.ell, {}};
      case PolyVerdict::Indeterminate:
        result.indeterminate_ells.push_back(poly.ell);
        break;
      case PolyVerdict::NotRuledOut:
        break;
    }
  }
  if (!result.indeterminate_ells.empty()) {
    result.status = EliminationStatus::Indeterminate;
  }
  return result;
}

std::string system_digest(const ResidueSystem& sys,
                          const std::vector<ProjPolynomial>& polys) {
  std::ostringstream os;
  os << sys.canonical();
  for (const auto& P : polys) {
    os << "poly ell=" << P.ell << " k=" << P.k << " c=";
    for (size_t i = 0; i < P.coeffs.size(); ++i) {
      if (i) os << ",";
      os << P.coeffs[i].get_str();
    }
    os << ";";
  }
  return fnv1a64_hex(os.str());
}

void save_checkpoint(const SieveCheckpoint& ck, const std::string& path) {
  nlohmann::json j;
  j["version"] = "v1";
  j["k"] = ck.k;
  j["system_digest"] = ck.system_digest;
  j["scanned_upto"] = ck.scanned_upto.get_str();
  nlohmann::json elim = nlohmann::json::object();
  for (const auto& [key, count] : ck.eliminations) elim[key] = count;
  j["eliminations"] = elim;
  nlohmann::json survivors = nlohmann::json::array();
  for (const auto& [p, status] : ck.survivors) {
    survivors.push_back({{"p", p.get_str()}, {"status", status}});
  }
  j["survivors"] = survivors;

  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FileError("cannot write checkpoint: " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw FileError("cannot move checkpoint into place: " + path);
  }
}

SieveCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed checkpoint " + path + ": " + e.what());
  }
  if (!j.contains("version") || j["version"] != "v1") {
    throw std::runtime_error("unsupported checkpoint version in " + path);
  }
  SieveCheckpoint ck;
  try {
    ck.k = j.at("k").get<int>();
    ck.system_digest = j.at("system_digest").get<std::string>();
    ck.scanned_upto = mpz_class(j.at("scanned_upto").get<std::string>(), 10);
    for (const auto& [key, value] : j.at("eliminations").items()) {
      ck.eliminations[key] = value.get<uint64_t>();
    }
    for (const auto& s : j.at("survivors")) {
      ck.survivors.emplace_back(mpz_class(s.at("p").get<std::string>(), 10),
                                s.at("status").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed checkpoint " + path + ": " + e.what());
  }
  return ck;
}

std::string report_to_json(const BoundReport& report) {
  nlohmann::json j;
  j["k"] = report.k;
  if (report.first_survivor) {
    j["first_survivor"] = report.first_survivor->get_str();
    j["survivor_status"] = report.survivor_status;
  } else {
    j["first_survivor"] = nullptr;
  }
  j["scanned_upto"] = report.scanned_upto.get_str();
  nlohmann::json elim = nlohmann::json::object();
  for (const auto& [key, count] : report.eliminations) elim[key] = count;
  j["eliminations"] = elim;
  j["indeterminate"] = report.indeterminate_ells;
  j["notes"] = report.notes;
  return j.dump(2);
}

namespace {

struct ChunkOutcome {
  std::map<std::string, uint64_t> elim;
  std::optional<std::pair<mpz_class, std::string>> survivor;
  std::vector<uint64_t> indeterminate;
  uint64_t examined = 0;
  bool aborted = false;
};

bool passes_filters(const mpz_class& c, const ResidueSystem& sys,
                    std::map<std::string, uint64_t>& elim) {
  for (const auto& f : sys.legendre_filters) {
    if (legendre(c, mpz_class(static_cast<unsigned long>(f.q))) != -1) {
      ++elim[std::to_string(f.q)];
      return false;
    }
  }
  return true;
}

// Scan one subrange of the filtered regime. survivor_chunk lets concurrent
// later chunks abort once an earlier chunk has already produced a survivor.
ChunkOutcome process_chunk(const ResidueSystem& sys, FormId id,
                           const std::vector<ProjPolynomial>& polys,
                           const mpz_class& lo, const mpz_class& hi,
                           size_t chunk_index,
                           const std::atomic<size_t>* survivor_chunk) {
  ChunkOutcome out;
  CandidateStream stream(sys, lo, hi);
  while (auto c = stream.next()) {
    if (survivor_chunk &&
        chunk_index > survivor_chunk->load(std::memory_order_relaxed)) {
      out.aborted = true;
      return out;
    }
    ++out.examined;
    if (!passes_filters(*c, sys, out.elim)) continue;
    Primality pr = primality_test(*c);
    if (pr == Primality::Composite) {
      ++out.elim["composite"];
      continue;
    }
    EliminationResult er = eliminate(*c, id, polys);
    if (er.status == EliminationStatus::Eliminated) {
      ++out.elim[std::to_string(er.by_ell)];
      continue;
    }
    std::string status;
    if (er.status == EliminationStatus::Indeterminate) {
      status = "indeterminate";
    } else {
      status = (pr == Primality::Prime) ? "survivor" : "probable_prime_survivor";
    }
    out.survivor = {{*c, status}};
    out.indeterminate = er.indeterminate_ells;
    return out;
  }
  return out;
}

void merge_counters(std::map<std::string, uint64_t>& into,
                    const std::map<std::string, uint64_t>& from) {
  for (const auto& [key, count] : from) into[key] += count;
}

// Direct handling of primes below the filtered regime: a prime failing a
// component or filter of a foreign ell is eliminated by that congruence;
// one passing everything applicable is checked against its own expansion
// coefficient. Polynomial checks are not consulted here.
struct SmallRegimeResult {
  std::map<std::string, uint64_t> elim;
  std::optional<std::pair<mpz_class, std::string>> survivor;
};

SmallRegimeResult small_prime_regime(const ResidueSystem& sys, FormId id,
                                     uint64_t s_end, uint64_t direct_cap,
                                     std::vector<std::string>& notes) {
  SmallRegimeResult out;
  std::vector<uint64_t> direct;
  for (uint32_t p : primes_up_to(static_cast<uint32_t>(s_end - 1))) {
    bool eliminated = false;
    for (const auto& c : sys.components) {
      if (c.source_ell == p) continue;
      if (!std::binary_search(c.residues.begin(), c.residues.end(),
                              p % c.modulus)) {
        ++out.elim[std::to_string(c.source_ell)];
        eliminated = true;
        break;
      }
    }
    if (eliminated) continue;
    bool filtered = false;
    for (const auto& f : sys.legendre_filters) {
      if (f.q == p) continue;
      if (legendre(mpz_class(p), mpz_class(static_cast<unsigned long>(f.q))) != -1) {
        ++out.elim[std::to_string(f.q)];
        filtered = true;
        break;
      }
    }
    if (filtered) continue;
    direct.push_back(p);
  }
  if (direct.empty()) return out;

  uint64_t maxp = 0;
  for (uint64_t p : direct) {
    if (p <= direct_cap) {
      maxp = p;
      continue;
    }
    notes.push_back("small prime " + std::to_string(p) +
                    " exceeds the direct-check cap and was not resolved");
    out.survivor = {{mpz_class(static_cast<unsigned long>(p)),
                     "unchecked_small_prime"}};
    break;
  }
  if (maxp == 0) return out;

  auto f = delta_k(id, static_cast<size_t>(maxp));
  for (uint64_t p : direct) {
    if (p > maxp) break;
    if (f[static_cast<size_t>(p)] == 0) {
      out.survivor = {{mpz_class(static_cast<unsigned long>(p)),
                       "vanishing_coefficient"}};
      notes.push_back("coefficient at prime " + std::to_string(p) +
                      " is exactly zero");
      return out;
    }
    ++out.elim["direct"];
  }
  return out;
}

}  // namespace

BoundReport search(FormId id, const SearchOptions& opt) {
  ResidueSystem sys = build_system(id);
  for (const auto& P : opt.polys) {
    if (P.k != id.weight()) {
      throw std::invalid_argument("polynomial for weight " + std::to_string(P.k) +
                                  " supplied to a weight-" +
                                  std::to_string(id.weight()) + " search");
    }
  }
  std::string digest = system_digest(sys, opt.polys);

  BoundReport report;
  report.k = id.weight();

  if (opt.polys.empty()) {
    report.notes.push_back("no polynomial checks supplied");
  } else {
    std::string ells;
    for (const auto& P : opt.polys) {
      if (!ells.empty()) ells += ", ";
      ells += std::to_string(P.ell);
    }
    report.notes.push_back("polynomial checks available for ell: " + ells);
  }

  uint64_t smax = 0;
  for (const auto& c : sys.components) smax = std::max(smax, c.source_ell);
  for (const auto& f : sys.legendre_filters) smax = std::max(smax, f.q);
  for (const auto& P : opt.polys) smax = std::max(smax, P.ell);

  mpz_class start = 0;
  std::map<std::string, uint64_t> counters;
  std::vector<std::pair<mpz_class, std::string>> survivors;

  if (!opt.resume_path.empty()) {
    SieveCheckpoint ck = load_checkpoint(opt.resume_path);
    if (ck.k != id.weight()) {
      throw std::runtime_error("checkpoint was written for weight " +
                               std::to_string(ck.k));
    }
    if (ck.system_digest != digest) {
      throw std::runtime_error(
          "checkpoint digest mismatch: filters or polynomials changed");
    }
    start = ck.scanned_upto;
    counters = ck.eliminations;
    survivors = ck.survivors;
    report.notes.push_back("resumed at " + start.get_str());
  }

  auto finish = [&](const mpz_class& scanned) {
    report.scanned_upto = scanned;
    report.eliminations = counters;
    if (!survivors.empty()) {
      report.first_survivor = survivors.front().first;
      report.survivor_status = survivors.front().second;
    }
    if (opt.limit > kDeterministicPrimalityLimit) {
      report.notes.push_back("limit exceeds the deterministic primality range");
    }
    if (!opt.checkpoint_path.empty()) {
      save_checkpoint({report.k, digest, report.scanned_upto, counters, survivors},
                      opt.checkpoint_path);
    }
    return report;
  };

  if (!survivors.empty()) return finish(start);
  if (opt.limit < 2) return finish(std::max(start, std::max(opt.limit, mpz_class(0))));

  mpz_class s_end_z = std::min(mpz_class(static_cast<unsigned long>(smax) + 1),
                               opt.limit);
  uint64_t s_end = s_end_z.get_ui();

  if (start == 0) {
    auto small = small_prime_regime(sys, id, s_end, opt.direct_scan_cap,
                                    report.notes);
    merge_counters(counters, small.elim);
    if (small.survivor) {
      survivors.push_back(*small.survivor);
      return finish(small.survivor->first);
    }
    start = s_end_z;
  } else if (start < s_end_z) {
    throw std::runtime_error(
        "checkpoint stops inside the small-prime regime; cannot resume");
  }

  if (start >= opt.limit) return finish(std::max(start, opt.limit));

  // Chunk width: aim for about checkpoint_interval candidates per chunk.
  double density = 1.0;
  for (const auto& c : sys.components) {
    density *= static_cast<double>(c.residues.size()) /
               static_cast<double>(c.modulus);
  }
  mpz_class range = opt.limit - start;
  mpz_class width = opt.chunk_width;
  if (width == 0) {
    double w = static_cast<double>(opt.checkpoint_interval) /
               std::max(density, 1e-30);
    if (w > 1e18) w = 1e18;
    width = static_cast<unsigned long>(w);
    if (opt.workers > 1) {
      mpz_class per_worker = range / (2 * opt.workers) + 1;
      if (per_worker < width) width = per_worker;
    }
  }
  if (width < 1) width = 1;

  size_t nchunks = mpz_class((range + width - 1) / width).get_ui();
  std::atomic<size_t> survivor_chunk{SIZE_MAX};
  uint64_t since_save = 0;
  mpz_class scanned = start;

  auto chunk_bounds = [&](size_t i) {
    mpz_class lo = start + width * static_cast<unsigned long>(i);
    mpz_class hi = lo + width;
    if (hi > opt.limit) hi = opt.limit;
    return std::pair<mpz_class, mpz_class>(lo, hi);
  };

  auto handle_merged = [&](size_t i, ChunkOutcome&& oc) -> bool {
    merge_counters(counters, oc.elim);
    since_save += oc.examined;
    if (oc.survivor) {
      survivors.push_back(*oc.survivor);
      report.indeterminate_ells = oc.indeterminate;
      scanned = oc.survivor->first;
      return true;
    }
    scanned = chunk_bounds(i).second;
    if (!opt.checkpoint_path.empty() && since_save >= opt.checkpoint_interval) {
      save_checkpoint({report.k, digest, scanned, counters, survivors},
                      opt.checkpoint_path);
      since_save = 0;
    }
    return false;
  };

  if (opt.workers <= 1) {
    for (size_t i = 0; i < nchunks; ++i) {
      auto [lo, hi] = chunk_bounds(i);
      auto oc = process_chunk(sys, id, opt.polys, lo, hi, i, nullptr);
      if (handle_merged(i, std::move(oc))) break;
    }
  } else {
    size_t window = opt.workers;
    std::vector<std::future<ChunkOutcome>> inflight;
    size_t launched = 0, merged = 0;
    auto launch_upto = [&](size_t top) {
      while (launched < std::min(top, nchunks)) {
        auto [lo, hi] = chunk_bounds(launched);
        inflight.push_back(std::async(std::launch::async, process_chunk,
                                      std::cref(sys), id, std::cref(opt.polys),
                                      lo, hi, launched, &survivor_chunk));
        ++launched;
      }
    };
    launch_upto(window);
    bool stopped = false;
    while (merged < nchunks && !stopped) {
      ChunkOutcome oc = inflight[merged].get();
      if (oc.survivor) {
        size_t cur = survivor_chunk.load();
        while (merged < cur && !survivor_chunk.compare_exchange_weak(cur, merged)) {
        }
      }
      stopped = handle_merged(merged, std::move(oc));
      ++merged;
      if (!stopped) launch_upto(merged + window);
    }
    // Let any still-running later chunks abort and drain them.
    size_t cur = survivor_chunk.load();
    while (merged < cur && !survivor_chunk.compare_exchange_weak(cur, merged)) {
    }
    for (size_t i = merged; i < inflight.size(); ++i) inflight[i].wait();
  }

  return finish(scanned);
}

CertifyReport certify_bound_membership(FormId id, const mpz_class& value) {
  ResidueSystem sys = build_system(id);
  CertifyReport report{id.weight(), value, {}, {}, Primality::Composite, true};
  for (const auto& c : sys.components) {
    mpz_class r(mpz_fdiv_ui(value.get_mpz_t(), c.modulus));
    bool pass = std::binary_search(c.residues.begin(), c.residues.end(),
                                   r.get_ui());
    report.components.push_back({c.modulus, c.source_ell, r, pass});
    if (!pass) report.all_pass = false;
  }
  for (const auto& f : sys.legendre_filters) {
    int sym = legendre(value, mpz_class(static_cast<unsigned long>(f.q)));
    bool pass = sym == -1;
    report.filters.push_back({f.q, sym, pass});
    if (!pass) report.all_pass = false;
  }
  report.primality = primality_test(value);
  if (report.primality == Primality::Composite) report.all_pass = false;
  return report;
}

std::string certify_to_json(const CertifyReport& report) {
  nlohmann::json j;
  j["k"] = report.k;
  j["value"] = report.value.get_str();
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : report.components) {
    comps.push_back({{"modulus", c.modulus},
                     {"ell", c.source_ell},
                     {"residue", c.residue.get_str()},
                     {"pass", c.pass}});
  }
  j["components"] = comps;
  nlohmann::json filters = nlohmann::json::array();
  for (const auto& f : report.filters) {
    filters.push_back({{"q", f.q}, {"symbol", f.symbol}, {"pass", f.pass}});
  }
  j["filters"] = filters;
  j["primality"] = report.primality == Primality::Prime
                       ? "prime"
                       : (report.primality == Primality::ProbablePrime
                              ? "probable_prime"
                              : "composite");
  j["all_pass"] = report.all_pass;
  return j.dump(2);
}

}  // namespace cuspsieve
