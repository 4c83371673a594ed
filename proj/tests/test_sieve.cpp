#include "cuspsieve/sieve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "cuspsieve/congruence.hpp"
#include "cuspsieve/numutil.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cuspsieve;

namespace {

ResidueSystem make_system(std::vector<SystemComponent> comps) {
  ResidueSystem sys;
  sys.k = 0;
  sys.components = std::move(comps);
  return sys;
}

std::vector<mpz_class> brute_candidates(const ResidueSystem& sys, long lo,
                                        long hi) {
  std::vector<mpz_class> out;
  for (long x = std::max(lo, 0L); x < hi; ++x) {
    bool ok = true;
    for (const auto& c : sys.components) {
      uint64_t r = static_cast<uint64_t>(x) % c.modulus;
      if (!std::count(c.residues.begin(), c.residues.end(), r)) {
        ok = false;
        break;
      }
    }
    if (ok) out.emplace_back(x);
  }
  return out;
}

const SystemComponent* find_component(const ResidueSystem& sys, uint64_t ell) {
  for (const auto& c : sys.components) {
    if (c.source_ell == ell) return &c;
  }
  return nullptr;
}

std::string temp_path(const char* name) {
  return std::string("/tmp/cuspsieve_test_") + name;
}

}  // namespace

TEST_CASE("residue systems for all six weights") {
  auto s12 = build_system(FormId::of(12));
  REQUIRE(s12.components.size() == 5);
  CHECK(s12.k == 12);
  CHECK(s12.components[0].modulus == 2048);
  CHECK(s12.components[0].residues == std::vector<uint64_t>{2047});
  CHECK(s12.components[0].source_ell == 2);
  CHECK(s12.components[1].modulus == 2187);
  CHECK(s12.components[1].residues == std::vector<uint64_t>{2186});
  CHECK(s12.components[2].modulus == 125);
  CHECK(s12.components[2].residues == std::vector<uint64_t>{124});
  CHECK(s12.components[3].modulus == 691);
  CHECK(s12.components[3].residues == std::vector<uint64_t>{690});
  CHECK(s12.components[4].modulus == 49);
  CHECK(s12.components[4].residues == std::vector<uint64_t>{19, 31, 48});
  CHECK(s12.components[4].source_ell == 7);
  REQUIRE(s12.legendre_filters.size() == 1);
  CHECK(s12.legendre_filters[0].q == 23);

  auto s16 = build_system(FormId::of(16));
  REQUIRE(s16.components.size() == 5);
  CHECK(s16.components[0].modulus == 729);
  CHECK(s16.components[0].residues ==
        std::vector<uint64_t>{80, 161, 242, 323, 404, 485, 566, 647, 728});
  CHECK(s16.components[1].modulus == 25);
  CHECK(s16.components[1].residues == std::vector<uint64_t>{24});
  CHECK(s16.components[2].modulus == 343);
  CHECK(s16.components[2].residues == std::vector<uint64_t>{342});
  CHECK(s16.components[3].modulus == 11);
  CHECK(s16.components[3].residues == std::vector<uint64_t>{10});
  CHECK(s16.components[4].modulus == 3617);
  CHECK(s16.components[4].residues == std::vector<uint64_t>{3616});
  REQUIRE(s16.legendre_filters.size() == 1);
  CHECK(s16.legendre_filters[0].q == 31);

  auto s18 = build_system(FormId::of(18));
  REQUIRE(s18.components.size() == 6);
  CHECK(s18.legendre_filters.empty());
  CHECK(find_component(s18, 3)->modulus == 729);
  CHECK(find_component(s18, 3)->residues == std::vector<uint64_t>{728});
  CHECK(find_component(s18, 5)->residues == std::vector<uint64_t>{124});
  CHECK(find_component(s18, 7)->residues == std::vector<uint64_t>{19, 31, 48});
  CHECK(find_component(s18, 11)->residues ==
        std::vector<uint64_t>{40, 94, 112, 118, 120});
  CHECK(find_component(s18, 13)->residues == std::vector<uint64_t>{4, 10, 12});
  CHECK(find_component(s18, 43867)->residues == std::vector<uint64_t>{43866});

  auto s20 = build_system(FormId::of(20));
  REQUIRE(s20.components.size() == 7);
  CHECK(s20.legendre_filters.empty());
  CHECK(find_component(s20, 3)->residues == std::vector<uint64_t>{728});
  CHECK(find_component(s20, 7)->residues.size() == 3);
  CHECK(find_component(s20, 283)->residues == std::vector<uint64_t>{282});
  CHECK(find_component(s20, 617)->residues == std::vector<uint64_t>{616});

  auto s22 = build_system(FormId::of(22));
  REQUIRE(s22.components.size() == 7);
  CHECK(find_component(s22, 3)->modulus == 2187);
  CHECK(find_component(s22, 3)->residues.size() == 3);
  CHECK(find_component(s22, 131)->residues == std::vector<uint64_t>{130});
  CHECK(find_component(s22, 593)->residues == std::vector<uint64_t>{592});

  auto s26 = build_system(FormId::of(26));
  REQUIRE(s26.components.size() == 7);
  REQUIRE(s26.legendre_filters.size() == 1);
  CHECK(s26.legendre_filters[0].q == 7);
  CHECK(find_component(s26, 7)->residues.size() == 21);
  CHECK(find_component(s26, 657931)->residues ==
        std::vector<uint64_t>{157708, 578462, 610260, 627364, 657930});

  for (int k : FormId::weights()) {
    auto sys = build_system(FormId::of(k));
    CHECK(sys.canonical().substr(0, 3 + (k >= 10 ? 2 : 1)) ==
          "k=" + std::to_string(k) + ";");
    for (const auto& c : sys.components) {
      CHECK(std::is_sorted(c.residues.begin(), c.residues.end()));
      CHECK(!c.residues.empty());
      for (uint64_t r : c.residues) {
        CHECK(r < c.modulus);
        CHECK(r % c.source_ell != 0);
      }
    }
  }
}

TEST_CASE("candidate stream agrees with direct filtering") {
  auto sys1 = make_system({{6, {5}, 0}});
  CHECK(enumerate_candidates(sys1, 0, 30) ==
        std::vector<mpz_class>{5, 11, 17, 23, 29});

  auto sys2 = make_system({{4, {3}, 0}, {3, {2}, 0}});
  CHECK(enumerate_candidates(sys2, 0, 24) == std::vector<mpz_class>{11, 23});

  auto sys3 = make_system({{10, {1, 9}, 0}});
  CHECK(enumerate_candidates(sys3, 9, 41) ==
        std::vector<mpz_class>{9, 11, 19, 21, 29, 31, 39});

  // Non-coprime moduli cannot fold, so the smaller one runs as a bitmap.
  auto sys4 = make_system({{4, {1}, 0}, {6, {3}, 0}});
  CHECK(enumerate_candidates(sys4, 0, 40) == std::vector<mpz_class>{9, 21, 33});

  auto empty = make_system({{6, {5}, 0}, {7, {}, 0}});
  CHECK(enumerate_candidates(empty, 0, 100).empty());

  CHECK(enumerate_candidates(sys1, 12, 12).empty());
  CHECK_THROWS_AS(enumerate_candidates(sys1, 9, 3), std::invalid_argument);
}

TEST_CASE("candidate stream matches brute force on random systems") {
  std::mt19937 rng(20260817);
  std::uniform_int_distribution<int> mod_pick(2, 30);
  std::uniform_int_distribution<int> ncomp_pick(1, 3);
  std::uniform_int_distribution<long> lo_pick(0, 300);
  std::uniform_int_distribution<long> len_pick(0, 400);
  for (int trial = 0; trial < 30; ++trial) {
    int ncomp = ncomp_pick(rng);
    std::vector<SystemComponent> comps;
    for (int i = 0; i < ncomp; ++i) {
      uint64_t m = static_cast<uint64_t>(mod_pick(rng));
      std::vector<uint64_t> residues;
      for (uint64_t r = 0; r < m; ++r) {
        if (rng() % 3 == 0) residues.push_back(r);
      }
      if (residues.empty()) residues.push_back(rng() % m);
      comps.push_back({m, residues, 0});
    }
    long lo = lo_pick(rng);
    long hi = lo + len_pick(rng);
    auto sys = make_system(comps);
    CAPTURE(trial);
    CHECK(enumerate_candidates(sys, lo, hi) == brute_candidates(sys, lo, hi));
  }
}

TEST_CASE("candidate stream falls back to bitmaps past the fold cap") {
  std::mt19937 rng(7);
  std::vector<SystemComponent> comps;
  for (uint64_t m : {101, 103}) {
    std::set<uint64_t> rs;
    while (rs.size() < 70) rs.insert(rng() % m);
    comps.push_back({m, {rs.begin(), rs.end()}, 0});
  }
  auto sys = make_system(comps);
  CHECK(enumerate_candidates(sys, 0, 20000) == brute_candidates(sys, 0, 20000));
}

TEST_CASE("enumerate on the weight-16 system") {
  auto sys = build_system(FormId::of(16));
  CHECK(enumerate_candidates(sys, 0, 1000000000).empty());

  mpz_class m("248715499725");
  auto first_block = enumerate_candidates(sys, 0, 3 * m);
  REQUIRE(first_block.size() == 27);
  CHECK(first_block[0] == mpz_class("27635055524"));
  CHECK(first_block[1] == mpz_class("55270111049"));
  CHECK(first_block[2] == mpz_class("82905166574"));
  CHECK(std::is_sorted(first_block.begin(), first_block.end()));

  mpz_class c0("27635055524");
  CHECK(enumerate_candidates(sys, c0 - 3, c0 + 3) ==
        std::vector<mpz_class>{c0});
  CHECK(enumerate_candidates(sys, c0 + 1, c0 + 1000) == std::vector<mpz_class>{});
}

TEST_CASE("primality classification") {
  CHECK(primality_test(0) == Primality::Composite);
  CHECK(primality_test(1) == Primality::Composite);
  CHECK(primality_test(2) == Primality::Prime);
  CHECK(primality_test(41) == Primality::Prime);
  CHECK(primality_test(561) == Primality::Composite);   // Carmichael
  CHECK(primality_test(2147483647) == Primality::Prime);
  // Strong pseudoprime to bases 2, 3, 5, 7; trial division misses it.
  CHECK(primality_test(mpz_class("3215031751")) == Primality::Composite);
  // 2^61 - 1, comfortably below the deterministic bound.
  CHECK(primality_test(mpz_class("2305843009213693951")) == Primality::Prime);
  // The limit itself is the smallest strong pseudoprime to all 13 bases;
  // the extra bases must expose it.
  CHECK(primality_test(kDeterministicPrimalityLimit) == Primality::Composite);
  // 2^89 - 1 is prime but beyond the deterministic range.
  CHECK(primality_test(mpz_class("618970019642690137449562111")) ==
        Primality::ProbablePrime);
  CHECK(is_prime(2147483647));
  CHECK(!is_prime(kDeterministicPrimalityLimit));
  CHECK(is_prime(mpz_class("618970019642690137449562111")));
}

TEST_CASE("elimination of single primes") {
  auto quartic = builtin_quartic_59();

  // 59 = 6^2 + 23 * 1^2 is principal for the weight-12 classifier.
  auto r = eliminate(59, FormId::of(12), {});
  CHECK(r.status == EliminationStatus::Eliminated);
  CHECK(r.by_ell == 23);

  // 2 splits non-principally in discriminant -31.
  r = eliminate(2, FormId::of(16), {});
  CHECK(r.status == EliminationStatus::Eliminated);
  CHECK(r.by_ell == 31);

  // 47 = 4^2 + 31 * 1^2 is principal.
  r = eliminate(47, FormId::of(16), {});
  CHECK(r.status == EliminationStatus::Eliminated);
  CHECK(r.by_ell == 31);

  // 13 is inert in discriminant -31 and the quartic keeps it.
  r = eliminate(13, FormId::of(16), {quartic});
  CHECK(r.status == EliminationStatus::Survivor);
  r = eliminate(13, FormId::of(16), {});
  CHECK(r.status == EliminationStatus::Survivor);

  // The classifier cannot speak about its own prime.
  r = eliminate(31, FormId::of(16), {});
  CHECK(r.status == EliminationStatus::Indeterminate);
  CHECK(r.indeterminate_ells == std::vector<uint64_t>{31});

  // No classifier or polynomials for weight 18.
  r = eliminate(5, FormId::of(18), {});
  CHECK(r.status == EliminationStatus::Survivor);

  // A polynomial is mute at its own prime.
  ProjPolynomial own{59, 18, {mpz_class(3), mpz_class(11), mpz_class(-7),
                              mpz_class(-1), mpz_class(1)}};
  r = eliminate(59, FormId::of(18), {own});
  CHECK(r.status == EliminationStatus::Indeterminate);
  CHECK(r.indeterminate_ells == std::vector<uint64_t>{59});

  CHECK_THROWS_AS(eliminate(7, FormId::of(12), {quartic}),
                  std::invalid_argument);
}

TEST_CASE("checkpoint round trip and validation") {
  SieveCheckpoint ck;
  ck.k = 16;
  ck.system_digest = "0123456789abcdef";
  ck.scanned_upto = mpz_class("123456789123456789");
  ck.eliminations = {{"3", 10}, {"31", 4}, {"composite", 7}};
  ck.survivors = {{mpz_class("99999999977"), "survivor"}};

  auto path = temp_path("ck_roundtrip.json");
  save_checkpoint(ck, path);
  auto back = load_checkpoint(path);
  CHECK(back.k == ck.k);
  CHECK(back.system_digest == ck.system_digest);
  CHECK(back.scanned_upto == ck.scanned_upto);
  CHECK(back.eliminations == ck.eliminations);
  CHECK(back.survivors == ck.survivors);

  CHECK_THROWS_AS(load_checkpoint("/tmp/cuspsieve_missing_ck.json"), FileError);

  auto bad = temp_path("ck_bad.json");
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_checkpoint(bad), FileError);

  auto wrong = temp_path("ck_wrong_version.json");
  {
    std::ofstream out(wrong);
    out << R"({"version":"v2","k":16})";
  }
  CHECK_THROWS_AS(load_checkpoint(wrong), std::runtime_error);
  std::remove(path.c_str());
  std::remove(bad.c_str());
  std::remove(wrong.c_str());
}

TEST_CASE("search below the first candidate") {
  SearchOptions opt;
  opt.limit = 10000000;
  auto report = search(FormId::of(12), opt);
  CHECK(!report.first_survivor.has_value());
  CHECK(report.scanned_upto == 10000000);
  std::map<std::string, uint64_t> expected{{"2", 124}, {"3", 1}};
  CHECK(report.eliminations == expected);
  bool has_note = false;
  for (const auto& n : report.notes) {
    if (n.find("no polynomial checks") != std::string::npos) has_note = true;
  }
  CHECK(has_note);

  opt.limit = mpz_class("100000000000");
  report = search(FormId::of(16), opt);
  CHECK(!report.first_survivor.has_value());
  CHECK(report.scanned_upto == mpz_class("100000000000"));
  expected = {{"3", 498}, {"5", 8}, {"31", 3}};
  CHECK(report.eliminations == expected);
}

TEST_CASE("search finds the first unresolved prime") {
  SearchOptions opt;
  opt.limit = mpz_class("442160888400");
  opt.checkpoint_path = temp_path("k16_survivor.json");
  auto report = search(FormId::of(16), opt);
  REQUIRE(report.first_survivor.has_value());
  CHECK(*report.first_survivor == mpz_class("442160888399"));
  CHECK(report.survivor_status == "survivor");
  CHECK(report.scanned_upto == mpz_class("442160888399"));
  std::map<std::string, uint64_t> expected{
      {"3", 498}, {"5", 8}, {"31", 10}, {"composite", 5}};
  CHECK(report.eliminations == expected);

  auto ck = load_checkpoint(opt.checkpoint_path);
  CHECK(ck.k == 16);
  CHECK(ck.system_digest == system_digest(build_system(FormId::of(16)), {}));
  REQUIRE(ck.survivors.size() == 1);
  CHECK(ck.survivors[0].first == mpz_class("442160888399"));
  CHECK(ck.survivors[0].second == "survivor");
  std::remove(opt.checkpoint_path.c_str());

  SearchOptions opt12;
  opt12.limit = mpz_class("113740236288000");
  auto r12 = search(FormId::of(12), opt12);
  REQUIRE(r12.first_survivor.has_value());
  CHECK(*r12.first_survivor == mpz_class("113740236287999"));
  CHECK(r12.survivor_status == "survivor");
  std::map<std::string, uint64_t> expected12{
      {"2", 124}, {"3", 1}, {"23", 8}, {"composite", 9}};
  CHECK(r12.eliminations == expected12);
}

TEST_CASE("partitioning and workers do not change the outcome") {
  SearchOptions base;
  base.limit = mpz_class("442160888400");
  auto reference = report_to_json(search(FormId::of(16), base));

  SearchOptions alt = base;
  alt.chunk_width = mpz_class("100000000000");
  CHECK(report_to_json(search(FormId::of(16), alt)) == reference);

  alt.workers = 3;
  CHECK(report_to_json(search(FormId::of(16), alt)) == reference);

  alt.chunk_width = mpz_class("33333333333");
  alt.workers = 4;
  CHECK(report_to_json(search(FormId::of(16), alt)) == reference);
}

TEST_CASE("resume continues a search") {
  auto path = temp_path("k16_resume.json");
  SearchOptions first;
  first.limit = mpz_class("100000000000");
  first.checkpoint_path = path;
  auto partial = search(FormId::of(16), first);
  CHECK(!partial.first_survivor.has_value());

  SearchOptions second;
  second.limit = mpz_class("442160888400");
  second.resume_path = path;
  auto resumed = search(FormId::of(16), second);
  REQUIRE(resumed.first_survivor.has_value());
  CHECK(*resumed.first_survivor == mpz_class("442160888399"));

  SearchOptions oneshot;
  oneshot.limit = second.limit;
  auto full = search(FormId::of(16), oneshot);
  CHECK(resumed.eliminations == full.eliminations);
  CHECK(resumed.scanned_upto == full.scanned_upto);
  CHECK(*resumed.first_survivor == *full.first_survivor);

  // Changing the polynomial set invalidates the checkpoint.
  SearchOptions with_poly = second;
  with_poly.polys = {builtin_quartic_59()};
  CHECK_THROWS_AS(search(FormId::of(16), with_poly), std::runtime_error);

  // So does switching the weight.
  SearchOptions other_weight = second;
  CHECK_THROWS_AS(search(FormId::of(18), other_weight), std::runtime_error);

  // A checkpoint stopping inside the small-prime regime cannot be resumed.
  SieveCheckpoint early;
  early.k = 16;
  early.system_digest = system_digest(build_system(FormId::of(16)), {});
  early.scanned_upto = 100;
  save_checkpoint(early, path);
  CHECK_THROWS_AS(search(FormId::of(16), second), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("search rejects foreign polynomials") {
  SearchOptions opt;
  opt.limit = 10;
  opt.polys = {builtin_quartic_59()};
  CHECK_THROWS_AS(search(FormId::of(18), opt), std::invalid_argument);
}

TEST_CASE("certify known bound members") {
  const std::map<int, mpz_class> bounds{
      {16, mpz_class("12604744061516618549")},
      {18, mpz_class("143412400182350051864999")},
      {20, mpz_class("74201833676082662549")},
      {22, mpz_class("28265095927027650599999")},
  };
  for (const auto& [k, value] : bounds) {
    CAPTURE(k);
    auto report = certify_bound_membership(FormId::of(k), value);
    CHECK(report.all_pass);
    CHECK(report.primality == Primality::Prime);
    for (const auto& c : report.components) CHECK(c.pass);
    for (const auto& f : report.filters) CHECK(f.pass);
  }

  auto r12 = certify_bound_membership(FormId::of(12),
                                      mpz_class("113740236287999"));
  CHECK(r12.all_pass);
  CHECK(r12.primality == Primality::Prime);

  auto miss = certify_bound_membership(FormId::of(12), 17);
  CHECK(!miss.all_pass);
}

TEST_CASE("certify flags the weight-26 mod-657931 mismatch") {
  // This value satisfies every congruence except the mod-657931 component:
  // its residue 157780 is a digit transposition of the true root 157708.
  auto report = certify_bound_membership(
      FormId::of(26), mpz_class("818406791865712833299"));
  CHECK(!report.all_pass);
  CHECK(report.primality == Primality::Prime);
  for (const auto& f : report.filters) CHECK(f.pass);
  int failures = 0;
  for (const auto& c : report.components) {
    if (!c.pass) {
      ++failures;
      CHECK(c.modulus == 657931);
      CHECK(c.residue == 157780);
    }
  }
  CHECK(failures == 1);

  auto json = nlohmann::json::parse(certify_to_json(report));
  CHECK(json["all_pass"] == false);
  CHECK(json["value"] == "818406791865712833299");
  CHECK(json["primality"] == "prime");
}

TEST_CASE("system digest reflects the configuration") {
  auto s16 = build_system(FormId::of(16));
  auto s18 = build_system(FormId::of(18));
  auto plain = system_digest(s16, {});
  CHECK(plain == system_digest(s16, {}));
  CHECK(plain != system_digest(s16, {builtin_quartic_59()}));
  CHECK(plain != system_digest(s18, {}));
  CHECK(plain.size() == 16);
}

TEST_CASE("report json shape") {
  SearchOptions opt;
  opt.limit = 10000000;
  auto report = search(FormId::of(12), opt);
  auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j["k"] == 12);
  CHECK(j["first_survivor"].is_null());
  CHECK(j["scanned_upto"] == "10000000");
  CHECK(j["eliminations"]["2"] == 124);
  CHECK(j["notes"].is_array());

  opt.limit = mpz_class("113740236288000");
  auto hit = nlohmann::json::parse(report_to_json(search(FormId::of(12), opt)));
  CHECK(hit["first_survivor"] == "113740236287999");
  CHECK(hit["survivor_status"] == "survivor");
}
