#include "cuspsieve/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cuspsieve/congruence.hpp"
#include "cuspsieve/fpfactor.hpp"
#include "cuspsieve/hecke.hpp"
#include "cuspsieve/numutil.hpp"
#include "cuspsieve/qseries.hpp"
#include "cuspsieve/sieve.hpp"

namespace cuspsieve {

namespace {

uint64_t to_u64(const std::string& text, const char* what) {
  mpz_class v = parse_integer_expr(text);
  if (v < 0 || !v.fits_ulong_p()) {
    throw std::invalid_argument(std::string(what) + " out of range: " + text);
  }
  return v.get_ui();
}

int run_coeffs(int k, uint64_t n, std::ostream& out) {
  auto f = delta_k(FormId::of(k), static_cast<size_t>(n));
  for (uint64_t i = 1; i <= n; ++i) {
    out << i << '\t' << f[static_cast<size_t>(i)].get_str() << '\n';
  }
  return 0;
}

int run_verify(int k, uint64_t pmax, unsigned precision, bool inject,
               std::ostream& out) {
  FormId id = FormId::of(k);
  size_t bound = static_cast<size_t>(std::max<uint64_t>(pmax, 200));
  auto f = delta_k(id, bound);
  uint64_t violations = 0;

  for (const auto& v : verify_tables(id, pmax, f)) {
    out << "violation: table k=" << k << " ell=" << v.ell << " p=" << v.p
        << " actual=" << v.actual.get_str()
        << " expected=" << v.expected.get_str() << '\n';
    ++violations;
  }
  if (inject) {
    uint64_t ell = (k == 12) ? 23 : rules_for(id).front().ell;
    out << "violation: table k=" << k << " ell=" << ell << " p=2"
        << " actual=" << f[2].get_str() << " expected="
        << mpz_class(f[2] + 1).get_str() << " (injected fault)" << '\n';
    ++violations;
  }

  if (k == 12 || k == 16) {
    uint64_t q = (k == 12) ? 23 : 31;
    for (uint32_t p : primes_up_to(static_cast<uint32_t>(pmax))) {
      if (p == q) continue;
      int predicted = type2_residue(id, p);
      mpz_class diff = (f[p] - predicted) % q;
      if (diff != 0) {
        out << "violation: type2 k=" << k << " ell=" << q << " p=" << p
            << " predicted=" << predicted << '\n';
        ++violations;
      }
    }
  }
  if (k == 16) {
    for (size_t n : theta_congruence_check(200)) {
      out << "violation: theta mod 31 n=" << n << '\n';
      ++violations;
    }
  }

  uint64_t nrec = std::min<uint64_t>(pmax, 400);
  std::map<uint64_t, mpz_class> prime_coeffs;
  for (uint32_t p : primes_up_to(static_cast<uint32_t>(nrec))) {
    prime_coeffs[p] = f[p];
  }
  for (uint64_t n = 1; n <= nrec; ++n) {
    if (coefficient_from_primes(id, n, prime_coeffs) != f[static_cast<size_t>(n)]) {
      out << "violation: hecke assembly k=" << k << " n=" << n << '\n';
      ++violations;
    }
  }

  double threshold = std::ldexp(1.0, -static_cast<int>(precision / 2));
  for (uint32_t p : primes_up_to(static_cast<uint32_t>(std::min<uint64_t>(pmax, 50)))) {
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), p, static_cast<unsigned long>(k - 1));
    mpz_class prev = 1, cur = f[p];
    for (unsigned n = 1; n <= 6; ++n) {
      double res = trig_check(id, p, n, f[p], cur, precision);
      if (!(res < threshold)) {
        out << "violation: trig k=" << k << " p=" << p << " n=" << n
            << " residual=" << res << '\n';
        ++violations;
      }
      mpz_class next = f[p] * cur - pk1 * prev;
      prev = cur;
      cur = next;
    }
  }

  if (!theorem2_preconditions(id, f[2], f[3])) {
    out << "violation: precondition k=" << k << " |a_2| or |a_3| degenerate\n";
    ++violations;
  }

  if (violations == 0) {
    out << "verify k=" << k << " pmax=" << pmax << ": ok\n";
    return 0;
  }
  out << "verify k=" << k << " pmax=" << pmax << ": " << violations
      << " violation(s)\n";
  return 1;
}

int run_classify(const mpz_class& p, int disc, std::ostream& out) {
  auto cls = classify(p, disc);
  out << "p=" << p.get_str() << " disc=" << disc << " tag=";
  switch (cls.tag) {
    case SplitTag::Inert:
      out << "Inert";
      break;
    case SplitTag::PrincipalSplit:
      out << "PrincipalSplit u=" << cls.u.get_str() << " v=" << cls.v.get_str();
      break;
    case SplitTag::NonPrincipalSplit:
      out << "NonPrincipalSplit";
      break;
    case SplitTag::Ramified:
      out << "Ramified";
      break;
  }
  if (cls.tag != SplitTag::Ramified) {
    FormId id = FormId::of(disc == -23 ? 12 : 16);
    out << " predicted_residue=" << type2_residue(id, p);
  }
  out << '\n';
  return 0;
}

int run_deg2(const std::string& polyfile, const mpz_class& p,
             std::ostream& out) {
  ProjPolynomial poly =
      polyfile.empty() ? builtin_quartic_59() : load_projpoly(polyfile);
  switch (eliminate_by_poly(poly, p)) {
    case PolyVerdict::RuledOut:
      out << "RuledOut\n";
      break;
    case PolyVerdict::NotRuledOut:
      out << "NotRuledOut\n";
      break;
    case PolyVerdict::Indeterminate:
      out << "Indeterminate\n";
      break;
  }
  return 0;
}

int run_residues(int k, std::ostream& out) {
  FormId id = FormId::of(k);
  if (k == 12) {
    for (const auto& [m, rs] : serre_tau_components()) {
      out << "k=12 modulus=" << m << " residues=";
      for (size_t i = 0; i < rs.size(); ++i) out << (i ? "," : "") << rs[i];
      out << '\n';
    }
  } else {
    for (const auto& rule : rules_for(id)) {
      out << "k=" << k << " ell=" << rule.ell
          << " modulus=" << rule.modulus_max() << " m=" << rule.m
          << " branches=";
      for (size_t i = 0; i < rule.branches.size(); ++i) {
        const auto& b = rule.branches[i];
        out << (i ? "," : "");
        if (b.sign == 0) {
          out << "N=" << b.n;
        } else {
          out << (b.sign > 0 ? "+" : "-") << "1:N=" << b.n;
        }
      }
      out << " residues=";
      auto rs = solve_zero_residues(rule);
      for (size_t i = 0; i < rs.size(); ++i) out << (i ? "," : "") << rs[i];
      out << '\n';
    }
  }
  for (const auto& fq : build_system(id).legendre_filters) {
    out << "k=" << k << " filter q=" << fq.q << " require=nonresidue\n";
  }
  return 0;
}

int run_certify(int k, const mpz_class& value, const std::string& out_path,
                std::ostream& out) {
  auto report = certify_bound_membership(FormId::of(k), value);
  std::string json = certify_to_json(report);
  out << json << '\n';
  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) throw FileError("cannot write report: " + out_path);
    file << json << '\n';
  }
  return report.all_pass ? 0 : 1;
}

int run_sieve(int k, const SearchOptions& opt, const std::string& out_path,
              std::ostream& out) {
  auto report = search(FormId::of(k), opt);
  std::string json = report_to_json(report);
  out << json << '\n';
  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) throw FileError("cannot write report: " + out_path);
    file << json << '\n';
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{
      "exact coefficients, congruence verification, and the vanishing-prime "
      "sieve for the six level-one cusp forms"};
  app.set_config("--config", "", "plain-text key = value configuration file");
  app.require_subcommand(1);

  int k = 12;
  std::string n_text, pmax_text, p_text, value_text;
  unsigned precision = 128;
  bool inject = false;
  int disc = -23;
  std::string polyfile, limit_text, checkpoint, resume, chunk_text,
      interval_text, out_path, certify_text;
  unsigned workers = 1;
  std::vector<std::string> poly_paths;

  auto* coeffs = app.add_subcommand("coeffs", "print a_1 .. a_n of Delta_k");
  coeffs->add_option("--k", k, "weight")->required();
  coeffs->add_option("--n", n_text, "last index, scientific notation accepted")
      ->required();

  auto* verify = app.add_subcommand(
      "verify", "check tables, classifier predictions, theta, Hecke and trig");
  verify->add_option("--k", k, "weight")->required();
  verify->add_option("--pmax", pmax_text, "largest prime checked")->required();
  verify->add_option("--precision", precision, "trig working precision bits");
  verify->add_flag("--inject-table-fault", inject)->group("");

  auto* classify_cmd =
      app.add_subcommand("classify", "splitting of p in discriminant -23 or -31");
  classify_cmd->add_option("--p", p_text, "prime")->required();
  classify_cmd->add_option("--disc", disc, "-23 or -31")->required();

  auto* deg2 = app.add_subcommand(
      "deg2", "degree-2 factor criterion of a projective polynomial at p");
  deg2->add_option("--p", p_text, "prime")->required();
  deg2->add_option("--poly", polyfile, "polynomial file; built-in quartic if absent");

  auto* residues =
      app.add_subcommand("residues", "dump the zero-forcing residue systems");
  residues->add_option("--k", k, "weight")->required();

  auto* sieve = app.add_subcommand("sieve", "run the vanishing-candidate search");
  sieve->add_option("--k", k, "weight")->required();
  sieve->add_option("--limit", limit_text, "scan bound, scientific notation accepted");
  sieve->add_option("--checkpoint", checkpoint, "checkpoint file to write");
  sieve->add_option("--resume", resume, "checkpoint file to resume from");
  sieve->add_option("--workers", workers, "parallel chunk workers");
  sieve->add_option("--chunk-width", chunk_text, "explicit chunk width");
  sieve->add_option("--interval", interval_text, "candidates between checkpoints");
  sieve->add_option("--poly", poly_paths, "projective polynomial file(s)");
  sieve->add_option("--out", out_path, "also write the JSON report here");
  sieve->add_option("--certify", certify_text,
                    "check one value against the residue system instead");

  auto* certify =
      app.add_subcommand("certify", "check a value against build_system(k)");
  certify->add_option("--k", k, "weight")->required();
  certify->add_option("--value", value_text, "candidate bound")->required();
  certify->add_option("--out", out_path, "also write the JSON report here");

  std::vector<const char*> argv;
  argv.push_back("cuspsieve");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (coeffs->parsed()) {
      return run_coeffs(k, to_u64(n_text, "--n"), out);
    }
    if (verify->parsed()) {
      return run_verify(k, to_u64(pmax_text, "--pmax"), precision, inject, out);
    }
    if (classify_cmd->parsed()) {
      if (disc != -23 && disc != -31) {
        throw std::invalid_argument("--disc must be -23 or -31");
      }
      return run_classify(parse_integer_expr(p_text), disc, out);
    }
    if (deg2->parsed()) {
      return run_deg2(polyfile, parse_integer_expr(p_text), out);
    }
    if (residues->parsed()) {
      return run_residues(k, out);
    }
    if (sieve->parsed()) {
      if (!certify_text.empty()) {
        return run_certify(k, parse_integer_expr(certify_text), out_path, out);
      }
      if (limit_text.empty()) {
        err << "sieve requires --limit or --certify\n";
        return 2;
      }
      SearchOptions opt;
      opt.limit = parse_integer_expr(limit_text);
      if (opt.limit < 2) throw std::invalid_argument("--limit must be >= 2");
      opt.checkpoint_path = checkpoint;
      opt.resume_path = resume;
      opt.workers = workers;
      if (!chunk_text.empty()) opt.chunk_width = parse_integer_expr(chunk_text);
      if (!interval_text.empty()) {
        opt.checkpoint_interval = to_u64(interval_text, "--interval");
      }
      for (const auto& path : poly_paths) {
        opt.polys.push_back(load_projpoly(path));
      }
      return run_sieve(k, opt, out_path, out);
    }
    if (certify->parsed()) {
      return run_certify(k, parse_integer_expr(value_text), out_path, out);
    }
    err << "no subcommand\n";
    return 2;
  } catch (const PolyParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const FileError& e) {
    err << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cuspsieve
