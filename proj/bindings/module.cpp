#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "cuspsieve/congruence.hpp"
#include "cuspsieve/fpfactor.hpp"
#include "cuspsieve/hecke.hpp"
#include "cuspsieve/qseries.hpp"
#include "cuspsieve/sieve.hpp"

namespace py = pybind11;
using namespace cuspsieve;

namespace {

// Arbitrary-precision values cross the boundary as decimal strings.
py::int_ to_py(const mpz_class& z) { return py::int_(py::str(z.get_str())); }

mpz_class from_py(py::handle h) {
  return mpz_class(py::str(h).cast<std::string>(), 10);
}

const char* tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::Inert: return "Inert";
    case SplitTag::PrincipalSplit: return "PrincipalSplit";
    case SplitTag::NonPrincipalSplit: return "NonPrincipalSplit";
    case SplitTag::Ramified: return "Ramified";
  }
  return "?";
}

const char* verdict_name(PolyVerdict v) {
  switch (v) {
    case PolyVerdict::RuledOut: return "RuledOut";
    case PolyVerdict::NotRuledOut: return "NotRuledOut";
    case PolyVerdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "exact coefficients, congruences, and the vanishing-prime sieve for "
      "the six level-one cusp forms";

  m.def("weights", [] {
    const auto& w = FormId::weights();
    return std::vector<int>(w.begin(), w.end());
  });

  m.def(
      "delta_coeffs",
      [](int k, size_t bound) {
        auto f = delta_k(FormId::of(k), bound);
        py::list out;
        for (const auto& c : f.coeffs()) out.append(to_py(c));
        return out;
      },
      py::arg("k"), py::arg("bound"),
      "coefficients a_0 .. a_bound of Delta_k");

  m.def(
      "coefficient_from_primes",
      [](int k, uint64_t n, const std::map<uint64_t, py::object>& primes) {
        std::map<uint64_t, mpz_class> coeffs;
        for (const auto& [p, v] : primes) coeffs[p] = from_py(v);
        return to_py(coefficient_from_primes(FormId::of(k), n, coeffs));
      },
      py::arg("k"), py::arg("n"), py::arg("prime_coeffs"));

  m.def(
      "trig_residual",
      [](int k, uint64_t p, unsigned n, py::object a_p, py::object a_pn,
         unsigned precision_bits) {
        return trig_check(FormId::of(k), p, n, from_py(a_p), from_py(a_pn),
                          precision_bits);
      },
      py::arg("k"), py::arg("p"), py::arg("n"), py::arg("a_p"),
      py::arg("a_pn"), py::arg("precision_bits") = 128);

  m.def(
      "theorem2_preconditions",
      [](int k, py::object a2, py::object a3) {
        return theorem2_preconditions(FormId::of(k), from_py(a2), from_py(a3));
      },
      py::arg("k"), py::arg("a2"), py::arg("a3"));

  m.def(
      "smallest_vanishing",
      [](int k, uint64_t bound) -> py::object {
        auto hit = smallest_vanishing_scan(FormId::of(k), bound);
        if (!hit) return py::none();
        return py::int_(*hit);
      },
      py::arg("k"), py::arg("bound"));

  m.def(
      "verify_tables",
      [](int k, uint64_t pmax) {
        py::list out;
        for (const auto& v : verify_tables(FormId::of(k), pmax)) {
          out.append(py::make_tuple(v.p, v.ell, to_py(v.actual),
                                    to_py(v.expected)));
        }
        return out;
      },
      py::arg("k"), py::arg("pmax"),
      "violations as (p, ell, actual, expected); empty when clean");

  m.def(
      "zero_residues",
      [](int k) {
        py::list out;
        for (const auto& c : build_system(FormId::of(k)).components) {
          py::dict d;
          d["ell"] = c.source_ell;
          d["modulus"] = c.modulus;
          d["residues"] = c.residues;
          out.append(d);
        }
        return out;
      },
      py::arg("k"));

  m.def(
      "legendre_filters",
      [](int k) {
        std::vector<uint64_t> out;
        for (const auto& f : build_system(FormId::of(k)).legendre_filters) {
          out.push_back(f.q);
        }
        return out;
      },
      py::arg("k"));

  m.def(
      "classify",
      [](py::object p, int disc) {
        auto cls = classify(from_py(p), disc);
        py::dict d;
        d["tag"] = tag_name(cls.tag);
        if (cls.tag == SplitTag::PrincipalSplit) {
          d["u"] = to_py(cls.u);
          d["v"] = to_py(cls.v);
        }
        return d;
      },
      py::arg("p"), py::arg("disc"));

  m.def(
      "type2_residue",
      [](int k, py::object p) {
        return type2_residue(FormId::of(k), from_py(p));
      },
      py::arg("k"), py::arg("p"));

  m.def("theta_congruence_check", &theta_congruence_check, py::arg("nmax"));

  m.def(
      "deg2",
      [](py::object p, const std::string& poly_path) {
        ProjPolynomial poly = poly_path.empty() ? builtin_quartic_59()
                                                : load_projpoly(poly_path);
        return std::string(verdict_name(eliminate_by_poly(poly, from_py(p))));
      },
      py::arg("p"), py::arg("poly_path") = "");

  m.def(
      "enumerate_candidates",
      [](int k, py::object lo, py::object hi) {
        py::list out;
        for (const auto& c :
             enumerate_candidates(build_system(FormId::of(k)), from_py(lo),
                                  from_py(hi))) {
          out.append(to_py(c));
        }
        return out;
      },
      py::arg("k"), py::arg("lo"), py::arg("hi"));

  m.def(
      "is_prime", [](py::object n) { return is_prime(from_py(n)); },
      py::arg("n"));

  m.def(
      "primality",
      [](py::object n) -> std::string {
        switch (primality_test(from_py(n))) {
          case Primality::Prime: return "prime";
          case Primality::ProbablePrime: return "probable_prime";
          case Primality::Composite: break;
        }
        return "composite";
      },
      py::arg("n"));

  m.def(
      "search_json",
      [](int k, py::object limit, unsigned workers,
         const std::string& checkpoint, const std::string& resume,
         py::object chunk_width, const std::vector<std::string>& poly_paths) {
        SearchOptions opt;
        opt.limit = from_py(limit);
        opt.workers = workers;
        opt.checkpoint_path = checkpoint;
        opt.resume_path = resume;
        opt.chunk_width = from_py(chunk_width);
        for (const auto& path : poly_paths) {
          opt.polys.push_back(load_projpoly(path));
        }
        return report_to_json(search(FormId::of(k), opt));
      },
      py::arg("k"), py::arg("limit"), py::arg("workers") = 1,
      py::arg("checkpoint") = "", py::arg("resume") = "",
      py::arg("chunk_width") = py::int_(0),
      py::arg("poly_paths") = std::vector<std::string>{});

  m.def(
      "certify_json",
      [](int k, py::object value) {
        return certify_to_json(
            certify_bound_membership(FormId::of(k), from_py(value)));
      },
      py::arg("k"), py::arg("value"));
}
