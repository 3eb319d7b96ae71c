#pragma once

// JSON encodings shared by the CLI and tests.
//
//   matrix:     {"dim": d, "entries": [[[re, im], ...], ...], "labels": [...]}  (row-major, labels optional)
//   polynomial: {"n": 2, "terms": [{"mu": "12", "nu": "", "re": 0.5, "im": 0.0}, ...]}
//   witness:    {"backend": "matrix"|"symbolic", "n": ..., "elements": [...], "report": {...}, "interior": [bool...]}
//   family:     {"generators": [<matrix>, ...], "interior": [bool...]}
//
// Objects keep insertion order and floats print in shortest round-trip form, so
// identical inputs give byte-identical output.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "cstar/decompose.hpp"
#include "cstar/operator.hpp"
#include "cstar/star_polynomial.hpp"
#include "cstar/trace_distance.hpp"
#include "cstar/witness.hpp"

namespace cstar::json {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void format_error(const std::string& what) { throw Error(ErrorCode::FormatError, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) format_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) format_error(std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) format_error(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace detail

inline Json to_json(const Operator& x) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < x.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < x.dim(); ++j) row.push_back({x(i, j).real(), x(i, j).imag()});
    rows.push_back(std::move(row));
  }
  Json out{{"dim", x.dim()}, {"entries", std::move(rows)}};
  if (x.has_labels()) out["labels"] = x.labels();
  return out;
}

inline Operator operator_from_json(const Json& j) {
  const std::size_t dim = detail::count(detail::field(j, "dim"), "dim");
  if (dim == 0) detail::format_error("dim must be positive");
  const Json& rows = detail::field(j, "entries");
  if (!rows.is_array() || rows.size() != dim) detail::format_error("entries must have dim rows");
  Operator out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!rows[i].is_array() || rows[i].size() != dim) detail::format_error("every row must have dim entries");
    for (std::size_t k = 0; k < dim; ++k) {
      const Json& e = rows[i][k];
      if (e.is_number()) {
        out(i, k) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        out(i, k) = Complex(detail::number(e[0], "real part"), detail::number(e[1], "imaginary part"));
      } else {
        detail::format_error("entries must be [re, im] pairs");
      }
    }
  }
  if (j.contains("labels")) {
    try {
      out.set_labels(j.at("labels").get<std::vector<std::string>>());
    } catch (const Json::exception&) {
      detail::format_error("labels must be strings");
    } catch (const Error& e) {
      detail::format_error(e.what());
    }
  }
  return out;
}

inline Json to_json(const StarPolynomial& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms())
    terms.push_back({{"mu", m.mu.str()}, {"nu", m.nu.str()}, {"re", c.real()}, {"im", c.imag()}});
  return Json{{"n", p.generators()}, {"terms", std::move(terms)}};
}

inline StarPolynomial polynomial_from_json(const Json& j) {
  const std::size_t n = detail::count(detail::field(j, "n"), "n");
  StarPolynomial out(static_cast<int>(n));
  const Json& terms = detail::field(j, "terms");
  if (!terms.is_array()) detail::format_error("terms must be an array");
  for (const auto& t : terms) {
    const Json& mu = detail::field(t, "mu");
    const Json& nu = detail::field(t, "nu");
    if (!mu.is_string() || !nu.is_string()) detail::format_error("mu and nu must be digit strings");
    const double im = t.contains("im") ? detail::number(t.at("im"), "im") : 0.0;
    Word mu_word(mu.get<std::string>()), nu_word(nu.get<std::string>());
    for (const Word* w : {&mu_word, &nu_word})
      if (!w->empty() && w->max_letter() > int(n))
        throw Error(ErrorCode::IndexOutOfRange, "word \"" + w->str() + "\" uses a letter above n");
    out.add_term(std::move(mu_word), std::move(nu_word), Complex(detail::number(detail::field(t, "re"), "re"), im));
  }
  out.prune();
  return out;
}

/// Anything that is either a matrix or a polynomial.
using Element = std::variant<Operator, StarPolynomial>;

inline Element element_from_json(const Json& j) {
  if (j.is_object() && j.contains("terms")) return polynomial_from_json(j);
  return operator_from_json(j);
}

inline Json to_json(const WitnessReport& r) {
  Json out{{"eta1", r.eta1}, {"eta2", r.eta2}, {"valid", r.valid}};
  if (r.eta1_interior) {
    out["eta1_interior"] = *r.eta1_interior;
    out["interior_valid"] = r.interior_valid;
  }
  return out;
}

inline Json mask_to_json(const Operator& mask) {
  Json out = Json::array();
  for (std::size_t i = 0; i < mask.dim(); ++i) out.push_back(mask(i, i) != Complex{});
  return out;
}

inline Operator mask_from_json(const Json& j, std::size_t dim) {
  if (!j.is_array() || j.size() != dim) detail::format_error("interior must list one flag per basis vector");
  std::unique_ptr<bool[]> keep(new bool[dim]);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!j[i].is_boolean()) detail::format_error("interior flags must be booleans");
    keep[i] = j[i].get<bool>();
  }
  return coordinate_projection(std::span<const bool>(keep.get(), dim));
}

inline Json to_json(const MatrixWitness& w, int n) {
  Json elements = Json::array();
  for (const auto& b : w.elements) elements.push_back(to_json(b));
  Json out{{"backend", "matrix"}, {"n", n}, {"elements", std::move(elements)}, {"report", to_json(w.report)}};
  if (w.interior_mask) out["interior"] = mask_to_json(*w.interior_mask);
  return out;
}

inline Json to_json(const SymbolicWitness& w) {
  Json elements = Json::array();
  for (const auto& b : w.elements) elements.push_back(to_json(b));
  const int n = w.elements.empty() ? 0 : w.elements.front().generators();
  return Json{{"backend", "symbolic"}, {"n", n}, {"elements", std::move(elements)}, {"report", to_json(w.report)}};
}

/// Elements of a witness file; the stored report is ignored and recomputed by the caller.
struct WitnessFile {
  std::string backend;
  std::vector<Operator> matrices;
  std::vector<StarPolynomial> polynomials;
  std::optional<Operator> interior_mask;
};

inline WitnessFile witness_from_json(const Json& j) {
  WitnessFile out;
  const Json& backend = detail::field(j, "backend");
  if (!backend.is_string()) detail::format_error("backend must be a string");
  out.backend = backend.get<std::string>();
  const Json& elements = detail::field(j, "elements");
  if (!elements.is_array()) detail::format_error("elements must be an array");
  if (out.backend == "matrix") {
    for (const auto& e : elements) out.matrices.push_back(operator_from_json(e));
    if (j.contains("interior")) {
      if (out.matrices.empty()) detail::format_error("interior given for an empty family");
      out.interior_mask = mask_from_json(j.at("interior"), out.matrices.front().dim());
    }
  } else if (out.backend == "symbolic") {
    for (const auto& e : elements) out.polynomials.push_back(polynomial_from_json(e));
  } else {
    detail::format_error("backend must be \"matrix\" or \"symbolic\"");
  }
  return out;
}

inline Json to_json(const CommutatorSpanFamily& family) {
  Json gens = Json::array();
  for (const auto& a : family.generators) gens.push_back(to_json(a));
  return Json{{"generators", std::move(gens)}};
}

struct FamilyFile {
  CommutatorSpanFamily family;
  std::optional<Operator> interior_mask;
};

inline FamilyFile family_from_json(const Json& j) {
  const Json& gens = detail::field(j, "generators");
  if (!gens.is_array()) detail::format_error("generators must be an array");
  std::vector<Operator> ops;
  for (const auto& g : gens) ops.push_back(operator_from_json(g));
  FamilyFile out;
  if (ops.empty()) {
    out.family = CommutatorSpanFamily(detail::count(detail::field(j, "dim"), "dim"));
  } else {
    out.family = CommutatorSpanFamily(std::move(ops));
  }
  if (j.contains("interior")) out.interior_mask = mask_from_json(j.at("interior"), out.family.dim());
  return out;
}

inline Json to_json(const DistanceEstimate& e) {
  return Json{{"coefficients", e.coefficients},
              {"frobenius_residual", e.frobenius_residual},
              {"opnorm_residual", e.opnorm_residual}};
}

inline Json to_json(const SolverInfo& info) {
  return Json{{"method", to_string(info.method)}, {"iterations", info.iterations}, {"tail_bound", info.tail_bound}};
}

template <class E>
Json pairs_to_json(const std::vector<CommutatorPair<E>>& pairs) {
  Json out = Json::array();
  for (const auto& p : pairs) out.push_back({{"x", to_json(p.x)}, {"y", to_json(p.y)}, {"self_adjoint", p.self_adjoint_form}});
  return out;
}

inline std::vector<CommutatorPair<Operator>> pairs_from_json(const Json& j) {
  if (!j.is_array()) detail::format_error("pairs must be an array");
  std::vector<CommutatorPair<Operator>> out;
  for (const auto& p : j) {
    const Json& flag = detail::field(p, "self_adjoint");
    if (!flag.is_boolean()) detail::format_error("self_adjoint must be a boolean");
    out.push_back({operator_from_json(detail::field(p, "x")), operator_from_json(detail::field(p, "y")), flag.get<bool>()});
  }
  return out;
}

inline Json to_json(const DecompositionResult& r) {
  Json out{{"n", r.pairs.size()}, {"pairs", pairs_to_json(r.pairs)}, {"residual_norm", r.residual_norm}};
  out["residual_interior_norm"] = r.residual_interior_norm ? Json(*r.residual_interior_norm) : Json(nullptr);
  out["trace_defect"] = r.trace_defect;
  out["solver"] = to_json(r.solver);
  out["psi"] = to_json(r.psi_a);
  return out;
}

}  // namespace cstar::json
