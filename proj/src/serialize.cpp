#include "quotrep/serialize.hpp"

#include <fstream>

namespace quotrep {

Json params_to_json(const ModuliParams& p) {
  Json j;
  j["rank"] = p.r;
  j["genus"] = p.g;
  j["deg_v"] = p.n;
  return j;
}

Json state_to_json(const CurveAlgebra& alg, const FockState& s) {
  Json out;
  if (!s.labels.empty()) out["labels"] = s.labels;
  Json terms = Json::array();
  for (const auto& [key, q] : s.terms) {
    Json t;
    Json slots = Json::array();
    for (const Slot& sl : key.vec.slots) {
      slots.push_back(Json::array({sl.k, alg.letter_name(sl.dec)}));
    }
    t["slots"] = std::move(slots);
    if (!key.ext.empty()) {
      Json ext = Json::array();
      for (LetterId a : key.ext) ext.push_back(alg.letter_name(a));
      t["ext"] = std::move(ext);
    }
    t["coeff"] = to_string(q);
    terms.push_back(std::move(t));
  }
  if (s.labels.empty()) return terms;  // plain array per the capped schema
  out["terms"] = std::move(terms);
  return out;
}

namespace {

LetterId letter_or_throw(const CurveAlgebra& alg, const std::string& name) {
  auto id = alg.letter_from_name(name);
  if (!id) throw std::invalid_argument("unknown curve letter '" + name + "'");
  return *id;
}

Rational rational_from_string(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("malformed rational '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace

FockState state_from_json(const CurveAlgebra& alg, const Json& j) {
  FockState s;
  s.genus = alg.genus();
  const Json* terms = &j;
  if (j.is_object()) {
    if (j.contains("labels")) {
      for (const auto& l : j.at("labels")) s.labels.push_back(l.get<std::string>());
    }
    terms = &j.at("terms");
  }
  for (const auto& t : *terms) {
    TermKey key;
    for (const auto& sl : t.at("slots")) {
      key.vec.slots.push_back(
          Slot{sl.at(0).get<int>(), letter_or_throw(alg, sl.at(1).get<std::string>())});
    }
    if (t.contains("ext")) {
      for (const auto& e : t.at("ext"))
        key.ext.push_back(letter_or_throw(alg, e.get<std::string>()));
    }
    if (key.ext.size() != s.labels.size())
      throw std::invalid_argument("state term does not match the label set");
    s.add_term(key, rational_from_string(t.at("coeff").get<std::string>()));
  }
  return s;
}

FockState load_state_file(const CurveAlgebra& alg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open state file " + path);
  Json j = Json::parse(in);
  return state_from_json(alg, j);
}

Json matrix_to_json(const CurveAlgebra& alg, const SparseMatrix& m) {
  Json out;
  auto basis_json = [&alg](const std::vector<FockVector>& basis) {
    Json arr = Json::array();
    for (const FockVector& v : basis) {
      Json slots = Json::array();
      for (const Slot& sl : v.slots)
        slots.push_back(Json::array({sl.k, alg.letter_name(sl.dec)}));
      arr.push_back(std::move(slots));
    }
    return arr;
  };
  out["rows"] = basis_json(m.row_basis);
  out["cols"] = basis_json(m.col_basis);
  Json entries = Json::array();
  for (const auto& [rc, q] : m.entries) {
    entries.push_back(Json::array({rc.first, rc.second, to_string(q)}));
  }
  out["entries"] = std::move(entries);
  return out;
}

Json report_to_json(const CheckReport& rep) {
  Json j;
  j["relation"] = relation_name(rep.id);
  j["pass"] = rep.pass;
  j["tuples_tested"] = rep.tuples_tested;
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  j["seconds"] = rep.seconds;
  return j;
}

}  // namespace quotrep
