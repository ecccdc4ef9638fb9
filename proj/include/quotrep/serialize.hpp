#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quotrep/fock_space.hpp"
#include "quotrep/operator_engine.hpp"
#include "quotrep/relation_suite.hpp"

namespace quotrep {

using Json = nlohmann::ordered_json;

Json params_to_json(const ModuliParams& p);

/// Capped states: array of {slots: [[k, letter], ...], coeff: "p/q"}.
/// States with open labels carry "labels" and a per-term "ext" array.
Json state_to_json(const CurveAlgebra& alg, const FockState& s);
FockState state_from_json(const CurveAlgebra& alg, const Json& j);

FockState load_state_file(const CurveAlgebra& alg, const std::string& path);

Json matrix_to_json(const CurveAlgebra& alg, const SparseMatrix& m);

Json report_to_json(const CheckReport& rep);

}  // namespace quotrep
