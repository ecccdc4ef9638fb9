#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quotrep/operator_engine.hpp"

namespace quotrep {

enum class RelationId { MM, AA, EE, FF, ME, FM, EF, FA, MULT, PAIRING };

std::string relation_name(RelationId id);
std::optional<RelationId> relation_from_name(const std::string& name);
std::vector<RelationId> all_relations();

/// Seeded single-sign mutations of relation right-hand sides, used to prove
/// the suite is not vacuous.
enum class Mutation {
  None,
  EE_DeltaSign,
  FF_DeltaSign,
  ME_TermSign,
  FM_TermSign,
  EF_Sign,
  FA_ChiSign,
  MULT_Sign,
};

struct RelationCase {
  RelationId id = RelationId::EF;
  int d_max = 2;
  int index_max = 0;  // 0 means the default bound 2r + 2
  Mutation mutation = Mutation::None;
};

struct CheckReport {
  RelationId id = RelationId::EF;
  ModuliParams params;
  bool pass = true;
  long long tuples_tested = 0;
  std::string failure;  // empty when pass
  double seconds = 0.0;
};

/// Evaluates one relation family on every canonical basis vector of charge
/// <= d_max, capping the two curve labels against every basis monomial.
CheckReport check_relation(const Engine& eng, const RelationCase& c);

/// The restricted two-case commutator rule against the general one: the two
/// right-hand sides and the directly evaluated commutator must give identical
/// operators for all i, j in [0, r).
CheckReport check_fa_restricted(const Engine& eng, int d_max,
                                Mutation mutation = Mutation::None);

/// Multiplication identity: the twisted difference Chern operator rebuilt
/// from the m-operators equals the diagonal a-f expansion, for 1 <= k <= k_max.
CheckReport check_mult_identity(const Engine& eng, int d_max, int k_max,
                                Mutation mutation = Mutation::None);

/// Scalar pairing of an annihilation word against a state of matching charge:
/// the coefficient of the vacuum after applying f_{j_1}(phi_1) ... f_{j_d}(phi_d)
/// right to left.
Rational dual_pairing(const Engine& eng, const std::vector<int>& f_indices,
                      const std::vector<LetterId>& phi, const FockState& v);

struct PairingReport {
  int d = 0;
  int dim = 0;
  int rank = 0;
  bool full_rank = false;
};

/// Pairing matrix between annihilation words and the canonical basis at
/// charge d, with its exact rank.
PairingReport check_pairing(const Engine& eng, int d);

long long matrix_rank(std::vector<std::vector<Rational>> m);

}  // namespace quotrep
