#include "quotrep/relation_suite.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

namespace quotrep {

namespace {

constexpr const char* kW = "w";  // first curve factor, l-indexed series
constexpr const char* kZ = "z";  // second curve factor, k-indexed series

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string describe_vector(const CurveAlgebra& alg, const FockVector& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.slots.size(); ++i) {
    if (i) os << " ";
    os << "(" << v.slots[i].k << "," << alg.letter_name(v.slots[i].dec) << ")";
  }
  os << "]";
  return os.str();
}

}  // namespace

std::string relation_name(RelationId id) {
  switch (id) {
    case RelationId::MM: return "MM";
    case RelationId::AA: return "AA";
    case RelationId::EE: return "EE";
    case RelationId::FF: return "FF";
    case RelationId::ME: return "ME";
    case RelationId::FM: return "FM";
    case RelationId::EF: return "EF";
    case RelationId::FA: return "FA";
    case RelationId::MULT: return "MULT";
    case RelationId::PAIRING: return "PAIRING";
  }
  return "?";
}

std::optional<RelationId> relation_from_name(const std::string& name) {
  for (RelationId id : {RelationId::MM, RelationId::AA, RelationId::EE,
                        RelationId::FF, RelationId::ME, RelationId::FM,
                        RelationId::EF, RelationId::FA, RelationId::MULT,
                        RelationId::PAIRING}) {
    if (relation_name(id) == name) return id;
  }
  return std::nullopt;
}

std::vector<RelationId> all_relations() {
  return {RelationId::MM, RelationId::AA, RelationId::EE, RelationId::FF,
          RelationId::ME, RelationId::FM, RelationId::EF, RelationId::FA,
          RelationId::MULT, RelationId::PAIRING};
}

namespace {

/// One coefficient relation evaluated openly on the labels (w, z).
struct SideEval {
  std::function<FockState(int k, int l, const FockState&)> lhs;
  std::function<FockState(int k, int l, const FockState&)> rhs;
  // admissible (k, l) bounds; m-indices stop at r
  std::function<bool(int k, int l)> admissible;
};

SideEval make_relation(const Engine& eng, RelationId id, Mutation mut) {
  const int r = eng.params().r;
  const CurveAlgebra& alg = eng.algebra();
  auto delta = alg.diagonal_class(kW, kZ);
  auto open = [&eng](OpKind kind, int idx, const char* label, const FockState& v) {
    return eng.apply_open(kind, idx, label, v);
  };
  auto commutator = [open](OpKind ka, int ia, const char* la, OpKind kb,
                           int ib, const char* lb, const FockState& v) {
    FockState ab = open(ka, ia, la, open(kb, ib, lb, v));
    FockState ba = open(kb, ib, lb, open(ka, ia, la, v));
    ab.add_scaled(ba, Rational(-1));
    return ab;
  };
  SideEval ev;
  switch (id) {
    case RelationId::AA:
      // creation operators commute with their labels attached
      ev.lhs = [=](int k, int l, const FockState& v) {
        return commutator(OpKind::A, k, kZ, OpKind::A, l, kW, v);
      };
      ev.rhs = [=, &eng](int, int, const FockState& v) {
        FockState z = eng.with_labels(v, {kW, kZ});
        z.terms.clear();
        return z;
      };
      ev.admissible = [r](int k, int l) { return k < r && l < r; };
      break;
    case RelationId::MM:
      ev.lhs = [=](int k, int l, const FockState& v) {
        return commutator(OpKind::M, k, kZ, OpKind::M, l, kW, v);
      };
      ev.rhs = [=, &eng](int, int, const FockState& v) {
        FockState z = eng.with_labels(v, {kW, kZ});
        z.terms.clear();
        return z;
      };
      ev.admissible = [r](int k, int l) { return k <= r && l <= r; };
      break;
    case RelationId::EE:
      ev.lhs = [=](int k, int l, const FockState& v) {
        FockState out = commutator(OpKind::E, k + 1, kZ, OpKind::E, l, kW, v);
        out.add_scaled(commutator(OpKind::E, k, kZ, OpKind::E, l + 1, kW, v),
                       Rational(-1));
        return out;
      };
      ev.rhs = [=, &eng](int k, int l, const FockState& v) {
        FockState sum = open(OpKind::E, k, kZ, open(OpKind::E, l, kW, v));
        sum.add_scaled(open(OpKind::E, l, kW, open(OpKind::E, k, kZ, v)),
                       Rational(1));
        FockState out = eng.mul_external(sum, delta);
        out.scale(Rational(mut == Mutation::EE_DeltaSign ? 1 : -1));
        return out;
      };
      ev.admissible = [](int, int) { return true; };
      break;
    case RelationId::FF:
      ev.lhs = [=](int k, int l, const FockState& v) {
        FockState out = commutator(OpKind::F, l, kW, OpKind::F, k + 1, kZ, v);
        out.add_scaled(commutator(OpKind::F, l + 1, kW, OpKind::F, k, kZ, v),
                       Rational(-1));
        return out;
      };
      ev.rhs = [=, &eng](int k, int l, const FockState& v) {
        FockState sum = open(OpKind::F, k, kZ, open(OpKind::F, l, kW, v));
        sum.add_scaled(open(OpKind::F, l, kW, open(OpKind::F, k, kZ, v)),
                       Rational(1));
        FockState out = eng.mul_external(sum, delta);
        out.scale(Rational(mut == Mutation::FF_DeltaSign ? 1 : -1));
        return out;
      };
      ev.admissible = [](int, int) { return true; };
      break;
    case RelationId::ME:
      ev.lhs = [=](int k, int l, const FockState& v) {
        return commutator(OpKind::M, l, kW, OpKind::E, k, kZ, v);
      };
      ev.rhs = [=, &eng](int k, int l, const FockState& v) {
        FockState sum = eng.with_labels(v, {kW, kZ});
        sum.terms.clear();
        for (int s = 0; s < l; ++s) {
          FockState term = open(OpKind::E, k + s, kZ, open(OpKind::M, l - s - 1, kW, v));
          int sign = (s % 2 == 0) ? -1 : 1;  // (-1)^{s+1}
          if (mut == Mutation::ME_TermSign) sign = -sign;
          sum.add_scaled(term, Rational(sign));
        }
        return eng.mul_external(sum, delta);
      };
      ev.admissible = [r](int, int l) { return l <= r; };
      break;
    case RelationId::FM:
      ev.lhs = [=](int k, int l, const FockState& v) {
        return commutator(OpKind::F, k, kZ, OpKind::M, l, kW, v);
      };
      ev.rhs = [=, &eng](int k, int l, const FockState& v) {
        FockState sum = eng.with_labels(v, {kW, kZ});
        sum.terms.clear();
        for (int s = 0; s < l; ++s) {
          FockState term = open(OpKind::M, l - s - 1, kW, open(OpKind::F, k + s, kZ, v));
          int sign = (s % 2 == 0) ? -1 : 1;
          if (mut == Mutation::FM_TermSign) sign = -sign;
          sum.add_scaled(term, Rational(sign));
        }
        return eng.mul_external(sum, delta);
      };
      ev.admissible = [r](int, int l) { return l <= r; };
      break;
    case RelationId::EF:
      ev.lhs = [=](int k, int l, const FockState& v) {
        return commutator(OpKind::E, k, kZ, OpKind::F, l, kW, v);
      };
      ev.rhs = [=, &eng](int k, int l, const FockState& v) {
        const int t = k + l - r + 1;
        FockState h = open(OpKind::H, t, kZ, v);
        FockState out = eng.mul_external(eng.with_labels(h, {kW, kZ}), delta);
        out.scale(Rational(mut == Mutation::EF_Sign ? 1 : -1));
        return out;
      };
      ev.admissible = [](int, int) { return true; };
      break;
    default:
      throw std::invalid_argument("make_relation: not a coefficient relation");
  }
  return ev;
}

}  // namespace

CheckReport check_relation(const Engine& eng, const RelationCase& c) {
  const auto t0 = Clock::now();
  const ModuliParams& p = eng.params();
  const CurveAlgebra& alg = eng.algebra();
  const int index_max = c.index_max > 0 ? c.index_max : 2 * p.r + 2;
  CheckReport rep;
  rep.id = c.id;
  rep.params = p;
  SideEval ev = make_relation(eng, c.id, c.mutation);

  for (int d = 0; d <= c.d_max && rep.pass; ++d) {
    auto basis = enumerate_basis(p.r, p.g, d);
    for (const FockVector& bvec : basis) {
      if (!rep.pass) break;
      FockState v = basis_state(p.g, bvec);
      for (int k = 0; k <= index_max && rep.pass; ++k) {
        for (int l = 0; l <= index_max && rep.pass; ++l) {
          if (!ev.admissible(k, l)) continue;
          FockState diff = ev.lhs(k, l, v);
          diff.add_scaled(ev.rhs(k, l, v), Rational(-1));
          for (LetterId gw = 0; gw <= alg.point(); ++gw) {
            for (LetterId gz = 0; gz <= alg.point(); ++gz) {
              ++rep.tuples_tested;
              if (diff.empty()) continue;
              FockState capped = eng.cap_label(diff, kW, alg.letter_class(kW, gw));
              capped = eng.cap_label(capped, kZ, alg.letter_class(kZ, gz));
              if (!capped.empty()) {
                rep.pass = false;
                auto capped_side = [&](const FockState& side) {
                  FockState s = eng.cap_label(side, kW, alg.letter_class(kW, gw));
                  s = eng.cap_label(s, kZ, alg.letter_class(kZ, gz));
                  std::ostringstream os;
                  os << "{";
                  bool first = true;
                  for (const auto& [key, q] : s.terms) {
                    if (!first) os << ", ";
                    first = false;
                    os << to_string(q) << "*" << describe_vector(alg, key.vec);
                  }
                  os << "}";
                  return os.str();
                };
                std::ostringstream os;
                os << relation_name(c.id) << " fails at d=" << d << " k=" << k
                   << " l=" << l << " v=" << describe_vector(alg, bvec)
                   << " caps=(" << alg.letter_name(gw) << "," << alg.letter_name(gz)
                   << ") lhs=" << capped_side(ev.lhs(k, l, v))
                   << " rhs=" << capped_side(ev.rhs(k, l, v));
                rep.failure = os.str();
                break;
              }
            }
            if (!rep.pass) break;
          }
        }
      }
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

CheckReport check_fa_restricted(const Engine& eng, int d_max, Mutation mutation) {
  const auto t0 = Clock::now();
  const ModuliParams& p = eng.params();
  const CurveAlgebra& alg = eng.algebra();
  auto delta = alg.diagonal_class(kW, kZ);
  CheckReport rep;
  rep.id = RelationId::FA;
  rep.params = p;

  // the creation operator rides the first factor, the annihilator the second
  for (int d = 0; d <= d_max && rep.pass; ++d) {
    auto basis = enumerate_basis(p.r, p.g, d);
    for (const FockVector& bvec : basis) {
      if (!rep.pass) break;
      FockState v = basis_state(p.g, bvec);
      for (int i = 0; i < p.r && rep.pass; ++i) {
        for (int j = 0; j < p.r && rep.pass; ++j) {
          FockState lhs = eng.apply_open(OpKind::F, j, kZ,
                                         eng.apply_open(OpKind::A, i, kW, v));
          lhs.add_scaled(eng.apply_open(OpKind::A, i, kW,
                                        eng.apply_open(OpKind::F, j, kZ, v)),
                         Rational(-1));

          // restricted two-case rule
          FockState restricted = eng.with_labels(v, {kW, kZ});
          restricted.terms.clear();
          if (i + j <= p.r - 1) {
            if (i + j == p.r - 1) {
              int chi = (i % 2 == 0) ? 1 : -1;
              if (mutation == Mutation::FA_ChiSign) chi = -chi;
              restricted.add_scaled(eng.with_labels(v, {kW, kZ}), Rational(chi));
            }
            for (int s = 0; s < i; ++s) {
              FockState term = eng.apply_open(
                  OpKind::A, s, kW,
                  eng.apply_open(OpKind::F, i + j - s - 1, kZ, v));
              restricted.add_scaled(term, Rational((i - s) % 2 == 0 ? 1 : -1));
            }
          } else {
            for (int s = i; s < p.r; ++s) {
              FockState term = eng.apply_open(
                  OpKind::A, s, kW,
                  eng.apply_open(OpKind::F, i + j - s - 1, kZ, v));
              restricted.add_scaled(term, Rational((i - s) % 2 == 0 ? -1 : 1));
            }
          }
          restricted = eng.mul_external(restricted, delta);

          // general rule with the h/m tail
          FockState general = eng.with_labels(v, {kW, kZ});
          general.terms.clear();
          for (int s = 0; s < i; ++s) {
            FockState term = eng.apply_open(
                OpKind::A, s, kW, eng.apply_open(OpKind::F, i + j - s - 1, kZ, v));
            general.add_scaled(term, Rational((i - s) % 2 == 0 ? 1 : -1));
          }
          for (int s = 0; s <= i; ++s) {
            const int t = i + j - p.r - s + 1;
            if (t < 0) continue;
            FockState term = eng.with_labels(
                eng.diag_pair_open(OpKind::H, t, OpKind::M, s, kW, v), {kW, kZ});
            general.add_scaled(term, Rational((i - s) % 2 == 0 ? 1 : -1));
          }
          general = eng.mul_external(general, delta);

          FockState d1 = lhs;
          d1.add_scaled(restricted, Rational(-1));
          FockState d2 = lhs;
          d2.add_scaled(general, Rational(-1));
          ++rep.tuples_tested;
          if (!d1.empty() || !d2.empty()) {
            rep.pass = false;
            std::ostringstream os;
            os << "FA fails at d=" << d << " i=" << i << " j=" << j
               << " v=" << describe_vector(alg, bvec)
               << (d1.empty() ? " (general rule)" : " (restricted rule)");
            rep.failure = os.str();
          }
        }
      }
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

CheckReport check_mult_identity(const Engine& eng, int d_max, int k_max,
                                Mutation mutation) {
  const auto t0 = Clock::now();
  const ModuliParams& p = eng.params();
  const CurveAlgebra& alg = eng.algebra();
  CheckReport rep;
  rep.id = RelationId::MULT;
  rep.params = p;
  for (int d = 0; d <= d_max && rep.pass; ++d) {
    auto basis = enumerate_basis(p.r, p.g, d);
    for (const FockVector& bvec : basis) {
      if (!rep.pass) break;
      FockState v = basis_state(p.g, bvec);
      for (int k = 1; k <= k_max && rep.pass; ++k) {
        for (LetterId cap = 0; cap <= alg.point() && rep.pass; ++cap) {
          CurveClass capc = alg.letter_class("c", cap);
          FockState lhs = eng.twisted_diff_chern(k, capc, v);
          FockState rhs;
          rhs.genus = p.g;
          for (int i = 0; i < p.r; ++i) {
            const int jf = p.r + k - 2 - i;
            if (jf < 0) continue;
            FockState term = eng.diag_pair(OpKind::A, i, OpKind::F, jf, capc, v);
            rhs.add_scaled(term, Rational((i + k + 1) % 2 == 0 ? 1 : -1));
          }
          if (mutation == Mutation::MULT_Sign) rhs.scale(Rational(-1));
          ++rep.tuples_tested;
          FockState diff = lhs;
          diff.add_scaled(rhs, Rational(-1));
          if (!diff.empty()) {
            rep.pass = false;
            std::ostringstream os;
            os << "MULT fails at d=" << d << " k=" << k
               << " v=" << describe_vector(alg, bvec)
               << " cap=" << alg.letter_name(cap);
            rep.failure = os.str();
          }
        }
      }
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

Rational dual_pairing(const Engine& eng, const std::vector<int>& f_indices,
                      const std::vector<LetterId>& phi, const FockState& v) {
  if (f_indices.size() != phi.size())
    throw std::invalid_argument("dual_pairing: index/class length mismatch");
  auto charges = v.charges();
  if (charges.size() != 1 || *charges.begin() != static_cast<int>(f_indices.size()))
    throw std::invalid_argument("dual_pairing: word length must equal the charge");
  const CurveAlgebra& alg = eng.algebra();
  FockState cur = v;
  for (std::size_t t = f_indices.size(); t-- > 0;) {
    cur = eng.apply(OpKind::F, f_indices[t], alg.letter_class("c", phi[t]), cur);
    if (cur.empty()) return 0;
  }
  auto it = cur.terms.find(TermKey{});
  return it == cur.terms.end() ? Rational(0) : it->second;
}

long long matrix_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  long long rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && is_zero(m[piv][col])) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || is_zero(m[i][col])) continue;
      Rational f = m[i][col] / m[row][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
    }
    ++row;
    ++rank;
  }
  return rank;
}

PairingReport check_pairing(const Engine& eng, int d) {
  const ModuliParams& p = eng.params();
  auto basis = enumerate_basis(p.r, p.g, d);
  PairingReport rep;
  rep.d = d;
  rep.dim = static_cast<int>(basis.size());
  std::vector<std::vector<Rational>> mat(
      basis.size(), std::vector<Rational>(basis.size(), Rational(0)));
  for (std::size_t row = 0; row < basis.size(); ++row) {
    // annihilation word dual to the row vector: complementary levels, same
    // decorations, applied against the largest level first
    std::vector<int> idx;
    std::vector<LetterId> phi;
    for (const Slot& s : basis[row].slots) {
      idx.push_back(p.r - 1 - s.k);
      phi.push_back(s.dec);
    }
    std::reverse(idx.begin(), idx.end());
    std::reverse(phi.begin(), phi.end());
    for (std::size_t col = 0; col < basis.size(); ++col) {
      mat[row][col] = dual_pairing(eng, idx, phi, basis_state(p.g, basis[col]));
    }
  }
  rep.rank = static_cast<int>(matrix_rank(std::move(mat)));
  rep.full_rank = rep.rank == rep.dim;
  return rep;
}

}  // namespace quotrep
