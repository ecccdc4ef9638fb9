#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quotrep/curve_algebra.hpp"
#include "quotrep/fock_space.hpp"

namespace quotrep {

/// Rank of the ambient bundle, genus of the curve, degree of the bundle.
struct ModuliParams {
  int r = 1;
  int g = 0;
  long long n = 0;
};

enum class OpKind { A, F, M, H, E };

char op_kind_char(OpKind k);

/// A single operator with either a curve-class cap on its output label or an
/// open label that stays in the result.
struct OperatorToken {
  OpKind kind = OpKind::A;
  int index = 0;
  bool open = false;
  std::string label;  // only for open tokens
  CurveClass cap;     // class on exactly one label; only for capped tokens
};

/// Tokens are applied right to left.
struct OperatorWord {
  std::vector<OperatorToken> tokens;
};

class FuelExhausted : public std::runtime_error {
 public:
  explicit FuelExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct SparseMatrix {
  std::vector<FockVector> row_basis;
  std::vector<FockVector> col_basis;
  std::map<std::pair<std::size_t, std::size_t>, Rational> entries;

  bool operator==(const SparseMatrix& o) const { return entries == o.entries; }
};

/// The operator engine: creation (a, e), annihilation (f), multiplication
/// (m, h) operators acting on Fock states over a fixed (r, g, n), with the
/// straightening recursion and the Chern-series machinery behind m, h, e.
///
/// All public methods are const and thread safe; the memo table uses a
/// concurrent-read / exclusive-write lock, and losing an insertion race only
/// recomputes an identical value.
class Engine {
 public:
  explicit Engine(ModuliParams p, std::uint64_t fuel_limit = 500'000'000);

  const ModuliParams& params() const { return params_; }
  const CurveAlgebra& algebra() const { return alg_; }

  std::uint64_t fuel_used() const { return fuel_used_.load(); }
  void reset_fuel() const { fuel_used_.store(0); }

  FockState vacuum() const { return vacuum_state(params_.g); }
  /// Fundamental class of Quot_d.
  FockState quot_unit(int d) const;

  /// Capped application: cap must live on exactly one label.
  FockState apply(OpKind kind, int index, const CurveClass& cap,
                  const FockState& v) const;
  /// Open application: emits onto the named label via the dual-pair transfer.
  FockState apply_open(OpKind kind, int index, const std::string& label,
                       const FockState& v) const;

  /// [op1 op2] restricted to the diagonal of its two curve factors, capped /
  /// open. op1 is applied after op2.
  FockState diag_pair(OpKind k1, int i1, OpKind k2, int i2,
                      const CurveClass& cap, const FockState& v) const;
  FockState diag_pair_open(OpKind k1, int i1, OpKind k2, int i2,
                           const std::string& label, const FockState& v) const;

  /// Coefficient of z^{-c} in [a(z) f(z)|_diag], c >= 1.
  FockState af_series_coeff(int c, const CurveClass& cap, const FockState& v) const;
  /// Coefficient of z^{r-c} in the operator of multiplication by the shifted
  /// Chern polynomial of the universal subsheaf (c(V, z+K) composed with the
  /// inverse multiplication series). Vanishes for c > r; that vanishing is a
  /// checked identity, not an assumption.
  FockState shifted_chern_coeff(int c, const CurveClass& cap, const FockState& v) const;
  /// Multiplication by c_k((V - E) tensor K^{-1}), rebuilt from the finished
  /// m-operators by the K-shift algebra (independent of af_series_coeff).
  FockState twisted_diff_chern(int k, const CurveClass& cap, const FockState& v) const;

  FockState act(const OperatorWord& w, const FockState& v) const;

  /// Straightening with a randomized admissible rewrite order (the slot the
  /// annihilator is commuted against is chosen at random at every step).
  /// Must agree with apply(F, ...) exactly.
  FockState apply_f_shuffled(int j, const CurveClass& cap, const FockState& v,
                             std::mt19937& rng) const;

  /// Matrix of the capped operator from charge d in the canonical bases.
  SparseMatrix operator_matrix(OpKind kind, int index, LetterId cap, int d) const;
  /// Target charge of one application.
  int target_charge(OpKind kind, int d) const;

  // --- state helpers used by the relation suite ---
  FockState with_labels(const FockState& v, const std::vector<std::string>& labels) const;
  FockState mul_external(const FockState& v, const CurveClass& cls) const;
  /// Caps one open label of the state against a one-label class.
  FockState cap_label(const FockState& v, const std::string& label,
                      const CurveClass& cap) const;
  FockState integrate_label(const FockState& v, const std::string& label) const;

 private:
  enum class Fam : std::uint8_t {
    A, F, M, H, E,
    SerA,    // A_c, coefficient of z^{-c} in [a(z) f(z)|_diag]
    SerAinv, // coefficient of z^{-c} in (Id - A(z))^{-1}
    SerQK,   // coefficient of z^{r-c} in mult-by-c(V,z+K) o (Id - A(z))^{-1}
    SerS,    // coefficient of z^{r-c} in mult-by-c(E,z); zero beyond c = r
    SerU,    // unipotent part of the inverse of mult-by-c(E,z)
    SerQKS,  // K-shift of SerS: coefficient of mult-by-c(E,z+K) from m-ops
    SerV,    // unipotent part of the inverse of SerQKS
    VME,     // mult by c_k((V-E) tensor K^{-1}) via the m-route
    AlphaP,  // coefficient of z^{r-1-c} in (Id - q w z^{-1}) o a(z+K)
  };

  struct MemoKey {
    Fam fam;
    int idx;
    LetterId cap;
    FockVector vec;
    auto operator<=>(const MemoKey&) const = default;
  };

  using CapClass = std::vector<std::pair<LetterId, Rational>>;

  void burn_fuel() const;

  using StatePtr = std::shared_ptr<const FockState>;
  StatePtr prim(Fam fam, int idx, LetterId cap, const FockVector& b) const;
  FockState compute_prim(Fam fam, int idx, LetterId cap, const FockVector& b) const;

  // Application of a primitive to a pure state (no open labels).
  FockState prim_on_state(Fam fam, int idx, const CapClass& cap,
                          const FockState& v) const;
  FockState prim_on_state(Fam fam, int idx, LetterId cap, const FockState& v) const;

  /// Caps the two-label composite op1(label1) o op2(label2) (op1 applied
  /// last) against a class on (label1, label2).
  FockState cap2(Fam f1, int i1, Fam f2, int i2, const CurveClass& cls,
                 const FockState& v) const;
  /// [op1 op2]|_diag capped: cap2 against diagonal * (cap on label 1).
  FockState diag_cap(Fam f1, int i1, Fam f2, int i2, LetterId cap,
                     const FockState& v) const;

  FockState compute_f(int j, LetterId cap, const FockVector& b) const;
  FockState compute_e(int k, LetterId cap, const FockVector& b) const;

  CapClass letter_times(LetterId x, LetterId cap) const;  // x * cap as CapClass

  Fam fam_of(OpKind kind) const;
  void validate_index(OpKind kind, int index) const;

  FockState lift_capped(Fam fam, int idx, const CurveClass& cap,
                        const FockState& v) const;
  FockState lift_open(Fam fam, int idx, const std::string& label,
                      const FockState& v) const;
  // Shared lift used by diag_pair{,_open}: per-term capped application with
  // the Koszul crossing sign against the term's external letters.
  template <typename ApplyLetter>
  FockState lift_capped_fn(const CurveClass& cap, const FockState& v,
                           ApplyLetter&& fn) const;
  template <typename ApplyLetter>
  FockState lift_open_fn(const std::string& label, const FockState& v,
                         ApplyLetter&& fn) const;

  FockState shuffled_f(int j, LetterId cap, const FockVector& b,
                       std::mt19937& rng) const;
  FockState shuffled_f_state(int j, const CapClass& cap, const FockState& v,
                             std::mt19937& rng) const;

  ModuliParams params_;
  CurveAlgebra alg_;
  Rational qshift_;  // (2g-2) r - n
  std::uint64_t fuel_limit_;
  mutable std::atomic<std::uint64_t> fuel_used_{0};
  mutable std::shared_mutex memo_mx_;
  mutable std::map<MemoKey, StatePtr> memo_;
};

}  // namespace quotrep
