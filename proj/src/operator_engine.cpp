#include "quotrep/operator_engine.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace quotrep {

char op_kind_char(OpKind k) {
  switch (k) {
    case OpKind::A: return 'a';
    case OpKind::F: return 'f';
    case OpKind::M: return 'm';
    case OpKind::H: return 'h';
    case OpKind::E: return 'e';
  }
  return '?';
}

Engine::Engine(ModuliParams p, std::uint64_t fuel_limit)
    : params_(p), alg_(p.g), fuel_limit_(fuel_limit) {
  if (p.r < 1) throw std::invalid_argument("rank must be at least 1");
  if (fuel_limit == 0) throw std::invalid_argument("fuel limit must be positive");
  qshift_ = Rational(static_cast<long>((2 * p.g - 2) * p.r - p.n));
}

void Engine::burn_fuel() const {
  if (fuel_used_.fetch_add(1, std::memory_order_relaxed) + 1 > fuel_limit_)
    throw FuelExhausted("straightening step bound exceeded; raise --fuel if the "
                        "computation is legitimately this large");
}

FockState Engine::quot_unit(int d) const {
  if (d < 0) throw std::invalid_argument("charge must be non-negative");
  FockVector v;
  v.slots.assign(static_cast<std::size_t>(d), Slot{0, alg_.unit()});
  Rational c = 1;
  for (int i = 2; i <= d; ++i) c /= i;
  return basis_state(params_.g, v, c);
}

int Engine::target_charge(OpKind kind, int d) const {
  switch (kind) {
    case OpKind::A:
    case OpKind::E: return d + 1;
    case OpKind::F: return d - 1;
    case OpKind::M:
    case OpKind::H: return d;
  }
  return d;
}

Engine::Fam Engine::fam_of(OpKind kind) const {
  switch (kind) {
    case OpKind::A: return Fam::A;
    case OpKind::F: return Fam::F;
    case OpKind::M: return Fam::M;
    case OpKind::H: return Fam::H;
    case OpKind::E: return Fam::E;
  }
  return Fam::A;
}

void Engine::validate_index(OpKind kind, int index) const {
  switch (kind) {
    case OpKind::A:
      if (index < 0 || index >= params_.r)
        throw std::out_of_range("a-operator index must lie in [0, r)");
      break;
    case OpKind::M:
      if (index < 0 || index > params_.r)
        throw std::out_of_range("m-operator index must lie in [0, r]");
      break;
    case OpKind::F:
    case OpKind::E:
      if (index < 0) throw std::out_of_range("operator index must be non-negative");
      break;
    case OpKind::H:
      break;  // negative index is the zero operator
  }
}

Engine::CapClass Engine::letter_times(LetterId x, LetterId cap) const {
  LetterProduct p = alg_.letter_mul(x, cap);
  if (p.coeff == 0) return {};
  return {{p.letter, Rational(p.coeff)}};
}

// ---------------------------------------------------------------------------
// memoized primitives on basis vectors
// ---------------------------------------------------------------------------

Engine::StatePtr Engine::prim(Fam fam, int idx, LetterId cap, const FockVector& b) const {
  MemoKey key{fam, idx, cap, b};
  {
    std::shared_lock lock(memo_mx_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  burn_fuel();
  auto value = std::make_shared<const FockState>(compute_prim(fam, idx, cap, b));
  {
    std::unique_lock lock(memo_mx_);
    auto [it, inserted] = memo_.emplace(std::move(key), std::move(value));
    return it->second;
  }
}

FockState Engine::prim_on_state(Fam fam, int idx, const CapClass& cap,
                                const FockState& v) const {
  FockState out;
  out.genus = params_.g;
  if (!v.labels.empty())
    throw std::invalid_argument("primitive operators act on pure states only");
  for (const auto& [key, q] : v.terms) {
    for (const auto& [letter, c] : cap) {
      out.add_scaled(*prim(fam, idx, letter, key.vec), q * c);
    }
  }
  return out;
}

FockState Engine::prim_on_state(Fam fam, int idx, LetterId cap,
                                const FockState& v) const {
  return prim_on_state(fam, idx, CapClass{{cap, Rational(1)}}, v);
}

FockState Engine::cap2(Fam f1, int i1, Fam f2, int i2, const CurveClass& cls,
                       const FockState& v) const {
  // caps the composite op1(label1) o op2(label2), op1 applied last, against a
  // two-label class: per monomial g1 (x) g2 the capped composite equals
  // (-1)^{|g1||g2|} op1(g1) o op2(g2)
  FockState out;
  out.genus = params_.g;
  if (cls.labels.size() != 2)
    throw std::invalid_argument("cap2 expects a class on two labels");
  for (const auto& [mono, c] : cls.terms) {
    const LetterId g1 = mono[0];
    const LetterId g2 = mono[1];
    const int sign = (alg_.is_odd(g1) && alg_.is_odd(g2)) ? -1 : 1;
    FockState inner = prim_on_state(f2, i2, g2, v);
    if (inner.empty()) continue;
    FockState outer = prim_on_state(f1, i1, g1, inner);
    out.add_scaled(outer, c * sign);
  }
  return out;
}

FockState Engine::diag_cap(Fam f1, int i1, Fam f2, int i2, LetterId cap,
                           const FockState& v) const {
  CurveClass delta = alg_.diagonal_class("1", "2");
  CurveClass capped = alg_.mul(delta, alg_.extend(alg_.letter_class("1", cap), {"1", "2"}));
  return cap2(f1, i1, f2, i2, capped, v);
}

FockState Engine::compute_f(int j, LetterId cap, const FockVector& b) const {
  FockState out;
  out.genus = params_.g;
  if (b.slots.empty()) return out;  // annihilation kills the vacuum
  const int i = b.slots[0].k;
  const LetterId u1 = b.slots[0].dec;
  FockVector rest{std::vector<Slot>(b.slots.begin() + 1, b.slots.end())};
  FockState tail = basis_state(params_.g, rest);

  // straightening rule: move f_j past the leading a_i slot.
  //   f_j(g) a_i(u1) = (-1)^{|u1||g|} a_i(u1) f_j(g)
  //     + sum_{s<i} (-1)^{i-s} [a_s f_{i+j-s-1}] capped with diag * (u1 (x) g)
  //     + sum_{s<=i} (-1)^{i-s} [h_{i+j-r-s+1} m_s]|_diag capped with u1 * g
  // Termination measure: every annihilation or multiplication operator on the
  // right-hand side acts at charge d - 1.
  {
    FockState inner = prim_on_state(Fam::F, j, cap, tail);
    FockState swapped = prim_on_state(Fam::A, i, u1, inner);
    const bool flip = alg_.is_odd(u1) && alg_.is_odd(cap);
    out.add_scaled(swapped, Rational(flip ? -1 : 1));
  }
  if (i > 0) {
    CurveClass w = alg_.mul(
        alg_.mul(alg_.diagonal_class("1", "2"),
                 alg_.extend(alg_.letter_class("1", u1), {"1", "2"})),
        alg_.extend(alg_.letter_class("2", cap), {"1", "2"}));
    for (int s = 0; s < i; ++s) {
      const int sign = ((i - s) % 2 == 0) ? 1 : -1;
      FockState corr = cap2(Fam::A, s, Fam::F, i + j - s - 1, w, tail);
      out.add_scaled(corr, Rational(sign));
    }
  }
  CapClass eta = letter_times(u1, cap);
  if (!eta.empty()) {
    for (int s = 0; s <= i; ++s) {
      const int t = i + j - params_.r - s + 1;
      if (t < 0) continue;
      const int sign = ((i - s) % 2 == 0) ? 1 : -1;
      FockState corr = diag_cap(Fam::H, t, Fam::M, s, eta[0].first, tail);
      out.add_scaled(corr, eta[0].second * sign);
    }
  }
  return out;
}

FockState Engine::compute_e(int k, LetterId cap, const FockVector& b) const {
  // e(z) = [mult by c(E, z+K)]^{-1} o a(z+K) on the diagonal, so
  //   e_k = alpha'_k - sum_{c >= 1} A_c o alpha'_{k-c}|_diag
  FockState out = *prim(Fam::AlphaP, k, cap, b);
  FockState state_b = basis_state(params_.g, b);
  for (int c = 1; c <= k; ++c) {
    FockState term = diag_cap(Fam::SerA, c, Fam::AlphaP, k - c, cap, state_b);
    out.add_scaled(term, Rational(-1));
  }
  return out;
}

FockState Engine::compute_prim(Fam fam, int idx, LetterId cap, const FockVector& b) const {
  FockState zero;
  zero.genus = params_.g;
  FockState state_b = basis_state(params_.g, b);
  const int r = params_.r;
  const Rational kc(2 * params_.g - 2);  // canonical class multiplier

  switch (fam) {
    case Fam::A: {
      assert(idx >= 0 && idx < r);
      std::vector<Slot> raw;
      raw.reserve(b.slots.size() + 1);
      raw.push_back(Slot{idx, cap});
      raw.insert(raw.end(), b.slots.begin(), b.slots.end());
      CanonResult c = canonicalize_slots(alg_, std::move(raw));
      if (c.sign == 0) return zero;
      return basis_state(params_.g, c.vec, Rational(c.sign));
    }

    case Fam::F:
      return compute_f(idx, cap, b);

    case Fam::M: {
      assert(idx >= 0 && idx <= r);
      FockState s = *prim(Fam::SerS, idx, cap, b);
      if (idx % 2) s.scale(Rational(-1));
      return s;
    }

    case Fam::H: {
      // h(z) = (Id - A(z)) o [mult by c(E,z)]^{-1}; coefficient of z^{-r-t}
      if (idx < 0) return zero;
      FockState out = *prim(Fam::SerU, idx, cap, b);
      for (int c = 1; c <= idx; ++c) {
        FockState term = diag_cap(Fam::SerA, c, Fam::SerU, idx - c, cap, state_b);
        out.add_scaled(term, Rational(-1));
      }
      return out;
    }

    case Fam::E:
      return compute_e(idx, cap, b);

    case Fam::SerA: {
      // A_c = sum_i (-1)^i [a_i f_{r+c-2-i}]|_diag, c >= 1
      assert(idx >= 1);
      FockState out = zero;
      for (int i = 0; i < r; ++i) {
        const int jf = r + idx - 2 - i;
        if (jf < 0) continue;
        FockState term = diag_cap(Fam::A, i, Fam::F, jf, cap, state_b);
        out.add_scaled(term, Rational(i % 2 ? -1 : 1));
      }
      return out;
    }

    case Fam::SerAinv: {
      // (Id - A)^{-1} = Id + sum A^j
      if (idx == 0) {
        if (cap == alg_.point()) return state_b;
        return zero;
      }
      FockState out = *prim(Fam::SerA, idx, cap, b);
      for (int c = 1; c < idx; ++c) {
        FockState term = diag_cap(Fam::SerA, c, Fam::SerAinv, idx - c, cap, state_b);
        out.add_scaled(term, Rational(1));
      }
      return out;
    }

    case Fam::SerQK: {
      // mult by c(V, z+K) o (Id - A)^{-1}; c(V, z+K) = z^r + q w z^{r-1}
      FockState out = zero;
      if (idx == 0) {
        if (cap == alg_.point()) out.add_scaled(state_b, Rational(1));
        return out;
      }
      out.add_scaled(*prim(Fam::SerAinv, idx, cap, b), Rational(1));
      // q * omega * Ainv_{idx-1}: premultiplying the cap by omega
      CapClass wcap = letter_times(alg_.point(), cap);
      if (!wcap.empty()) {
        out.add_scaled(*prim(Fam::SerAinv, idx - 1, wcap[0].first, b),
                       qshift_ * wcap[0].second);
      }
      return out;
    }

    case Fam::SerS: {
      // un-shift z+K -> z:  c(E,z) = c(E,z+K) - K d/dz c(E,z+K)
      if (idx == 0) {
        if (cap == alg_.point()) return state_b;
        return zero;
      }
      if (idx > r) return zero;  // checked truncation, see shifted_chern_coeff
      FockState out = *prim(Fam::SerQK, idx, cap, b);
      CapClass wcap = letter_times(alg_.point(), cap);
      if (!wcap.empty()) {
        Rational coeff = Rational(-(r - idx + 1)) * kc * wcap[0].second;
        if (!is_zero(coeff)) {
          FockState t = *prim(Fam::SerQK, idx - 1, wcap[0].first, b);
          out.add_scaled(t, coeff);
        }
      }
      return out;
    }

    case Fam::SerU: {
      // unipotent inverse of mult-by-c(E,z): U_c = -S_c - sum S_b U_{c-b}
      if (idx == 0) {
        if (cap == alg_.point()) return state_b;
        return zero;
      }
      FockState out = *prim(Fam::SerS, idx, cap, b);
      out.scale(Rational(-1));
      for (int c = 1; c < idx; ++c) {
        if (c > r) break;
        FockState term = diag_cap(Fam::SerS, c, Fam::SerU, idx - c, cap, state_b);
        out.add_scaled(term, Rational(-1));
      }
      return out;
    }

    case Fam::SerQKS: {
      // K-shift applied to the finished m-operators:
      //   c(E,z+K) = c(E,z) + K d/dz c(E,z)
      if (idx == 0) {
        if (cap == alg_.point()) return state_b;
        return zero;
      }
      FockState out = *prim(Fam::SerS, idx, cap, b);
      CapClass wcap = letter_times(alg_.point(), cap);
      if (!wcap.empty()) {
        Rational coeff = Rational(r - idx + 1) * kc * wcap[0].second;
        if (!is_zero(coeff)) {
          FockState t = *prim(Fam::SerS, idx - 1, wcap[0].first, b);
          out.add_scaled(t, coeff);
        }
      }
      return out;
    }

    case Fam::SerV: {
      if (idx == 0) {
        if (cap == alg_.point()) return state_b;
        return zero;
      }
      FockState out = *prim(Fam::SerQKS, idx, cap, b);
      out.scale(Rational(-1));
      for (int c = 1; c < idx; ++c) {
        FockState term = diag_cap(Fam::SerQKS, c, Fam::SerV, idx - c, cap, state_b);
        out.add_scaled(term, Rational(-1));
      }
      return out;
    }

    case Fam::VME: {
      // mult by c_idx((V-E) tensor K^{-1}) =
      //   (-1)^idx [ (z^r + q w z^{r-1}) o QKS(z)^{-1} ]_{z^{-idx}}
      assert(idx >= 1);
      FockState out = *prim(Fam::SerV, idx, cap, b);
      CapClass wcap = letter_times(alg_.point(), cap);
      if (!wcap.empty()) {
        out.add_scaled(*prim(Fam::SerV, idx - 1, wcap[0].first, b),
                       qshift_ * wcap[0].second);
      }
      if (idx % 2) out.scale(Rational(-1));
      return out;
    }

    case Fam::AlphaP: {
      // coefficient of z^{r-1-c} in (Id - q w z^{-1}) o a(z+K), where
      // a(z+K) = sum_k [(z^{r-1-k} + (r-1-k) K z^{r-2-k}] (-1)^k a_k
      FockState out = zero;
      auto alpha = [&](int c, LetterId letter, const Rational& scale_in) {
        // coefficient of z^{r-1-c} in a(z+K), capped with `letter`
        if (c >= 0 && c <= r - 1) {
          FockState t = *prim(Fam::A, c, letter, b);
          out.add_scaled(t, scale_in * (c % 2 ? -1 : 1));
        }
        const int cm = c - 1;
        if (cm >= 0 && cm <= r - 1) {
          CapClass wl = letter_times(alg_.point(), letter);
          if (!wl.empty()) {
            Rational coeff = scale_in * Rational(r - c) * kc * wl[0].second *
                             (cm % 2 ? -1 : 1);
            if (!is_zero(coeff)) {
              FockState t = *prim(Fam::A, cm, wl[0].first, b);
              out.add_scaled(t, coeff);
            }
          }
        }
      };
      alpha(idx, cap, Rational(1));
      CapClass wcap = letter_times(alg_.point(), cap);
      if (!wcap.empty()) alpha(idx - 1, wcap[0].first, -qshift_ * wcap[0].second);
      return out;
    }
  }
  return zero;
}

// ---------------------------------------------------------------------------
// state-level application (open labels, crossing signs)
// ---------------------------------------------------------------------------

namespace {

int ext_parity(const CurveAlgebra& alg, const std::vector<LetterId>& ext) {
  int p = 0;
  for (LetterId a : ext) p ^= (alg.degree(a) & 1);
  return p;
}

}  // namespace

template <typename ApplyLetter>
FockState Engine::lift_capped_fn(const CurveClass& cap, const FockState& v,
                                 ApplyLetter&& fn) const {
  if (cap.labels.size() != 1)
    throw std::invalid_argument("operator cap must live on exactly one label");
  if (cap.genus != params_.g)
    throw std::invalid_argument("cap genus does not match the engine");
  FockState out;
  out.genus = params_.g;
  out.labels = v.labels;
  for (const auto& [key, q] : v.terms) {
    const int epar = ext_parity(alg_, key.ext);
    for (const auto& [mono, c] : cap.terms) {
      const LetterId letter = mono[0];
      // odd cap crossing the term's external letters
      const int sign = (alg_.is_odd(letter) && epar) ? -1 : 1;
      FockState img = fn(letter, key.vec);
      for (const auto& [ikey, iq] : img.terms) {
        out.add_term(TermKey{ikey.vec, key.ext}, iq * q * c * sign);
      }
    }
  }
  return out;
}

template <typename ApplyLetter>
FockState Engine::lift_open_fn(const std::string& label, const FockState& v,
                               ApplyLetter&& fn) const {
  auto it = std::lower_bound(v.labels.begin(), v.labels.end(), label);
  if (it != v.labels.end() && *it == label)
    throw std::invalid_argument("open label already present: " + label);
  const std::size_t pos = static_cast<std::size_t>(it - v.labels.begin());
  FockState out;
  out.genus = params_.g;
  out.labels = v.labels;
  out.labels.insert(out.labels.begin() + static_cast<std::ptrdiff_t>(pos), label);
  for (const auto& [key, q] : v.terms) {
    // the emitted letter is born leftmost among the external letters and then
    // moved right to its sorted position
    int cross = 0;
    for (std::size_t i = 0; i < pos; ++i) cross ^= (alg_.degree(key.ext[i]) & 1);
    for (const DualPair& p : alg_.dual_pairs()) {
      FockState img = fn(p.u, key.vec);
      if (img.empty()) continue;
      const int sign = p.sign * ((alg_.is_odd(p.u_dual) && cross) ? -1 : 1);
      std::vector<LetterId> ext = key.ext;
      ext.insert(ext.begin() + static_cast<std::ptrdiff_t>(pos), p.u_dual);
      for (const auto& [ikey, iq] : img.terms) {
        out.add_term(TermKey{ikey.vec, ext}, iq * q * sign);
      }
    }
  }
  return out;
}

FockState Engine::lift_capped(Fam fam, int idx, const CurveClass& cap,
                              const FockState& v) const {
  return lift_capped_fn(cap, v, [&](LetterId letter, const FockVector& b) {
    return *prim(fam, idx, letter, b);
  });
}

FockState Engine::lift_open(Fam fam, int idx, const std::string& label,
                            const FockState& v) const {
  return lift_open_fn(label, v, [&](LetterId letter, const FockVector& b) {
    return *prim(fam, idx, letter, b);
  });
}

FockState Engine::apply(OpKind kind, int index, const CurveClass& cap,
                        const FockState& v) const {
  validate_index(kind, index);
  if (kind == OpKind::H && index < 0) {
    FockState zero;
    zero.genus = params_.g;
    zero.labels = v.labels;
    return zero;
  }
  return lift_capped(fam_of(kind), index, cap, v);
}

FockState Engine::apply_open(OpKind kind, int index, const std::string& label,
                             const FockState& v) const {
  validate_index(kind, index);
  if (kind == OpKind::H && index < 0) {
    FockState zero;
    zero.genus = params_.g;
    zero.labels = v.labels;
    auto it = std::lower_bound(zero.labels.begin(), zero.labels.end(), label);
    zero.labels.insert(it, label);
    return zero;
  }
  return lift_open(fam_of(kind), index, label, v);
}

FockState Engine::diag_pair(OpKind k1, int i1, OpKind k2, int i2,
                            const CurveClass& cap, const FockState& v) const {
  validate_index(k1, i1);
  validate_index(k2, i2);
  return lift_capped_fn(cap, v, [&](LetterId letter, const FockVector& b) {
    return diag_cap(fam_of(k1), i1, fam_of(k2), i2, letter,
                    basis_state(params_.g, b));
  });
}

FockState Engine::diag_pair_open(OpKind k1, int i1, OpKind k2, int i2,
                                 const std::string& label, const FockState& v) const {
  validate_index(k1, i1);
  validate_index(k2, i2);
  return lift_open_fn(label, v, [&](LetterId letter, const FockVector& b) {
    return diag_cap(fam_of(k1), i1, fam_of(k2), i2, letter,
                    basis_state(params_.g, b));
  });
}

FockState Engine::af_series_coeff(int c, const CurveClass& cap, const FockState& v) const {
  if (c < 1) throw std::invalid_argument("the a-f series starts at z^{-1}");
  return lift_capped(Fam::SerA, c, cap, v);
}

FockState Engine::shifted_chern_coeff(int c, const CurveClass& cap,
                                      const FockState& v) const {
  if (c < 0) throw std::invalid_argument("series coefficient index must be >= 0");
  return lift_capped(Fam::SerQK, c, cap, v);
}

FockState Engine::twisted_diff_chern(int k, const CurveClass& cap,
                                     const FockState& v) const {
  if (k < 1) throw std::invalid_argument("twisted Chern coefficients start at k = 1");
  return lift_capped(Fam::VME, k, cap, v);
}

FockState Engine::act(const OperatorWord& w, const FockState& v) const {
  std::set<std::string> open;
  for (const OperatorToken& t : w.tokens) {
    if (t.open && !open.insert(t.label).second)
      throw std::invalid_argument("open labels of a word must be distinct: " + t.label);
  }
  FockState cur = v;
  for (auto it = w.tokens.rbegin(); it != w.tokens.rend(); ++it) {
    if (it->open) {
      cur = apply_open(it->kind, it->index, it->label, cur);
    } else {
      cur = apply(it->kind, it->index, it->cap, cur);
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// randomized straightening order (confluence fuzzing)
// ---------------------------------------------------------------------------

FockState Engine::shuffled_f_state(int j, const CapClass& cap, const FockState& v,
                                   std::mt19937& rng) const {
  FockState out;
  out.genus = params_.g;
  for (const auto& [key, q] : v.terms) {
    for (const auto& [letter, c] : cap) {
      out.add_scaled(shuffled_f(j, letter, key.vec, rng), q * c);
    }
  }
  return out;
}

FockState Engine::shuffled_f(int j, LetterId cap, const FockVector& b,
                             std::mt19937& rng) const {
  burn_fuel();
  FockState out;
  out.genus = params_.g;
  if (b.slots.empty()) return out;
  // commute f against a uniformly random slot; the slot is first moved to the
  // front, which is admissible because the creation slots commute up to the
  // Koszul sign of their decorations
  const std::size_t pick =
      std::uniform_int_distribution<std::size_t>(0, b.slots.size() - 1)(rng);
  int front_sign = 1;
  for (std::size_t q = 0; q < pick; ++q) {
    if (alg_.is_odd(b.slots[q].dec) && alg_.is_odd(b.slots[pick].dec))
      front_sign = -front_sign;
  }
  const int i = b.slots[pick].k;
  const LetterId u1 = b.slots[pick].dec;
  FockVector rest;
  rest.slots.reserve(b.slots.size() - 1);
  for (std::size_t q = 0; q < b.slots.size(); ++q) {
    if (q != pick) rest.slots.push_back(b.slots[q]);
  }
  FockState tail = basis_state(params_.g, rest);

  {
    FockState inner = shuffled_f_state(j, CapClass{{cap, Rational(1)}}, tail, rng);
    FockState swapped = prim_on_state(Fam::A, i, u1, inner);
    const bool flip = alg_.is_odd(u1) && alg_.is_odd(cap);
    out.add_scaled(swapped, Rational(flip ? -1 : 1));
  }
  CurveClass w = alg_.mul(
      alg_.mul(alg_.diagonal_class("1", "2"),
               alg_.extend(alg_.letter_class("1", u1), {"1", "2"})),
      alg_.extend(alg_.letter_class("2", cap), {"1", "2"}));
  for (int s = 0; s < i; ++s) {
    const int sign = ((i - s) % 2 == 0) ? 1 : -1;
    for (const auto& [mono, c] : w.terms) {
      const int koszul = (alg_.is_odd(mono[0]) && alg_.is_odd(mono[1])) ? -1 : 1;
      FockState inner = shuffled_f_state(i + j - s - 1, CapClass{{mono[1], Rational(1)}},
                                         tail, rng);
      FockState outer = prim_on_state(Fam::A, s, mono[0], inner);
      out.add_scaled(outer, c * koszul * sign);
    }
  }
  CapClass eta = letter_times(u1, cap);
  if (!eta.empty()) {
    for (int s = 0; s <= i; ++s) {
      const int t = i + j - params_.r - s + 1;
      if (t < 0) continue;
      const int sign = ((i - s) % 2 == 0) ? 1 : -1;
      FockState corr = diag_cap(Fam::H, t, Fam::M, s, eta[0].first, tail);
      out.add_scaled(corr, eta[0].second * sign);
    }
  }
  out.scale(Rational(front_sign));
  return out;
}

FockState Engine::apply_f_shuffled(int j, const CurveClass& cap, const FockState& v,
                                   std::mt19937& rng) const {
  validate_index(OpKind::F, j);
  return lift_capped_fn(cap, v, [&](LetterId letter, const FockVector& b) {
    return shuffled_f(j, letter, b, rng);
  });
}

// ---------------------------------------------------------------------------
// matrices and state helpers
// ---------------------------------------------------------------------------

SparseMatrix Engine::operator_matrix(OpKind kind, int index, LetterId cap, int d) const {
  validate_index(kind, index);
  SparseMatrix m;
  m.col_basis = enumerate_basis(params_.r, params_.g, d);
  const int dt = target_charge(kind, d);
  if (dt >= 0) m.row_basis = enumerate_basis(params_.r, params_.g, dt);
  std::map<FockVector, std::size_t> row_index;
  for (std::size_t i = 0; i < m.row_basis.size(); ++i) row_index[m.row_basis[i]] = i;
  for (std::size_t cidx = 0; cidx < m.col_basis.size(); ++cidx) {
    if (kind == OpKind::H && index < 0) continue;
    FockState img = *prim(fam_of(kind), index, cap, m.col_basis[cidx]);
    for (const auto& [key, q] : img.terms) {
      m.entries[{row_index.at(key.vec), cidx}] = q;
    }
  }
  return m;
}

FockState Engine::with_labels(const FockState& v,
                              const std::vector<std::string>& labels) const {
  FockState out;
  out.genus = v.genus;
  out.labels = labels;
  std::vector<std::size_t> pos;
  pos.reserve(v.labels.size());
  for (const auto& l : v.labels) {
    auto it = std::lower_bound(labels.begin(), labels.end(), l);
    if (it == labels.end() || *it != l)
      throw std::invalid_argument("with_labels: target labels must contain " + l);
    pos.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  for (const auto& [key, q] : v.terms) {
    std::vector<LetterId> ext(labels.size(), alg_.unit());
    for (std::size_t i = 0; i < key.ext.size(); ++i) ext[pos[i]] = key.ext[i];
    out.terms[TermKey{key.vec, std::move(ext)}] = q;
  }
  return out;
}

FockState Engine::mul_external(const FockState& v, const CurveClass& cls) const {
  CurveClass ext_cls = cls.labels == v.labels ? cls : alg_.extend(cls, v.labels);
  FockState out;
  out.genus = v.genus;
  out.labels = v.labels;
  for (const auto& [key, q] : v.terms) {
    CurveClass mono;
    mono.genus = v.genus;
    mono.labels = v.labels;
    mono.terms[key.ext] = 1;
    CurveClass prod = alg_.mul(mono, ext_cls);
    for (const auto& [pm, pc] : prod.terms) {
      out.add_term(TermKey{key.vec, pm}, q * pc);
    }
  }
  return out;
}

FockState Engine::cap_label(const FockState& v, const std::string& label,
                            const CurveClass& cap) const {
  if (cap.labels.size() != 1 || cap.labels[0] != label)
    throw std::invalid_argument("cap_label: cap must live on the capped label");
  return integrate_label(mul_external(v, cap), label);
}

FockState Engine::integrate_label(const FockState& v, const std::string& label) const {
  auto it = std::lower_bound(v.labels.begin(), v.labels.end(), label);
  if (it == v.labels.end() || *it != label)
    throw std::invalid_argument("integrate_label: unknown label " + label);
  const std::size_t pos = static_cast<std::size_t>(it - v.labels.begin());
  FockState out;
  out.genus = v.genus;
  out.labels = v.labels;
  out.labels.erase(out.labels.begin() + static_cast<std::ptrdiff_t>(pos));
  for (const auto& [key, q] : v.terms) {
    if (key.ext[pos] != alg_.point()) continue;
    std::vector<LetterId> ext = key.ext;
    ext.erase(ext.begin() + static_cast<std::ptrdiff_t>(pos));
    out.add_term(TermKey{key.vec, std::move(ext)}, q);
  }
  return out;
}

}  // namespace quotrep
