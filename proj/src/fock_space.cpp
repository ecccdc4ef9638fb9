#include "quotrep/fock_space.hpp"

#include <algorithm>
#include <functional>

namespace quotrep {

int vector_degree(const CurveAlgebra& alg, const FockVector& v) {
  int d = 0;
  for (const Slot& s : v.slots) d += 2 * s.k + alg.degree(s.dec);
  return d;
}

int vector_parity(const CurveAlgebra& alg, const FockVector& v) {
  int p = 0;
  for (const Slot& s : v.slots) p ^= (alg.degree(s.dec) & 1);
  return p;
}

CanonResult canonicalize_slots(const CurveAlgebra& alg, std::vector<Slot> raw) {
  // insertion sort by (k descending, decoration ascending); each adjacent
  // transposition of two odd decorations flips the sign
  int sign = 1;
  auto before = [](const Slot& a, const Slot& b) {
    return a.k > b.k || (a.k == b.k && a.dec < b.dec);
  };
  for (std::size_t i = 1; i < raw.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && before(raw[j], raw[j - 1])) {
      if (alg.is_odd(raw[j].dec) && alg.is_odd(raw[j - 1].dec)) sign = -sign;
      std::swap(raw[j], raw[j - 1]);
      --j;
    }
  }
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i] == raw[i - 1] && alg.is_odd(raw[i].dec)) return {FockVector{}, 0};
  }
  return {FockVector{std::move(raw)}, sign};
}

void FockState::add_term(const TermKey& key, const Rational& c) {
  if (is_zero(c)) return;
  auto it = terms.find(key);
  if (it == terms.end()) {
    terms.emplace(key, c);
  } else {
    it->second += c;
    if (is_zero(it->second)) terms.erase(it);
  }
}

void FockState::add_scaled(const FockState& other, const Rational& c) {
  if (is_zero(c) || other.terms.empty()) return;
  if (labels != other.labels || genus != other.genus)
    throw std::invalid_argument("state addition: label or genus mismatch");
  for (const auto& [key, q] : other.terms) add_term(key, q * c);
}

void FockState::scale(const Rational& c) {
  if (is_zero(c)) {
    terms.clear();
    return;
  }
  for (auto& [key, q] : terms) q *= c;
}

std::set<int> FockState::charges() const {
  std::set<int> out;
  for (const auto& [key, q] : terms) out.insert(key.vec.charge());
  return out;
}

FockState vacuum_state(int genus) {
  FockState s;
  s.genus = genus;
  s.terms[TermKey{}] = 1;
  return s;
}

FockState basis_state(int genus, const FockVector& v, const Rational& c) {
  FockState s;
  s.genus = genus;
  if (!is_zero(c)) s.terms[TermKey{v, {}}] = c;
  return s;
}

namespace {

// decorated blocks of an equal-k run: weakly increasing letter sequences with
// no repeated odd letter
void enumerate_blocks(const CurveAlgebra& alg, int size, LetterId min_letter,
                      std::vector<LetterId>& cur,
                      const std::function<void(const std::vector<LetterId>&)>& emit) {
  if (size == 0) {
    emit(cur);
    return;
  }
  for (LetterId a = min_letter; a <= alg.point(); ++a) {
    if (alg.is_odd(a) && !cur.empty() && cur.back() == a) continue;
    cur.push_back(a);
    enumerate_blocks(alg, size - 1, alg.is_odd(a) ? a + 1 : a, cur, emit);
    cur.pop_back();
  }
}

void enumerate_partitions(int r, int d, int max_part, std::vector<int>& cur,
                          const std::function<void(const std::vector<int>&)>& emit) {
  if (d == 0) {
    emit(cur);
    return;
  }
  for (int k = std::min(max_part, r - 1); k >= 0; --k) {
    cur.push_back(k);
    enumerate_partitions(r, d - 1, k, cur, emit);
    cur.pop_back();
  }
}

}  // namespace

std::vector<FockVector> enumerate_basis(int r, int g, int d) {
  if (r < 1) throw std::invalid_argument("rank must be positive");
  if (d < 0) throw std::invalid_argument("charge must be non-negative");
  CurveAlgebra alg(g);
  std::vector<FockVector> out;
  std::vector<int> part;
  enumerate_partitions(r, d, r - 1, part, [&](const std::vector<int>& ks) {
    // decorate each equal-k block independently
    std::vector<std::pair<int, int>> blocks;  // (k, size)
    for (std::size_t i = 0; i < ks.size();) {
      std::size_t j = i;
      while (j < ks.size() && ks[j] == ks[i]) ++j;
      blocks.emplace_back(ks[i], static_cast<int>(j - i));
      i = j;
    }
    std::vector<std::vector<std::vector<LetterId>>> decorated(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::vector<LetterId> cur;
      enumerate_blocks(alg, blocks[b].second, 0, cur,
                       [&](const std::vector<LetterId>& letters) {
                         decorated[b].push_back(letters);
                       });
    }
    std::vector<std::size_t> pick(blocks.size(), 0);
    while (true) {
      FockVector v;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (LetterId a : decorated[b][pick[b]]) v.slots.push_back({blocks[b].first, a});
      }
      out.push_back(std::move(v));
      std::size_t b = blocks.size();
      while (b > 0) {
        --b;
        if (++pick[b] < decorated[b].size()) break;
        pick[b] = 0;
        if (b == 0) {
          b = blocks.size() + 1;
          break;
        }
      }
      if (blocks.empty() || b == blocks.size() + 1) break;
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long long> degree_histogram(const CurveAlgebra& alg, int r, int d,
                                        const std::vector<FockVector>& basis) {
  std::vector<long long> hist(static_cast<std::size_t>(2 * r * d + 1), 0);
  for (const FockVector& v : basis) hist[static_cast<std::size_t>(vector_degree(alg, v))]++;
  return hist;
}

std::vector<std::vector<long long>> poincare_closed_form(int r, int g, int d_max) {
  if (d_max < 0) throw std::invalid_argument("d_max must be non-negative");
  const int zmax = 2 * r * d_max;
  auto table = std::vector<std::vector<long long>>(
      static_cast<std::size_t>(d_max + 1),
      std::vector<long long>(static_cast<std::size_t>(zmax + 1), 0));
  table[0][0] = 1;
  // numerator factors (1 + t z^{2i+1})^{2g}
  std::vector<long long> binom(static_cast<std::size_t>(2 * g + 1), 0);
  binom[0] = 1;
  for (int row = 1; row <= 2 * g; ++row) {
    for (int j = row; j >= 1; --j) binom[static_cast<std::size_t>(j)] += binom[static_cast<std::size_t>(j - 1)];
  }
  for (int i = 0; i < r; ++i) {
    const int a = 2 * i + 1;
    auto next = std::vector<std::vector<long long>>(
        static_cast<std::size_t>(d_max + 1),
        std::vector<long long>(static_cast<std::size_t>(zmax + 1), 0));
    for (int d = 0; d <= d_max; ++d) {
      for (int z = 0; z <= zmax; ++z) {
        if (table[d][z] == 0) continue;
        for (int j = 0; j <= 2 * g && d + j <= d_max; ++j) {
          if (z + a * j > zmax) break;
          next[d + j][z + a * j] += table[d][z] * binom[static_cast<std::size_t>(j)];
        }
      }
    }
    table = std::move(next);
  }
  // denominator factors 1/(1 - t z^b): table[d][z] += table[d-1][z-b]
  for (int i = 0; i < r; ++i) {
    for (int b : {2 * i, 2 * i + 2}) {
      for (int d = 1; d <= d_max; ++d) {
        for (int z = b; z <= zmax; ++z) {
          table[d][z] += table[d - 1][z - b];
        }
      }
    }
  }
  return table;
}

}  // namespace quotrep
