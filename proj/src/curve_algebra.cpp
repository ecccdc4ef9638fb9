#include "quotrep/curve_algebra.hpp"

#include <algorithm>
#include <cstdlib>

namespace quotrep {

CurveAlgebra::CurveAlgebra(int genus) : genus_(genus) {
  if (genus < 0) throw std::invalid_argument("genus must be non-negative");
  pairs_.push_back({point(), unit(), +1});
  pairs_.push_back({unit(), point(), +1});
  for (int i = 1; i <= genus_; ++i) {
    pairs_.push_back({beta(i), alpha(i), +1});
    pairs_.push_back({alpha(i), beta(i), -1});
  }
}

LetterId CurveAlgebra::alpha(int i) const {
  if (i < 1 || i > genus_) throw std::out_of_range("alpha index out of range");
  return i;
}

LetterId CurveAlgebra::beta(int i) const {
  if (i < 1 || i > genus_) throw std::out_of_range("beta index out of range");
  return genus_ + i;
}

int CurveAlgebra::degree(LetterId a) const {
  validate_letter(a);
  if (a == 0) return 0;
  if (a == point()) return 2;
  return 1;
}

void CurveAlgebra::validate_letter(LetterId a) const {
  if (a < 0 || a > point())
    throw std::out_of_range("curve letter does not exist at this genus");
}

std::string CurveAlgebra::letter_name(LetterId a) const {
  validate_letter(a);
  if (a == 0) return "1";
  if (a == point()) return "w";
  if (a <= genus_) return "al" + std::to_string(a);
  return "be" + std::to_string(a - genus_);
}

std::optional<LetterId> CurveAlgebra::letter_from_name(const std::string& name) const {
  if (name == "1") return unit();
  if (name == "w") return point();
  auto parse_index = [&](std::size_t off) -> std::optional<int> {
    if (name.size() <= off) return std::nullopt;
    int v = 0;
    for (std::size_t i = off; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
      v = v * 10 + (name[i] - '0');
    }
    return v;
  };
  if (name.rfind("al", 0) == 0) {
    auto i = parse_index(2);
    if (i && *i >= 1 && *i <= genus_) return alpha(*i);
    return std::nullopt;
  }
  if (name.rfind("be", 0) == 0) {
    auto i = parse_index(2);
    if (i && *i >= 1 && *i <= genus_) return beta(*i);
    return std::nullopt;
  }
  return std::nullopt;
}

LetterProduct CurveAlgebra::letter_mul(LetterId x, LetterId y) const {
  validate_letter(x);
  validate_letter(y);
  if (x == unit()) return {1, y};
  if (y == unit()) return {1, x};
  // point * anything of positive degree = 0 (top degree of a curve)
  if (x == point() || y == point()) return {0, 0};
  // both odd
  if (x <= genus_ && y == genus_ + x) return {1, point()};   // alpha_i beta_i
  if (x > genus_ && y == x - genus_) return {-1, point()};   // beta_i alpha_i
  return {0, 0};
}

int CurveAlgebra::monomial_degree(const std::vector<LetterId>& mono) const {
  int d = 0;
  for (LetterId a : mono) d += degree(a);
  return d;
}

int CurveAlgebra::monomial_parity(const std::vector<LetterId>& mono) const {
  int p = 0;
  for (LetterId a : mono) p ^= (degree(a) & 1);
  return p;
}

CurveClass CurveAlgebra::scalar(const Rational& c) const {
  CurveClass out;
  out.genus = genus_;
  if (!is_zero(c)) out.terms[{}] = c;
  return out;
}

CurveClass CurveAlgebra::letter_class(const std::string& label, LetterId a,
                                      const Rational& c) const {
  validate_letter(a);
  CurveClass out;
  out.genus = genus_;
  out.labels = {label};
  if (!is_zero(c)) out.terms[{a}] = c;
  return out;
}

CurveClass CurveAlgebra::zero(const std::vector<std::string>& labels) const {
  CurveClass out;
  out.genus = genus_;
  out.labels = labels;
  return out;
}

CurveClass CurveAlgebra::add(const CurveClass& x, const CurveClass& y) const {
  if (x.labels != y.labels || x.genus != y.genus)
    throw std::invalid_argument("curve class addition: label or genus mismatch");
  CurveClass out = x;
  for (const auto& [mono, c] : y.terms) {
    auto it = out.terms.find(mono);
    if (it == out.terms.end()) {
      out.terms.emplace(mono, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) out.terms.erase(it);
    }
  }
  return out;
}

CurveClass CurveAlgebra::scale(const CurveClass& x, const Rational& c) const {
  CurveClass out;
  out.genus = x.genus;
  out.labels = x.labels;
  if (is_zero(c)) return out;
  for (const auto& [mono, q] : x.terms) out.terms[mono] = q * c;
  return out;
}

CurveClass CurveAlgebra::mul(const CurveClass& x, const CurveClass& y) const {
  if (x.genus != y.genus) throw std::invalid_argument("curve class mul: genus mismatch");
  if (x.labels != y.labels)
    throw std::invalid_argument("curve class mul: label set mismatch");
  CurveClass out = zero(x.labels);
  const std::size_t m = x.labels.size();
  for (const auto& [xm, xc] : x.terms) {
    for (const auto& [ym, yc] : y.terms) {
      // (x1 (x) ... (x) xm) * (y1 (x) ... (x) ym)
      //   = (-1)^{sum_{i<j} |y_i||x_j|} (x1 y1) (x) ... (x) (xm ym)
      int sign = 0;
      int coeff_sign = 1;
      std::vector<LetterId> mono(m);
      bool dead = false;
      std::vector<int> xsuf(m + 1, 0);  // parity of x_{i..m-1}
      for (std::size_t i = m; i-- > 0;) {
        xsuf[i] = xsuf[i + 1] ^ (degree(xm[i]) & 1);
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (is_odd(ym[i]) && xsuf[i + 1]) sign ^= 1;
        LetterProduct p = letter_mul(xm[i], ym[i]);
        if (p.coeff == 0) {
          dead = true;
          break;
        }
        coeff_sign *= p.coeff;
        mono[i] = p.letter;
      }
      if (dead) continue;
      Rational c = xc * yc * coeff_sign * (sign ? -1 : 1);
      auto it = out.terms.find(mono);
      if (it == out.terms.end()) {
        if (!is_zero(c)) out.terms.emplace(std::move(mono), std::move(c));
      } else {
        it->second += c;
        if (is_zero(it->second)) out.terms.erase(it);
      }
    }
  }
  return out;
}

CurveClass CurveAlgebra::extend(const CurveClass& x,
                                const std::vector<std::string>& labels) const {
  CurveClass out = zero(labels);
  std::vector<std::size_t> pos;
  pos.reserve(x.labels.size());
  for (const auto& l : x.labels) {
    auto it = std::lower_bound(labels.begin(), labels.end(), l);
    if (it == labels.end() || *it != l)
      throw std::invalid_argument("extend: target labels do not contain " + l);
    pos.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  for (const auto& [mono, c] : x.terms) {
    std::vector<LetterId> big(labels.size(), unit());
    for (std::size_t i = 0; i < mono.size(); ++i) big[pos[i]] = mono[i];
    out.terms[big] = c;
  }
  return out;
}

CurveClass CurveAlgebra::integrate(const CurveClass& x, const std::string& label) const {
  auto it = std::lower_bound(x.labels.begin(), x.labels.end(), label);
  if (it == x.labels.end() || *it != label)
    throw std::invalid_argument("integrate: unknown label " + label);
  const std::size_t p = static_cast<std::size_t>(it - x.labels.begin());
  CurveClass out;
  out.genus = x.genus;
  out.labels = x.labels;
  out.labels.erase(out.labels.begin() + p);
  for (const auto& [mono, c] : x.terms) {
    // only the point component survives; the point letter is even, so moving
    // it to the right picks up no sign
    if (mono[p] != point()) continue;
    std::vector<LetterId> rest = mono;
    rest.erase(rest.begin() + p);
    auto jt = out.terms.find(rest);
    if (jt == out.terms.end()) {
      out.terms.emplace(std::move(rest), c);
    } else {
      jt->second += c;
      if (is_zero(jt->second)) out.terms.erase(jt);
    }
  }
  return out;
}

CurveClass CurveAlgebra::integrate_all(const CurveClass& x) const {
  CurveClass cur = x;
  while (!cur.labels.empty()) cur = integrate(cur, cur.labels.back());
  return cur;
}

CurveClass CurveAlgebra::permute_labels(
    const CurveClass& x, const std::map<std::string, std::string>& relabel) const {
  std::vector<std::string> new_labels;
  new_labels.reserve(x.labels.size());
  for (const auto& l : x.labels) {
    auto it = relabel.find(l);
    new_labels.push_back(it == relabel.end() ? l : it->second);
  }
  // destination slot of each old slot after sorting the new names
  std::vector<std::string> sorted = new_labels;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw std::invalid_argument("permute_labels: relabeling is not injective");
  std::vector<std::size_t> dest(new_labels.size());
  for (std::size_t i = 0; i < new_labels.size(); ++i) {
    dest[i] = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), new_labels[i]) - sorted.begin());
  }
  CurveClass out = zero(sorted);
  for (const auto& [mono, c] : x.terms) {
    // Koszul sign: count inversions among odd letters
    int sign = 0;
    for (std::size_t i = 0; i < mono.size(); ++i) {
      if (!is_odd(mono[i])) continue;
      for (std::size_t j = i + 1; j < mono.size(); ++j) {
        if (is_odd(mono[j]) && dest[i] > dest[j]) sign ^= 1;
      }
    }
    std::vector<LetterId> pm(mono.size());
    for (std::size_t i = 0; i < mono.size(); ++i) pm[dest[i]] = mono[i];
    out.terms[pm] = sign ? Rational(-c) : c;
  }
  return out;
}

CurveClass CurveAlgebra::diagonal_class(const std::string& l1, const std::string& l2) const {
  if (l1 == l2) throw std::invalid_argument("diagonal_class: labels must differ");
  CurveClass out = zero({std::min(l1, l2), std::max(l1, l2)});
  const bool flip = l1 > l2;  // stored order is sorted; pairs are (l1, l2)
  for (const DualPair& p : pairs_) {
    std::vector<LetterId> mono(2);
    int sign = p.sign;
    if (!flip) {
      mono[0] = p.u;
      mono[1] = p.u_dual;
    } else {
      mono[0] = p.u_dual;
      mono[1] = p.u;
      if (is_odd(p.u) && is_odd(p.u_dual)) sign = -sign;
    }
    auto it = out.terms.find(mono);
    if (it == out.terms.end()) {
      out.terms.emplace(std::move(mono), Rational(sign));
    } else {
      it->second += sign;
      if (is_zero(it->second)) out.terms.erase(it);
    }
  }
  return out;
}

CurveClass CurveAlgebra::canonical_class(const std::string& label) const {
  return letter_class(label, point(), Rational(2 * genus_ - 2));
}

}  // namespace quotrep
