#include "covforge/poly.hpp"

#include <algorithm>
#include <sstream>

namespace covforge {

VarTable::VarTable(std::vector<std::string> names) : names_(std::move(names)) {
  for (size_t i = 0; i < names_.size(); ++i) {
    for (size_t j = i + 1; j < names_.size(); ++j) {
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate variable name " + names_[i]);
    }
  }
}

int VarTable::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

MultiPoly::MultiPoly(VarTable vars, const FieldScalar& constant) : vars_(std::move(vars)) {
  if (!constant.is_zero()) terms_.emplace(Exponents(vars_.size(), 0), constant);
}

std::optional<int> MultiPoly::degree() const {
  if (terms_.empty()) return std::nullopt;
  // Map is graded, so the last term has maximal total degree.
  return static_cast<int>(total_degree(terms_.rbegin()->first));
}

bool MultiPoly::is_homogeneous() const {
  if (terms_.empty()) return true;
  const uint32_t d = total_degree(terms_.begin()->first);
  return total_degree(terms_.rbegin()->first) == d;
}

void MultiPoly::add_term(const Exponents& e, const FieldScalar& coeff) {
  if (static_cast<int>(e.size()) != vars_.size()) throw DimensionMismatch();
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.emplace(e, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

FieldScalar MultiPoly::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? FieldScalar() : it->second;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (vars_ != o.vars_) throw VarTableMismatch();
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (vars_ != o.vars_) throw VarTableMismatch();
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& x, const MultiPoly& y) {
  if (x.vars_ != y.vars_) throw VarTableMismatch();
  MultiPoly r(x.vars_);
  const int n = x.vars_.size();
  Exponents e(n);
  for (const auto& [ex, cx] : x.terms_) {
    for (const auto& [ey, cy] : y.terms_) {
      for (int i = 0; i < n; ++i) e[i] = ex[i] + ey[i];
      r.add_term(e, cx * cy);
    }
  }
  return r;
}

MultiPoly operator*(const FieldScalar& s, const MultiPoly& p) {
  MultiPoly r(p.vars_);
  if (s.is_zero()) return r;
  for (const auto& [e, c] : p.terms_) r.terms_.emplace(e, s * c);
  return r;
}

MultiPoly MultiPoly::derivative(int var) const {
  MultiPoly r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, FieldScalar(static_cast<long>(e[var])) * c);
  }
  return r;
}

FieldScalar MultiPoly::evaluate(const std::vector<FieldScalar>& point) const {
  if (static_cast<int>(point.size()) != vars_.size()) throw DimensionMismatch();
  FieldScalar total;
  for (const auto& [e, c] : terms_) {
    FieldScalar t = c;
    for (int i = 0; i < vars_.size(); ++i) {
      for (uint32_t k = 0; k < e[i]; ++k) t *= point[i];
    }
    total += t;
  }
  return total;
}

MultiPoly MultiPoly::embed(const VarTable& bigger, const std::vector<int>& where) const {
  if (static_cast<int>(where.size()) != vars_.size()) throw DimensionMismatch();
  MultiPoly r(bigger);
  for (const auto& [e, c] : terms_) {
    Exponents ne(bigger.size(), 0);
    for (int i = 0; i < vars_.size(); ++i) ne[where[i]] = e[i];
    r.add_term(ne, c);
  }
  return r;
}

MultiPoly monomial(const VarTable& vars, const Exponents& exps, const FieldScalar& coeff) {
  MultiPoly p(vars);
  p.add_term(exps, coeff);
  return p;
}

std::vector<Exponents> exponent_basis(int nvars, int degree) {
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  // Recursive enumeration in decreasing lexicographic order, which is the
  // graded-lex map order within one degree.
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      cur[var] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[var] = e;
      self(self, var + 1, remaining - e);
    }
  };
  if (nvars == 0) {
    if (degree == 0) out.push_back({});
    return out;
  }
  rec(rec, 0, degree);
  return out;
}

std::vector<MultiPoly> monomial_basis(const VarTable& vars, int degree) {
  if (degree < 0) throw std::invalid_argument("negative degree");
  std::vector<MultiPoly> out;
  for (const auto& e : exponent_basis(vars.size(), degree)) out.push_back(monomial(vars, e));
  return out;
}

MultiPoly substitute_linear(const MultiPoly& p, const FMat& L) {
  Substitutor sub(p.vars(), L);
  return sub.apply(p);
}

Substitutor::Substitutor(const VarTable& vars, const FMat& L) : vars_(vars) {
  const int n = vars_.size();
  if (L.rows() != n || L.cols() != n) throw DimensionMismatch();
  images_.reserve(n);
  pw_.resize(n);
  for (int j = 0; j < n; ++j) {
    MultiPoly img(vars_);
    Exponents e(n, 0);
    for (int k = 0; k < n; ++k) {
      if (L(k, j).is_zero()) continue;
      e[k] = 1;
      img.add_term(e, L(k, j));
      e[k] = 0;
    }
    if (img.terms().size() > 1) mixed_.push_back(j);
    images_.push_back(std::move(img));
    pw_[j].push_back(MultiPoly(vars_, FieldScalar(1)));
  }
}

const MultiPoly& Substitutor::mixed_power_product(const Exponents& key) {
  auto it = mixed_cache_.find(key);
  if (it != mixed_cache_.end()) return it->second;
  MultiPoly prod(vars_, FieldScalar(1));
  for (size_t m = 0; m < mixed_.size(); ++m) {
    const int j = mixed_[m];
    auto& cache = pw_[j];
    while (cache.size() <= key[m]) cache.push_back(cache.back() * images_[j]);
    if (key[m] > 0) prod = prod * cache[key[m]];
  }
  return mixed_cache_.emplace(key, std::move(prod)).first->second;
}

MultiPoly Substitutor::apply(const MultiPoly& p) {
  if (p.vars() != vars_) throw VarTableMismatch();
  const int n = vars_.size();
  MultiPoly r(vars_);
  Exponents base(n, 0);
  Exponents key(mixed_.size(), 0);
  for (const auto& [e, c] : p.terms()) {
    // Direct part: variables with single-term (or zero) images.
    std::fill(base.begin(), base.end(), 0);
    FieldScalar coeff = c;
    bool dead = false;
    for (int j = 0; j < n && !dead; ++j) {
      if (e[j] == 0) continue;
      const MultiPoly& img = images_[j];
      if (img.terms().size() > 1) continue;
      if (img.is_zero()) {
        dead = true;
        break;
      }
      const auto& [ie, ic] = *img.terms().begin();
      for (int k = 0; k < n; ++k) base[k] += ie[k] * e[j];
      if (ic == FieldScalar(-1)) {
        if (e[j] % 2 == 1) coeff = -coeff;
      } else if (ic != FieldScalar(1)) {
        for (uint32_t t = 0; t < e[j]; ++t) coeff *= ic;
      }
    }
    if (dead) continue;
    // Mixing part via the cached power product.
    for (size_t m = 0; m < mixed_.size(); ++m) key[m] = e[mixed_[m]];
    const MultiPoly& mp = mixed_power_product(key);
    Exponents full(n);
    for (const auto& [me, mc] : mp.terms()) {
      for (int k = 0; k < n; ++k) full[k] = base[k] + me[k];
      r.add_term(full, coeff * mc);
    }
  }
  return r;
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    bool any = false;
    for (int i = 0; i < vars_.size(); ++i) {
      if (e[i] == 0) continue;
      os << (any ? "*" : " * ") << vars_.name(i);
      if (e[i] > 1) os << "^" << e[i];
      any = true;
    }
  }
  return os.str();
}

}  // namespace covforge
