#include "covforge/genfun.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace covforge {

namespace {

// Dense univariate polynomials over FieldScalar, used for the per-element
// determinants inside the Molien formula.
using UniPoly = std::vector<FieldScalar>;

UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
  if (a.empty() || b.empty()) return {};
  UniPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

void uni_trim(UniPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// Exact division; throws when a remainder is left.
UniPoly uni_div(UniPoly num, const UniPoly& den) {
  UniPoly n = std::move(num);
  UniPoly d = den;
  uni_trim(n);
  uni_trim(d);
  if (d.empty()) throw std::domain_error("division by zero polynomial");
  if (n.empty()) return {};
  if (n.size() < d.size()) throw NotPolynomial();
  UniPoly q(n.size() - d.size() + 1);
  const FieldScalar lead_inv = d.back().inverse();
  for (int k = static_cast<int>(q.size()) - 1; k >= 0; --k) {
    const FieldScalar c = n[k + d.size() - 1] * lead_inv;
    q[k] = c;
    if (c.is_zero()) continue;
    for (size_t j = 0; j < d.size(); ++j) n[k + j] -= c * d[j];
  }
  for (const auto& c : n) {
    if (!c.is_zero()) throw NotPolynomial();
  }
  return q;
}

// det(1 - t M) by cofactor expansion with polynomial entries.
UniPoly char_det(const FMat& M) {
  const int n = static_cast<int>(M.rows());
  std::vector<std::vector<UniPoly>> entry(n, std::vector<UniPoly>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      UniPoly e = {FieldScalar(i == j ? 1 : 0), -M(i, j)};
      uni_trim(e);
      entry[i][j] = std::move(e);
    }
  }
  std::vector<int> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = j;
  auto rec = [&](auto&& self, int row, std::vector<int> use) -> UniPoly {
    if (use.empty()) return {FieldScalar(1)};
    UniPoly det;
    for (size_t k = 0; k < use.size(); ++k) {
      const UniPoly& e = entry[row][use[k]];
      if (e.empty()) continue;
      std::vector<int> rest;
      for (size_t m = 0; m < use.size(); ++m) {
        if (m != k) rest.push_back(use[m]);
      }
      UniPoly sub = uni_mul(e, self(self, row + 1, std::move(rest)));
      if (det.size() < sub.size()) det.resize(sub.size());
      const int sgn = (k % 2 == 0) ? 1 : -1;
      for (size_t m = 0; m < sub.size(); ++m) {
        det[m] += sgn > 0 ? sub[m] : -sub[m];
      }
    }
    uni_trim(det);
    return det;
  };
  return rec(rec, 0, cols);
}

// prod (1 - t^d) over a list of degrees.
UniPoly expand_factors(const std::vector<int>& degrees) {
  UniPoly r = {FieldScalar(1)};
  for (int d : degrees) {
    UniPoly f(d + 1);
    f[0] = FieldScalar(1);
    f[d] = FieldScalar(-1);
    r = uni_mul(r, f);
  }
  return r;
}

mpz_class field_to_mpz(const FieldScalar& v) {
  if (!v.is_rational() || v.a.get_den() != 1) {
    throw std::logic_error("Molien numerator coefficient is not an integer");
  }
  return v.a.get_num();
}

}  // namespace

void GenFun::add_num(const Exponents& e, const mpz_class& c) {
  if (c == 0) return;
  auto [it, inserted] = num.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) num.erase(it);
  }
}

void GenFun::sort_denom() { std::sort(denom.begin(), denom.end()); }

GenFun GenFun::operator*(const GenFun& o) const {
  if (nvars != o.nvars) throw DimensionMismatch();
  GenFun r(nvars, denom);
  r.denom.insert(r.denom.end(), o.denom.begin(), o.denom.end());
  r.sort_denom();
  Exponents e(nvars);
  for (const auto& [ea, ca] : num) {
    for (const auto& [eb, cb] : o.num) {
      for (int i = 0; i < nvars; ++i) e[i] = ea[i] + eb[i];
      r.add_num(e, ca * cb);
    }
  }
  return r;
}

GenFun GenFun::operator+(const GenFun& o) const {
  if (nvars != o.nvars || denom != o.denom) {
    throw std::invalid_argument("generating functions with different denominators");
  }
  GenFun r = *this;
  for (const auto& [e, c] : o.num) r.add_num(e, c);
  return r;
}

bool GenFun::equals(const GenFun& o) const {
  if (nvars != o.nvars) return false;
  // Cross-multiplied polynomial identity num1 * D2 == num2 * D1.
  auto expand = [this](const GenFun& base, const std::vector<std::pair<int, int>>& factors) {
    std::map<Exponents, mpz_class> poly = base.num;
    for (const auto& [var, deg] : factors) {
      std::map<Exponents, mpz_class> next;
      for (const auto& [e, c] : poly) {
        auto [it1, in1] = next.try_emplace(e, c);
        if (!in1) it1->second += c;
        Exponents shifted = e;
        shifted[var] += deg;
        auto [it2, in2] = next.try_emplace(shifted, -c);
        if (!in2) it2->second -= c;
      }
      for (auto it = next.begin(); it != next.end();) {
        it = (it->second == 0) ? next.erase(it) : std::next(it);
      }
      poly = std::move(next);
    }
    return poly;
  };
  return expand(*this, o.denom) == expand(o, denom);
}

GenFun GenFun::collapsed() const {
  GenFun r(1, {});
  for (const auto& [var, deg] : denom) r.denom.emplace_back(0, deg);
  r.sort_denom();
  for (const auto& [e, c] : num) r.add_num(Exponents{total_degree(e)}, c);
  return r;
}

std::vector<mpz_class> GenFun::taylor(int order) const {
  if (order < 0) throw std::invalid_argument("negative order");
  const GenFun g = nvars == 1 ? *this : collapsed();
  std::vector<mpz_class> c(order + 1, 0);
  for (const auto& [e, v] : g.num) {
    if (e[0] <= static_cast<uint32_t>(order)) c[e[0]] += v;
  }
  // Each 1/(1 - t^d) factor is the running sum with stride d.
  for (const auto& [var, d] : g.denom) {
    for (int k = d; k <= order; ++k) c[k] += c[k - d];
  }
  return c;
}

std::vector<mpz_class> GenFun::canonical_numerator(std::vector<int> target_degrees) const {
  const GenFun g = nvars == 1 ? *this : collapsed();
  std::vector<int> remaining;
  {
    std::multiset<int> have;
    for (const auto& [var, d] : g.denom) have.insert(d);
    for (int d : target_degrees) {
      auto it = have.find(d);
      if (it != have.end()) {
        have.erase(it);
      } else {
        remaining.push_back(-d);  // multiply by this factor
      }
    }
    for (int d : have) remaining.push_back(d);  // divide by this factor
  }
  std::vector<mpz_class> poly;
  for (const auto& [e, v] : g.num) {
    if (poly.size() <= e[0]) poly.resize(e[0] + 1, 0);
    poly[e[0]] += v;
  }
  if (poly.empty()) return poly;
  for (int d : remaining) {
    if (d < 0) {
      // Multiply by (1 - t^{-d}).
      const int k = -d;
      std::vector<mpz_class> next(poly.size() + k, 0);
      for (size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i];
        next[i + k] -= poly[i];
      }
      poly = std::move(next);
    } else {
      // Exact division by (1 - t^d): power-series division must terminate.
      if (poly.size() <= static_cast<size_t>(d)) throw NotPolynomial();
      std::vector<mpz_class> q(poly.size(), 0);
      for (size_t i = 0; i < poly.size(); ++i) {
        q[i] = poly[i] + (i >= static_cast<size_t>(d) ? q[i - d] : mpz_class(0));
      }
      for (size_t i = poly.size() - d; i < poly.size(); ++i) {
        if (q[i] != 0) throw NotPolynomial();
      }
      q.resize(poly.size() - d);
      poly = std::move(q);
    }
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
  }
  return poly;
}

GenFun GenFun::append_trivial_factor() const {
  GenFun r(nvars + 1, denom);
  r.denom.emplace_back(nvars, 1);
  r.sort_denom();
  for (const auto& [e, c] : num) {
    Exponents ne = e;
    ne.push_back(0);
    r.num.emplace(std::move(ne), c);
  }
  return r;
}

std::string GenFun::str() const {
  std::ostringstream os;
  if (num.empty()) return "0";
  auto var_name = [this](int v) {
    return nvars == 1 ? std::string("t") : "t" + std::to_string(v + 1);
  };
  os << "(";
  bool first = true;
  for (const auto& [e, c] : num) {
    const bool neg = c < 0;
    mpz_class a = abs(c);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    const bool constant = total_degree(e) == 0;
    if (a != 1 || constant) os << a.get_str();
    bool any = !(a != 1 || constant);
    for (int v = 0; v < nvars; ++v) {
      if (e[v] == 0) continue;
      if (!any) os << "*";
      any = true;
      os << var_name(v);
      if (e[v] > 1) os << "^" << e[v];
    }
  }
  os << ")";
  if (!denom.empty()) {
    os << "/(";
    std::map<std::pair<int, int>, int> counts;
    for (const auto& f : denom) counts[f]++;
    bool firstf = true;
    for (const auto& [f, k] : counts) {
      if (!firstf) os << " ";
      firstf = false;
      os << "(1-" << var_name(f.first);
      if (f.second > 1) os << "^" << f.second;
      os << ")";
      if (k > 1) os << "^" << k;
    }
    os << ")";
  }
  return os.str();
}

GenFun molien_direct(const RepSum& R, int final_irrep, int nvars_total, int var_base) {
  const FiniteGroup& G = *R.group;
  const int mu = static_cast<int>(R.slices.size());
  if (nvars_total < 0) nvars_total = mu;

  GenFun M(nvars_total, {});
  std::vector<std::vector<int>> slice_degrees(mu);
  for (int i = 0; i < mu; ++i) {
    slice_degrees[i] = G.irreps[R.slices[i].irrep].primary_degrees;
    for (int d : slice_degrees[i]) M.denom.emplace_back(var_base + i, d);
  }
  M.sort_denom();

  // Numerator = (1/|G|) sum over classes of |class| * chi(final) *
  //             prod_i [ D_i(t_i) / det(1 - t_i M_i(g)) ],
  // each bracket an exact univariate polynomial.
  std::map<Exponents, FieldScalar> total;
  for (const auto& cls : G.classes) {
    const int g = cls.front();
    const FieldScalar weight =
        FieldScalar(static_cast<long>(cls.size())) * G.character(final_irrep, g);
    if (weight.is_zero()) continue;

    std::map<Exponents, FieldScalar> term;
    term.emplace(Exponents(nvars_total, 0), weight);
    for (int i = 0; i < mu; ++i) {
      const FMat& Mi = G.irreps[R.slices[i].irrep].mats[g];
      const UniPoly q = uni_div(expand_factors(slice_degrees[i]), char_det(Mi));
      std::map<Exponents, FieldScalar> next;
      for (const auto& [e, c] : term) {
        for (size_t k = 0; k < q.size(); ++k) {
          if (q[k].is_zero()) continue;
          Exponents ne = e;
          ne[var_base + i] += static_cast<uint32_t>(k);
          auto [it, inserted] = next.try_emplace(std::move(ne), c * q[k]);
          if (!inserted) it->second += c * q[k];
        }
      }
      term = std::move(next);
    }
    for (const auto& [e, c] : term) {
      auto [it, inserted] = total.try_emplace(e, c);
      if (!inserted) it->second += c;
    }
  }
  const FieldScalar inv_order(rat(1, G.order()));
  for (const auto& [e, c] : total) {
    const FieldScalar v = c * inv_order;
    if (!v.is_zero()) M.num.emplace(e, field_to_mpz(v));
  }
  return M;
}

std::map<int, GenFun> molien_direct_family(const RepSum& R, int nvars_total, int var_base) {
  std::map<int, GenFun> fam;
  for (size_t f = 0; f < R.group->irreps.size(); ++f) {
    fam.emplace(static_cast<int>(f), molien_direct(R, static_cast<int>(f), nvars_total, var_base));
  }
  return fam;
}

GenFun couple(const FiniteGroup& G, int final_irrep, const std::map<int, GenFun>& left,
              const std::map<int, GenFun>& right) {
  const int ni = static_cast<int>(G.irreps.size());
  GenFun sum;
  bool have = false;
  for (int a = 0; a < ni; ++a) {
    const GenFun& la = left.at(a);
    if (la.is_zero()) continue;
    for (int b = 0; b < ni; ++b) {
      const GenFun& rb = right.at(b);
      if (rb.is_zero()) continue;
      const int c = G.product_multiplicity(a, b, final_irrep);
      if (c == 0) continue;
      GenFun prod = la * rb;
      if (c > 1) {
        GenFun scaled = prod;
        for (int k = 1; k < c; ++k) scaled = scaled + prod;
        prod = std::move(scaled);
      }
      sum = have ? sum + prod : std::move(prod);
      have = true;
    }
  }
  if (!have) {
    // All products vanish: the zero GenFun over the union of denominators.
    const GenFun& l0 = left.begin()->second;
    const GenFun& r0 = right.begin()->second;
    GenFun z(l0.nvars, l0.denom);
    z.denom.insert(z.denom.end(), r0.denom.begin(), r0.denom.end());
    z.sort_denom();
    return z;
  }
  return sum;
}

std::map<int, GenFun> couple_family(const FiniteGroup& G, const std::map<int, GenFun>& left,
                                    const std::map<int, GenFun>& right) {
  std::map<int, GenFun> fam;
  for (size_t f = 0; f < G.irreps.size(); ++f) {
    fam.emplace(static_cast<int>(f), couple(G, static_cast<int>(f), left, right));
  }
  return fam;
}

}  // namespace covforge
