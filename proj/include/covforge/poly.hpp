#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covforge/field.hpp"

namespace covforge {

struct VarTableMismatch : std::invalid_argument {
  VarTableMismatch() : std::invalid_argument("operands use different variable tables") {}
};
struct DimensionMismatch : std::invalid_argument {
  DimensionMismatch() : std::invalid_argument("matrix dimension does not match variable count") {}
};

/// Ordered list of coordinate names. The order is fixed for the lifetime of
/// a computation; monomial comparisons use it.
class VarTable {
 public:
  VarTable() = default;
  explicit VarTable(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(const std::string& name) const;  // -1 when absent

  friend bool operator==(const VarTable& x, const VarTable& y) { return x.names_ == y.names_; }
  friend bool operator!=(const VarTable& x, const VarTable& y) { return !(x == y); }

 private:
  std::vector<std::string> names_;
};

using Exponents = std::vector<uint32_t>;

inline uint32_t total_degree(const Exponents& e) {
  uint32_t s = 0;
  for (uint32_t x : e) s += x;
  return s;
}

/// Graded lexicographic order: lower total degree first; within a degree,
/// lexicographically larger exponent vectors first (x1^2 < x1*x2 < x2^2 in
/// map order, which matches the usual tabulation order).
struct GrlexLess {
  bool operator()(const Exponents& x, const Exponents& y) const {
    const uint32_t dx = total_degree(x), dy = total_degree(y);
    if (dx != dy) return dx < dy;
    return x > y;  // reversed lexicographic within a degree
  }
};

/// Sparse multivariate polynomial over FieldScalar. No zero coefficients are
/// stored; the zero polynomial has an empty term map and undefined degree.
class MultiPoly {
 public:
  using TermMap = std::map<Exponents, FieldScalar, GrlexLess>;

  MultiPoly() = default;
  explicit MultiPoly(VarTable vars) : vars_(std::move(vars)) {}
  MultiPoly(VarTable vars, const FieldScalar& constant);

  const VarTable& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Degree of the zero polynomial is undefined (nullopt).
  std::optional<int> degree() const;
  bool is_homogeneous() const;

  void add_term(const Exponents& e, const FieldScalar& coeff);
  FieldScalar coeff(const Exponents& e) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly x, const MultiPoly& y) { return x += y; }
  friend MultiPoly operator-(MultiPoly x, const MultiPoly& y) { return x -= y; }
  friend MultiPoly operator*(const MultiPoly& x, const MultiPoly& y);
  friend MultiPoly operator*(const FieldScalar& s, const MultiPoly& p);
  friend bool operator==(const MultiPoly& x, const MultiPoly& y) {
    return x.vars_ == y.vars_ && x.terms_ == y.terms_;
  }
  friend bool operator!=(const MultiPoly& x, const MultiPoly& y) { return !(x == y); }

  MultiPoly derivative(int var) const;
  FieldScalar evaluate(const std::vector<FieldScalar>& point) const;

  /// Re-expresses the polynomial over a larger variable table; `where[i]`
  /// is the index of old variable i in the new table.
  MultiPoly embed(const VarTable& bigger, const std::vector<int>& where) const;

  std::string str() const;

 private:
  VarTable vars_;
  TermMap terms_;
};

/// Monomial helper: coeff * prod vars[i]^exps[i].
MultiPoly monomial(const VarTable& vars, const Exponents& exps,
                   const FieldScalar& coeff = FieldScalar(1));

/// All monomials of exact total degree in graded-lex order.
/// Count is C(degree + n - 1, n - 1).
std::vector<MultiPoly> monomial_basis(const VarTable& vars, int degree);
std::vector<Exponents> exponent_basis(int nvars, int degree);

/// Substitution by a linear map: variable x_j is replaced by
/// sum_k L(k, j) x_k, so substitute(substitute(p, L2), L1) equals
/// substitute(p, L1 * L2). Degree is preserved for invertible L.
MultiPoly substitute_linear(const MultiPoly& p, const FMat& L);

/// Reusable linear substitution with persistent power caches. Variables
/// whose image is a single term (signed permutations, scalings) are applied
/// directly; products of the remaining variable-image powers are cached by
/// their joint exponent pattern.
class Substitutor {
 public:
  Substitutor(const VarTable& vars, const FMat& L);

  MultiPoly apply(const MultiPoly& p);

 private:
  const MultiPoly& mixed_power_product(const Exponents& e);

  VarTable vars_;
  std::vector<MultiPoly> images_;
  std::vector<int> mixed_;  // variables with multi-term images
  std::vector<std::vector<MultiPoly>> pw_;
  std::map<Exponents, MultiPoly> mixed_cache_;
};

}  // namespace covforge
