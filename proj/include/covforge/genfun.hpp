#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "covforge/group.hpp"

namespace covforge {

struct NotPolynomial : std::runtime_error {
  NotPolynomial() : std::runtime_error("requested denominator is incompatible") {}
};

/// Multivariate rational generating function with integer coefficients,
/// canonicalized as a numerator over a product of (1 - t_v^d) factors. The
/// denominator is kept in factored form only.
class GenFun {
 public:
  int nvars = 0;
  std::map<Exponents, mpz_class> num;
  std::vector<std::pair<int, int>> denom;  // (variable, degree), sorted

  GenFun() = default;
  GenFun(int nv, std::vector<std::pair<int, int>> den) : nvars(nv), denom(std::move(den)) {
    sort_denom();
  }

  bool is_zero() const { return num.empty(); }
  void add_num(const Exponents& e, const mpz_class& c);
  void sort_denom();

  GenFun operator*(const GenFun& o) const;   // denominators concatenate
  GenFun operator+(const GenFun& o) const;   // requires identical denominators
  bool equals(const GenFun& o) const;        // exact rational-function equality

  /// Substitutes every grading variable by a single t.
  GenFun collapsed() const;

  /// Taylor coefficients c_0..c_order of the single-variable series.
  std::vector<mpz_class> taylor(int order) const;

  /// Numerator polynomial once the denominator degrees are fixed: the
  /// coefficients of M(t) * prod (1 - t^d) over `target_degrees`.
  /// Throws NotPolynomial when the division leaves a remainder.
  std::vector<mpz_class> canonical_numerator(std::vector<int> target_degrees) const;

  /// M / (1 - t_new) with a fresh grading variable appended.
  GenFun append_trivial_factor() const;

  std::string str() const;
};

/// Molien/Burnside formula evaluated exactly:
///   M(G)(final; R; t_1..t_mu) = (1/|G|) sum_g chi(final; g) / prod_i det(1 - t_i M_i(g)),
/// with one grading variable per slice of R and one determinant per
/// conjugacy class. `nvars_total` >= mu lets callers align variables across
/// partial representations; slice i of R uses variable var_base + i.
GenFun molien_direct(const RepSum& R, int final_irrep, int nvars_total = -1, int var_base = 0);

/// Elementary and partial families: one GenFun per final irrep.
std::map<int, GenFun> molien_direct_family(const RepSum& R, int nvars_total = -1, int var_base = 0);

/// Recursive coupling step:
///   M(final; left (+) right) = sum c^final_{alpha,beta} M_left[alpha] * M_right[beta].
/// Both maps must cover all irreps of G (zero GenFuns allowed) over disjoint
/// grading variables of a common variable count.
GenFun couple(const FiniteGroup& G, int final_irrep, const std::map<int, GenFun>& left,
              const std::map<int, GenFun>& right);
std::map<int, GenFun> couple_family(const FiniteGroup& G, const std::map<int, GenFun>& left,
                                    const std::map<int, GenFun>& right);

}  // namespace covforge
