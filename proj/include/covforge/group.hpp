#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "covforge/field.hpp"
#include "covforge/poly.hpp"

namespace covforge {

struct UnknownIrrep : std::invalid_argument {
  explicit UnknownIrrep(const std::string& label)
      : std::invalid_argument("unknown irrep: " + label) {}
};
struct UnknownElement : std::invalid_argument {
  explicit UnknownElement(const std::string& what)
      : std::invalid_argument("unknown group element: " + what) {}
};
struct ZeroMultiplicity : std::invalid_argument {
  ZeroMultiplicity() : std::invalid_argument("target irrep does not occur in the product") {}
};
struct GroupDataError : std::runtime_error {
  explicit GroupDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Irreducible representation: explicit real orthogonal matrices, one per
/// group element, plus the degrees of the primary invariants of the
/// polynomial algebra this irrep generates (the (1 - t^d) factors of its
/// Molien denominator).
struct Irrep {
  std::string label;
  int dim = 0;
  std::vector<FMat> mats;
  std::vector<int> primary_degrees;
};

/// Clebsch-Gordan coupling tensor for (alpha x beta -> gamma), multiplicity
/// slot `mult_index`. Coefficients satisfy the intertwining identity
///   (M_alpha(g) (x) M_beta(g)) C_k = sum_l Gamma(g)_{lk} C_l
/// for every g, and are normalized so the first nonzero coefficient in
/// (a, b, k) scan order equals one.
struct CGTensor {
  int alpha = 0, beta = 0, gamma = 0;
  int mult_index = 0;
  int da = 0, db = 0, dg = 0;
  std::vector<FieldScalar> coeff;  // (a*db + b)*dg + k

  const FieldScalar& at(int a, int b, int k) const { return coeff[(a * db + b) * dg + k]; }
  FieldScalar& at(int a, int b, int k) { return coeff[(a * db + b) * dg + k]; }
};

class FiniteGroup {
 public:
  std::string name;
  std::vector<std::string> labels;      // element labels
  std::vector<std::vector<int>> mult;   // mult[g][h] = index of g*h
  int identity = 0;
  std::vector<int> inverse;
  std::vector<int> class_of;
  std::vector<std::vector<int>> classes;
  std::vector<Irrep> irreps;
  std::vector<int> generators;

  int order() const { return static_cast<int>(labels.size()); }
  int element_index(const std::string& label) const;
  int irrep_index(const std::string& label) const;
  FieldScalar character(int irrep, int elem) const { return irreps[irrep].mats[elem].trace(); }

  /// Multiplicity of gamma inside alpha (x) beta:
  /// (1/|G|) sum_g chi_alpha chi_beta chi_gamma (real characters).
  int product_multiplicity(int alpha, int beta, int gamma) const;

  /// All coupling tensors for the triple; length equals the multiplicity.
  const std::vector<CGTensor>& cg_tensors(int alpha, int beta, int gamma) const;

  /// Machine-checks the group axioms, the representation property, matrix
  /// orthogonality and character orthogonality. Throws GroupDataError.
  void validate() const;

  /// Completes derived data (identity, inverses, classes, generators) from
  /// name/labels/mult/irreps.
  void finish_setup();

  static const FiniteGroup& ci();
  static const FiniteGroup& td();

 private:
  mutable std::map<std::tuple<int, int, int>, std::vector<CGTensor>> cg_cache_;
};

/// Reducible representation as a graded direct sum: one irrep per slice, one
/// grading variable per slice, contiguous variable blocks.
struct RepSlice {
  int irrep = 0;
  int var_offset = 0;
};

class RepSum {
 public:
  const FiniteGroup* group = nullptr;
  VarTable vars;
  std::vector<RepSlice> slices;

  int dim() const { return vars.size(); }
  int slice_dim(int i) const { return group->irreps[slices[i].irrep].dim; }
  /// Block-diagonal matrix of g over the variable table.
  FMat matrix(int elem) const;
  /// Slices whose irrep acts trivially (every matrix is the identity).
  bool slice_is_trivial(int i) const;

  static RepSum make(const FiniteGroup& G, const std::vector<std::string>& irrep_labels);
};

/// Group action on polynomials: x_j -> sum_k M(k, j) x_k, i.e. plain
/// substitution by the representation matrix of g.
MultiPoly act(const RepSum& R, int elem, const MultiPoly& p);

}  // namespace covforge
