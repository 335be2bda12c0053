#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "covforge/genfun.hpp"
#include "covforge/group.hpp"
#include "covforge/poly.hpp"

namespace covforge {

struct CountMismatch : std::runtime_error {
  explicit CountMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct NotCovariant : std::runtime_error {
  explicit NotCovariant(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownPair : std::invalid_argument {
  explicit UnknownPair(const std::string& what) : std::invalid_argument(what) {}
};

/// Covariant tuple: [Gamma] homogeneous partner polynomials of one degree
/// that transform by the Gamma irrep matrices.
struct CovariantTuple {
  int irrep = 0;
  int degree = 0;
  std::vector<MultiPoly> partners;
};

/// Integrity basis family for one graded representation: the shared
/// denominator (primary) invariants plus, for every final irrep, the graded
/// list of numerator (secondary) covariant tuples. Exact generating
/// functions are carried alongside, graded with one variable per slice.
struct IntegrityBasis {
  const FiniteGroup* group = nullptr;
  RepSum rep;
  std::vector<MultiPoly> denominators;  // sorted by (degree, slice)
  std::map<int, std::vector<CovariantTuple>> numerators;
  std::map<int, GenFun> genfuns;

  std::vector<int> denominator_degrees() const;
  const std::vector<CovariantTuple>& numerators_for(int irrep) const;
};

/// Whether a tuple satisfies the exact partner transformation rule under the
/// given elements (typically the group generators).
bool is_equivariant(const RepSum& R, const CovariantTuple& t, const std::vector<int>& elems);

/// Elementary integrity basis of one built-in irrep slice (the recursion
/// seeds). `slice` selects which slice of `R` carries the irrep; polynomials
/// are produced over the full variable table of `R`. Throws UnknownPair for
/// irreps without built-in data.
IntegrityBasis elementary_family(const RepSum& R, int slice);

/// Elementary basis of a single irrep as a standalone representation.
IntegrityBasis elementary_basis(const FiniteGroup& G, const std::string& initial_irrep);

/// All Clebsch-Gordan couplings of left x right numerator tuples into the
/// target irrep, ordered by (degree; alpha, beta irrep order; left index;
/// right index; multiplicity slot).
std::vector<CovariantTuple> couple_numerators(const IntegrityBasis& left,
                                              const IntegrityBasis& right, int gamma);

struct ReduceOptions {
  bool check_equivariance = true;
  /// Run module-membership elimination even when the per-degree candidate
  /// count already equals the target.
  bool force_membership = false;
};

/// Keeps, degree by degree, a maximal candidate subset that is independent
/// modulo the submodule generated by denominator products times the already
/// accepted numerators. Throws CountMismatch when the per-degree targets
/// cannot be met exactly.
std::vector<CovariantTuple> reduce_candidates(const RepSum& rep,
                                              std::vector<CovariantTuple> candidates,
                                              const std::vector<MultiPoly>& denominators,
                                              const std::vector<CovariantTuple>& accepted_lower,
                                              const std::map<int, int>& target_counts,
                                              const ReduceOptions& opts = {});

/// Full recursive construction: slices are coupled right to left (the last
/// two first), numerators built via Clebsch-Gordan coupling, counts checked
/// against the coupled generating functions at every step.
IntegrityBasis build_family(const FiniteGroup& G, const std::vector<std::string>& initial);

/// Convenience wrapper: family restricted to one final irrep.
IntegrityBasis build_full_basis(const FiniteGroup& G, const std::vector<std::string>& initial,
                                const std::string& final_irrep);

/// One product f_1^{j_1}...f_D^{j_D} g_k of the Hironaka decomposition.
struct HironakaTerm {
  std::vector<uint32_t> denom_exponents;
  int numerator_index = 0;  // into the degree-sorted numerator list
  int degree = 0;
  MultiPoly value;
};

/// All Hironaka terms of total degree <= d_max for symmetry type
/// (gamma, partner), sorted by (degree, numerator index, exponent vector).
std::vector<HironakaTerm> enumerate_hironaka(const IntegrityBasis& B, int gamma, int partner,
                                             int d_max);

struct HironakaKey {
  std::vector<uint32_t> denom_exponents;
  int numerator_index = 0;
  bool operator<(const HironakaKey& o) const {
    if (numerator_index != o.numerator_index) return numerator_index < o.numerator_index;
    return denom_exponents < o.denom_exponents;
  }
  bool operator==(const HironakaKey& o) const {
    return numerator_index == o.numerator_index && denom_exponents == o.denom_exponents;
  }
};

/// Unique free-module decomposition of a (gamma, partner)-covariant
/// polynomial over the basis. Throws NotCovariant when the projector check
/// fails.
std::map<HironakaKey, FieldScalar> hironaka_decompose(const MultiPoly& p, const IntegrityBasis& B,
                                                      int gamma, int partner);

/// Projection of p onto symmetry type (gamma, partner):
///   P p = ([Gamma]/|G|) sum_g Gamma(g)_{ii} (g . p).
MultiPoly project_to_type(const RepSum& R, int gamma, int partner, const MultiPoly& p);

/// Brute-force projection oracle. Applies the transfer projector to every
/// monomial of a degree and reports the dimension of the image. Monomials
/// split into multidegree blocks (one grading per slice) that the projector
/// preserves; within a block the image dimension is obtained as the exact
/// trace of the idempotent block projector, which is spot-checked for
/// idempotence. Results are cached per (gamma, partner, block).
struct OracleImpl;

class ProjectionOracle {
 public:
  ProjectionOracle(const RepSum& R, int gamma, int partner);

  int dimension(int degree);
  /// Nonzero projected monomial images at a degree (the covariant space
  /// slice, with repetitions).
  std::vector<MultiPoly> span(int degree);

 private:
  int block_rank(const std::vector<int>& block);
  std::vector<MultiPoly> block_rows(const std::vector<int>& block);
  std::vector<std::vector<int>> blocks_of_degree(int degree) const;

  const RepSum& rep_;
  int gamma_;
  int partner_;
  std::vector<bool> trivial_slice_;
  std::map<std::vector<int>, int> cache_;
  std::shared_ptr<OracleImpl> impl_;
};

int oracle_dimension(const RepSum& R, int gamma, int partner, int degree);

}  // namespace covforge
