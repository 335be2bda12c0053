#include "covforge/integrity.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <memory>
#include <set>

#include "covforge/linalg.hpp"

namespace covforge {

std::vector<int> IntegrityBasis::denominator_degrees() const {
  std::vector<int> out;
  out.reserve(denominators.size());
  for (const auto& f : denominators) out.push_back(f.degree().value());
  return out;
}

const std::vector<CovariantTuple>& IntegrityBasis::numerators_for(int irrep) const {
  static const std::vector<CovariantTuple> empty;
  auto it = numerators.find(irrep);
  return it == numerators.end() ? empty : it->second;
}

namespace {

struct ElemAction {
  int elem;
  Substitutor sub;
};

std::vector<ElemAction> element_actions(const RepSum& R, const std::vector<int>& elems) {
  std::vector<ElemAction> out;
  out.reserve(elems.size());
  for (int g : elems) out.push_back(ElemAction{g, Substitutor(R.vars, R.matrix(g))});
  return out;
}

bool tuple_equivariant(const RepSum& R, const CovariantTuple& t, std::vector<ElemAction>& acts) {
  const Irrep& irrep = R.group->irreps[t.irrep];
  for (auto& a : acts) {
    for (int k = 0; k < irrep.dim; ++k) {
      MultiPoly lhs = a.sub.apply(t.partners[k]);
      MultiPoly rhs(t.partners[k].vars());
      for (int l = 0; l < irrep.dim; ++l) rhs += irrep.mats[a.elem](l, k) * t.partners[l];
      if (lhs != rhs) return false;
    }
  }
  return true;
}

}  // namespace

bool is_equivariant(const RepSum& R, const CovariantTuple& t, const std::vector<int>& elems) {
  auto acts = element_actions(R, elems);
  return tuple_equivariant(R, t, acts);
}

namespace {

// ---------------------------------------------------------------------------
// Elementary integrity bases (the recursion seeds), tabulated per built-in
// irrep over its slice variables.

struct SliceVars {
  const VarTable* vt;
  std::vector<int> v;

  MultiPoly x(int i, uint32_t p = 1) const {
    Exponents e(vt->size(), 0);
    e[v[i]] = p;
    return monomial(*vt, e);
  }
  MultiPoly one() const { return MultiPoly(*vt, FieldScalar(1)); }
};

CovariantTuple tuple_of(int irrep, std::vector<MultiPoly> partners) {
  CovariantTuple t;
  t.irrep = irrep;
  t.partners = std::move(partners);
  t.degree = t.partners.front().degree().value_or(0);
  return t;
}

// Tabulated elementary bases for the tetrahedral irreps; A1/A2 are shared by any
// group whose irrep is the trivial / a one-dimensional sign representation.
void fill_elementary_fixture(const FiniteGroup& G, const std::string& label, const SliceVars& s,
                             std::vector<MultiPoly>* denoms,
                             std::map<int, std::vector<CovariantTuple>>* nums) {
  const auto irr = [&](const char* l) { return G.irrep_index(l); };
  const FieldScalar half = rat(1, 2);
  const FieldScalar is2 = FieldScalar::inv_sqrt2();
  const FieldScalar is3 = FieldScalar::inv_sqrt3();
  const FieldScalar is6 = FieldScalar::inv_sqrt6();
  const FieldScalar s3 = FieldScalar::sqrt3();

  if (label == "A1") {
    denoms->push_back(s.x(0));
    (*nums)[irr("A1")].push_back(tuple_of(irr("A1"), {s.one()}));
    return;
  }
  if (label == "A2") {
    denoms->push_back(s.x(0, 2));
    (*nums)[irr("A1")].push_back(tuple_of(irr("A1"), {s.one()}));
    (*nums)[irr("A2")].push_back(tuple_of(irr("A2"), {s.x(0)}));
    return;
  }
  if (G.name == "Td" && label == "E") {
    const MultiPoly a = s.x(0), b = s.x(1);
    denoms->push_back(is2 * (s.x(0, 2) + s.x(1, 2)));
    denoms->push_back(half * (FieldScalar(-1) * s.x(0, 3) + FieldScalar(3) * (a * s.x(1, 2))));
    (*nums)[irr("A1")].push_back(tuple_of(irr("A1"), {s.one()}));
    (*nums)[irr("A2")].push_back(tuple_of(
        irr("A2"), {half * (FieldScalar(-3) * (s.x(0, 2) * b) + s.x(1, 3))}));
    (*nums)[irr("E")].push_back(tuple_of(irr("E"), {a, b}));
    (*nums)[irr("E")].push_back(tuple_of(
        irr("E"), {is2 * (s.x(1, 2) - s.x(0, 2)), is2 * (FieldScalar(2) * (a * b))}));
    return;
  }
  if (G.name == "Td" && (label == "F1" || label == "F2")) {
    const MultiPoly a = s.x(0), b = s.x(1), g = s.x(2);
    const MultiPoly abg = a * b * g;
    const auto psum = [&](uint32_t p) { return s.x(0, p) + s.x(1, p) + s.x(2, p); };
    // (a^p - b^p), cycled.
    const auto d_ab = [&](uint32_t p) { return s.x(0, p) - s.x(1, p); };
    const auto d_bg = [&](uint32_t p) { return s.x(1, p) - s.x(2, p); };
    const auto d_ga = [&](uint32_t p) { return s.x(2, p) - s.x(0, p); };

    if (label == "F2") {
      denoms->push_back(is3 * psum(2));
      denoms->push_back(abg);
      denoms->push_back(is3 * psum(4));
      (*nums)[irr("A1")].push_back(tuple_of(irr("A1"), {s.one()}));
      (*nums)[irr("A2")].push_back(
          tuple_of(irr("A2"), {is6 * (d_ab(2) * d_bg(2) * d_ga(2))}));
      for (uint32_t p : {2u, 4u}) {
        (*nums)[irr("E")].push_back(tuple_of(
            irr("E"), {is6 * (s.x(0, p) + s.x(1, p) - FieldScalar(2) * s.x(2, p)),
                       is6 * (s3 * (s.x(1, p) - s.x(0, p)))}));
      }
      (*nums)[irr("F1")].push_back(tuple_of(
          irr("F1"), {is2 * (d_bg(2) * a), is2 * (d_ga(2) * b), is2 * (d_ab(2) * g)}));
      (*nums)[irr("F1")].push_back(tuple_of(
          irr("F1"),
          {is2 * (d_bg(2) * (b * g)), is2 * (d_ga(2) * (g * a)), is2 * (d_ab(2) * (a * b))}));
      (*nums)[irr("F1")].push_back(tuple_of(
          irr("F1"),
          {is2 * (d_bg(2) * s.x(0, 3)), is2 * (d_ga(2) * s.x(1, 3)), is2 * (d_ab(2) * s.x(2, 3))}));
      (*nums)[irr("F2")].push_back(tuple_of(irr("F2"), {a, b, g}));
      (*nums)[irr("F2")].push_back(tuple_of(irr("F2"), {b * g, g * a, a * b}));
      (*nums)[irr("F2")].push_back(tuple_of(irr("F2"), {s.x(0, 3), s.x(1, 3), s.x(2, 3)}));
      return;
    }

    // F1 initial irrep.
    denoms->push_back(is3 * psum(2));
    denoms->push_back(is3 * psum(4));
    denoms->push_back(is3 * psum(6));
    (*nums)[irr("A1")].push_back(tuple_of(irr("A1"), {s.one()}));
    (*nums)[irr("A1")].push_back(
        tuple_of(irr("A1"), {is6 * (abg * (d_ab(2) * d_bg(2) * d_ga(2)))}));
    (*nums)[irr("A2")].push_back(tuple_of(irr("A2"), {abg}));
    (*nums)[irr("A2")].push_back(
        tuple_of(irr("A2"), {is6 * (d_ab(2) * d_bg(2) * d_ga(2))}));
    for (uint32_t p : {2u, 4u}) {
      (*nums)[irr("E")].push_back(tuple_of(
          irr("E"), {is6 * (s.x(0, p) + s.x(1, p) - FieldScalar(2) * s.x(2, p)),
                     is6 * (s3 * (s.x(1, p) - s.x(0, p)))}));
    }
    for (uint32_t p : {2u, 4u}) {
      (*nums)[irr("E")].push_back(tuple_of(
          irr("E"), {is6 * (abg * (s3 * d_ab(p))),
                     is6 * (abg * (s.x(0, p) + s.x(1, p) - FieldScalar(2) * s.x(2, p)))}));
    }
    (*nums)[irr("F1")].push_back(tuple_of(irr("F1"), {a, b, g}));
    (*nums)[irr("F1")].push_back(tuple_of(irr("F1"), {s.x(0, 3), s.x(1, 3), s.x(2, 3)}));
    (*nums)[irr("F1")].push_back(tuple_of(
        irr("F1"),
        {is2 * (d_bg(2) * (b * g)), is2 * (d_ga(2) * (g * a)), is2 * (d_ab(2) * (a * b))}));
    (*nums)[irr("F1")].push_back(tuple_of(irr("F1"), {s.x(0, 5), s.x(1, 5), s.x(2, 5)}));
    (*nums)[irr("F1")].push_back(tuple_of(
        irr("F1"),
        {is2 * (d_bg(4) * (b * g)), is2 * (d_ga(4) * (g * a)), is2 * (d_ab(4) * (a * b))}));
    (*nums)[irr("F1")].push_back(tuple_of(
        irr("F1"),
        {is2 * (abg * (d_bg(4) * a)), is2 * (abg * (d_ga(4) * b)), is2 * (abg * (d_ab(4) * g))}));
    (*nums)[irr("F2")].push_back(tuple_of(irr("F2"), {b * g, g * a, a * b}));
    (*nums)[irr("F2")].push_back(tuple_of(
        irr("F2"), {is2 * (d_bg(2) * a), is2 * (d_ga(2) * b), is2 * (d_ab(2) * g)}));
    (*nums)[irr("F2")].push_back(tuple_of(irr("F2"), {abg * a, abg * b, abg * g}));
    (*nums)[irr("F2")].push_back(tuple_of(
        irr("F2"), {is2 * (d_bg(4) * a), is2 * (d_ga(4) * b), is2 * (d_ab(4) * g)}));
    (*nums)[irr("F2")].push_back(
        tuple_of(irr("F2"), {abg * s.x(0, 3), abg * s.x(1, 3), abg * s.x(2, 3)}));
    (*nums)[irr("F2")].push_back(tuple_of(
        irr("F2"),
        {is2 * (abg * (d_bg(2) * (b * g))), is2 * (abg * (d_ga(2) * (a * g))),
         is2 * (abg * (d_ab(2) * (a * b)))}));
    return;
  }
  throw UnknownPair("no built-in elementary integrity basis for " + G.name + "/" + label);
}

std::map<int, int> degree_targets(const GenFun& gf) {
  std::map<int, int> t;
  for (const auto& [e, c] : gf.collapsed().num) {
    if (c < 0) throw CountMismatch("negative numerator coefficient");
    t[static_cast<int>(e[0])] += static_cast<int>(c.get_si());
  }
  return t;
}

// Enumerates denominator power products f_1^{j_1}...f_D^{j_D} with total
// degree == budget (exact) or <= budget, in ascending lexicographic order of
// the exponent vector, carrying the running product.
void for_each_denom_product(const VarTable& vt, const std::vector<MultiPoly>& denoms,
                            const std::vector<int>& degrees, int budget, bool exact,
                            const std::function<void(const std::vector<uint32_t>&,
                                                     const MultiPoly&)>& fn) {
  std::vector<uint32_t> j(denoms.size(), 0);
  std::function<void(size_t, int, const MultiPoly&)> rec = [&](size_t i, int left,
                                                               const MultiPoly& prod) {
    if (i == denoms.size()) {
      if (!exact || left == 0) fn(j, prod);
      return;
    }
    MultiPoly cur = prod;
    for (int k = 0; k * degrees[i] <= left; ++k) {
      j[i] = static_cast<uint32_t>(k);
      if (k > 0) cur = cur * denoms[i];
      rec(i + 1, left - k * degrees[i], cur);
    }
    j[i] = 0;
  };
  rec(0, budget, MultiPoly(vt, FieldScalar(1)));
}

// Test hook: COVFORGE_FAULT_CG=<n> zeroes the leading coefficient of the
// n-th coupling tensor used, so downstream verification must trip.
int fault_cg_target() {
  static const int target = [] {
    const char* env = std::getenv("COVFORGE_FAULT_CG");
    return env ? std::atoi(env) : -1;
  }();
  return target;
}

}  // namespace

IntegrityBasis elementary_family(const RepSum& R, int slice) {
  const FiniteGroup& G = *R.group;
  const Irrep& irrep = G.irreps[R.slices[slice].irrep];

  SliceVars s{&R.vars, {}};
  for (int k = 0; k < irrep.dim; ++k) s.v.push_back(R.slices[slice].var_offset + k);

  IntegrityBasis fam;
  fam.group = &G;
  fam.rep = R;
  for (size_t f = 0; f < G.irreps.size(); ++f) fam.numerators[static_cast<int>(f)];
  fill_elementary_fixture(G, irrep.label, s, &fam.denominators, &fam.numerators);

  RepSum single;
  single.group = &G;
  single.slices = {RepSlice{R.slices[slice].irrep, 0}};
  fam.genfuns = molien_direct_family(single, static_cast<int>(R.slices.size()), slice);

  // Guard the tabulated data: denominator degrees match the irrep's primary
  // degrees, denominators are invariant, numerator tuples are equivariant and
  // their degree profile matches the elementary generating function.
  std::vector<int> ddeg = fam.denominator_degrees();
  std::vector<int> want = irrep.primary_degrees;
  std::sort(ddeg.begin(), ddeg.end());
  std::sort(want.begin(), want.end());
  if (ddeg != want) throw CountMismatch("elementary denominator degrees mismatch");
  for (const auto& f : fam.denominators) {
    for (int g : G.generators) {
      if (act(R, g, f) != f) throw NotCovariant("elementary denominator is not invariant");
    }
  }
  for (const auto& [f, tuples] : fam.numerators) {
    std::map<int, int> targets = degree_targets(fam.genfuns.at(f));
    for (const auto& t : tuples) {
      if (!is_equivariant(R, t, G.generators)) {
        throw NotCovariant("elementary numerator fails equivariance");
      }
      if (--targets[t.degree] == 0) targets.erase(t.degree);
    }
    if (!targets.empty()) throw CountMismatch("elementary numerator degrees mismatch");
  }
  return fam;
}

IntegrityBasis elementary_basis(const FiniteGroup& G, const std::string& initial_irrep) {
  return build_family(G, {initial_irrep});
}

std::vector<CovariantTuple> couple_numerators(const IntegrityBasis& left,
                                              const IntegrityBasis& right, int gamma) {
  const FiniteGroup& G = *left.group;
  const int ni = static_cast<int>(G.irreps.size());
  std::vector<CovariantTuple> out;
  static int tensor_use = 0;  // process-wide position for the fault hook
  for (int a = 0; a < ni; ++a) {
    const auto& la = left.numerators_for(a);
    if (la.empty()) continue;
    for (int b = 0; b < ni; ++b) {
      const auto& rb = right.numerators_for(b);
      if (rb.empty()) continue;
      if (G.product_multiplicity(a, b, gamma) == 0) continue;
      std::vector<CGTensor> tensors = G.cg_tensors(a, b, gamma);
      for (auto& t : tensors) {
        if (tensor_use++ == fault_cg_target()) {
          for (auto& v : t.coeff) {
            if (!v.is_zero()) {
              v = FieldScalar();
              break;
            }
          }
        }
      }
      const int dim_g = G.irreps[gamma].dim;
      for (const auto& lt : la) {
        for (const auto& rt : rb) {
          for (const auto& t : tensors) {
            CovariantTuple c;
            c.irrep = gamma;
            c.degree = lt.degree + rt.degree;
            c.partners.assign(dim_g, MultiPoly(left.rep.vars));
            for (int p = 0; p < t.da; ++p) {
              for (int q = 0; q < t.db; ++q) {
                MultiPoly prod;
                bool have = false;
                for (int k = 0; k < dim_g; ++k) {
                  const FieldScalar& w = t.at(p, q, k);
                  if (w.is_zero()) continue;
                  if (!have) {
                    prod = lt.partners[p] * rt.partners[q];
                    have = true;
                  }
                  c.partners[k] += w * prod;
                }
              }
            }
            out.push_back(std::move(c));
          }
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CovariantTuple& x, const CovariantTuple& y) { return x.degree < y.degree; });
  return out;
}

std::vector<CovariantTuple> reduce_candidates(const RepSum& rep,
                                              std::vector<CovariantTuple> candidates,
                                              const std::vector<MultiPoly>& denominators,
                                              const std::vector<CovariantTuple>& accepted_lower,
                                              const std::map<int, int>& target_counts,
                                              const ReduceOptions& opts) {
  const FiniteGroup& G = *rep.group;
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CovariantTuple& x, const CovariantTuple& y) { return x.degree < y.degree; });

  std::vector<int> ddegrees;
  for (const auto& f : denominators) ddegrees.push_back(f.degree().value());

  std::map<int, std::vector<CovariantTuple>> by_degree;
  for (auto& c : candidates) by_degree[c.degree].push_back(std::move(c));
  std::set<int> degrees;
  for (const auto& [d, v] : by_degree) degrees.insert(d);
  for (const auto& [d, n] : target_counts) {
    if (n > 0) degrees.insert(d);
  }

  std::vector<ElemAction> gen_actions =
      opts.check_equivariance ? element_actions(rep, G.generators) : std::vector<ElemAction>{};
  std::vector<CovariantTuple> accepted;
  for (int d : degrees) {
    auto it = by_degree.find(d);
    std::vector<CovariantTuple> cands = it == by_degree.end() ? std::vector<CovariantTuple>{}
                                                              : std::move(it->second);
    const auto tit = target_counts.find(d);
    const int target = tit == target_counts.end() ? 0 : tit->second;

    std::vector<CovariantTuple> taken;
    if (!opts.force_membership && static_cast<int>(cands.size()) == target) {
      taken = std::move(cands);
    } else {
      // Module slice at degree d generated by denominator products times the
      // accepted numerators, as stacked partner vectors.
      ColumnIndexer cols;
      detail::Echelon ech;
      auto feed = [&](const CovariantTuple& g) {
        if (g.degree > d) return;
        for_each_denom_product(rep.vars, denominators, ddegrees, d - g.degree, true,
                               [&](const std::vector<uint32_t>&, const MultiPoly& prod) {
                                 std::vector<MultiPoly> stacked;
                                 stacked.reserve(g.partners.size());
                                 for (const auto& p : g.partners) stacked.push_back(prod * p);
                                 ech.insert(to_sparse_stacked(stacked, cols));
                               });
      };
      for (const auto& g : accepted_lower) feed(g);
      for (const auto& g : accepted) feed(g);
      for (auto& c : cands) {
        if (ech.insert(to_sparse_stacked(c.partners, cols))) {
          taken.push_back(std::move(c));
        }
      }
    }
    if (static_cast<int>(taken.size()) != target) {
      throw CountMismatch("degree " + std::to_string(d) + ": kept " +
                          std::to_string(taken.size()) + " numerators, generating function wants " +
                          std::to_string(target));
    }
    for (const auto& t : taken) {
      bool nonzero = false;
      for (const auto& p : t.partners) nonzero |= !p.is_zero();
      if (!nonzero) {
        throw CountMismatch("zero numerator tuple at degree " + std::to_string(d));
      }
    }
    if (opts.check_equivariance) {
      for (const auto& t : taken) {
        if (!tuple_equivariant(rep, t, gen_actions)) {
          throw NotCovariant("accepted numerator fails equivariance at degree " +
                             std::to_string(d));
        }
      }
    }
    for (auto& t : taken) accepted.push_back(std::move(t));
  }
  return accepted;
}

IntegrityBasis build_family(const FiniteGroup& G, const std::vector<std::string>& initial) {
  if (initial.empty()) throw std::invalid_argument("empty initial representation");
  RepSum R = RepSum::make(G, initial);
  const int mu = static_cast<int>(R.slices.size());

  IntegrityBasis acc = elementary_family(R, mu - 1);
  for (int i = mu - 2; i >= 0; --i) {
    IntegrityBasis left = elementary_family(R, i);
    IntegrityBasis next;
    next.group = &G;
    next.rep = R;
    next.denominators = left.denominators;
    next.denominators.insert(next.denominators.end(), acc.denominators.begin(),
                             acc.denominators.end());
    next.genfuns = couple_family(G, left.genfuns, acc.genfuns);
    for (size_t f = 0; f < G.irreps.size(); ++f) {
      const int fi = static_cast<int>(f);
      std::vector<CovariantTuple> cands = couple_numerators(left, acc, fi);
      next.numerators[fi] = reduce_candidates(R, std::move(cands), next.denominators, {},
                                              degree_targets(next.genfuns.at(fi)));
    }
    acc = std::move(next);
  }

  // Conventional denominator order: by degree, slices left to right within a
  // degree (f1 = S1, then the degree-2 invariants, and so on). Each
  // denominator lives in a single slice, so its first used variable
  // identifies the slice.
  const auto lead_var = [](const MultiPoly& p) {
    for (int i = 0; i < p.vars().size(); ++i) {
      if (p.terms().begin()->first[i] > 0) return i;
    }
    return 0;
  };
  std::stable_sort(acc.denominators.begin(), acc.denominators.end(),
                   [&](const MultiPoly& x, const MultiPoly& y) {
                     if (x.degree().value() != y.degree().value()) {
                       return x.degree().value() < y.degree().value();
                     }
                     return lead_var(x) < lead_var(y);
                   });
  return acc;
}

IntegrityBasis build_full_basis(const FiniteGroup& G, const std::vector<std::string>& initial,
                                const std::string& final_irrep) {
  IntegrityBasis fam = build_family(G, initial);
  const int f = G.irrep_index(final_irrep);
  IntegrityBasis out;
  out.group = fam.group;
  out.rep = fam.rep;
  out.denominators = fam.denominators;
  out.numerators[f] = fam.numerators_for(f);
  out.genfuns.emplace(f, fam.genfuns.at(f));
  return out;
}

std::vector<HironakaTerm> enumerate_hironaka(const IntegrityBasis& B, int gamma, int partner,
                                             int d_max) {
  if (d_max < 0) throw std::invalid_argument("negative degree bound");
  const auto& nums = B.numerators_for(gamma);
  const std::vector<int> ddeg = B.denominator_degrees();
  std::vector<HironakaTerm> terms;
  for (size_t k = 0; k < nums.size(); ++k) {
    const CovariantTuple& t = nums[k];
    if (partner < 0 || partner >= static_cast<int>(t.partners.size())) {
      throw std::invalid_argument("partner index out of range");
    }
    if (t.degree > d_max) continue;
    for_each_denom_product(B.rep.vars, B.denominators, ddeg, d_max - t.degree, false,
                           [&](const std::vector<uint32_t>& j, const MultiPoly& prod) {
                             HironakaTerm h;
                             h.denom_exponents = j;
                             h.numerator_index = static_cast<int>(k);
                             int deg = t.degree;
                             for (size_t i = 0; i < j.size(); ++i) deg += j[i] * ddeg[i];
                             h.degree = deg;
                             h.value = prod * t.partners[partner];
                             terms.push_back(std::move(h));
                           });
  }
  std::sort(terms.begin(), terms.end(), [](const HironakaTerm& x, const HironakaTerm& y) {
    if (x.degree != y.degree) return x.degree < y.degree;
    if (x.numerator_index != y.numerator_index) return x.numerator_index < y.numerator_index;
    return x.denom_exponents < y.denom_exponents;
  });
  return terms;
}

MultiPoly project_to_type(const RepSum& R, int gamma, int partner, const MultiPoly& p) {
  const FiniteGroup& G = *R.group;
  MultiPoly acc(p.vars());
  for (int g = 0; g < G.order(); ++g) {
    const FieldScalar w = G.irreps[gamma].mats[g](partner, partner);
    if (w.is_zero()) continue;
    acc += w * act(R, g, p);
  }
  return FieldScalar(rat(G.irreps[gamma].dim, G.order())) * acc;
}

std::map<HironakaKey, FieldScalar> hironaka_decompose(const MultiPoly& p, const IntegrityBasis& B,
                                                      int gamma, int partner) {
  std::map<HironakaKey, FieldScalar> out;
  if (p.is_zero()) return out;
  if (project_to_type(B.rep, gamma, partner, p) != p) {
    throw NotCovariant("polynomial is not covariant of the requested symmetry type");
  }
  // Split into graded components.
  std::map<int, MultiPoly> graded;
  for (const auto& [e, c] : p.terms()) {
    auto [it, inserted] = graded.try_emplace(static_cast<int>(total_degree(e)), p.vars());
    it->second.add_term(e, c);
  }
  const int dmax = graded.rbegin()->first;
  std::vector<HironakaTerm> terms = enumerate_hironaka(B, gamma, partner, dmax);
  for (const auto& [d, comp] : graded) {
    std::vector<MultiPoly> values;
    std::vector<const HironakaTerm*> slice;
    for (const auto& t : terms) {
      if (t.degree == d) {
        slice.push_back(&t);
        values.push_back(t.value);
      }
    }
    auto coords = in_span(comp, values);
    if (!coords) {
      throw CountMismatch("covariant escapes the module slice at degree " + std::to_string(d));
    }
    for (size_t i = 0; i < slice.size(); ++i) {
      if ((*coords)[i].is_zero()) continue;
      out[HironakaKey{slice[i]->denom_exponents, slice[i]->numerator_index}] = (*coords)[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Projection oracle.

struct OracleImpl {
  std::vector<std::pair<FieldScalar, std::unique_ptr<Substitutor>>> ops;  // weight, action
  FieldScalar scale;

  MultiPoly project(const MultiPoly& p) const {
    MultiPoly acc(p.vars());
    for (const auto& [w, sub] : ops) acc += w * sub->apply(p);
    return scale * acc;
  }
};

ProjectionOracle::ProjectionOracle(const RepSum& R, int gamma, int partner)
    : rep_(R), gamma_(gamma), partner_(partner) {
  for (size_t i = 0; i < R.slices.size(); ++i) {
    trivial_slice_.push_back(R.slice_is_trivial(static_cast<int>(i)));
  }
  const FiniteGroup& G = *R.group;
  impl_ = std::make_shared<OracleImpl>();
  impl_->scale = FieldScalar(rat(G.irreps[gamma].dim, G.order()));
  for (int g = 0; g < G.order(); ++g) {
    const FieldScalar w = G.irreps[gamma].mats[g](partner, partner);
    if (w.is_zero()) continue;
    impl_->ops.emplace_back(w, std::make_unique<Substitutor>(R.vars, R.matrix(g)));
  }
}

std::vector<std::vector<int>> ProjectionOracle::blocks_of_degree(int degree) const {
  std::vector<std::vector<int>> blocks;
  std::vector<int> cur(rep_.slices.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t i, int left) {
    if (i + 1 == cur.size()) {
      cur[i] = left;
      blocks.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[i] = k;
      rec(i + 1, left - k);
    }
  };
  if (cur.empty()) return blocks;
  rec(0, degree);
  return blocks;
}

namespace {

// Monomial exponent lists of one multidegree block.
std::vector<Exponents> block_monomials(const RepSum& R, const std::vector<int>& block) {
  std::vector<Exponents> monos = {Exponents(R.vars.size(), 0)};
  for (size_t i = 0; i < R.slices.size(); ++i) {
    const int dim = R.slice_dim(static_cast<int>(i));
    const int off = R.slices[i].var_offset;
    std::vector<Exponents> slice_part = exponent_basis(dim, block[i]);
    std::vector<Exponents> next;
    next.reserve(monos.size() * slice_part.size());
    for (const auto& m : monos) {
      for (const auto& sp : slice_part) {
        Exponents e = m;
        for (int k = 0; k < dim; ++k) e[off + k] = sp[k];
        next.push_back(std::move(e));
      }
    }
    monos = std::move(next);
  }
  return monos;
}

}  // namespace

int ProjectionOracle::block_rank(const std::vector<int>& block) {
  std::vector<int> key = block;
  for (size_t i = 0; i < key.size(); ++i) {
    if (trivial_slice_[i]) key[i] = 0;  // invariant factors drop out
  }
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  Rational trace(0);
  bool have_witness = false;
  MultiPoly witness;
  for (const auto& e : block_monomials(rep_, key)) {
    MultiPoly pm = impl_->project(monomial(rep_.vars, e));
    const FieldScalar diag = pm.coeff(e);
    if (!diag.is_rational()) throw std::logic_error("projector diagonal is irrational");
    trace += diag.a;
    if (!have_witness && !pm.is_zero()) {
      witness = std::move(pm);
      have_witness = true;
    }
  }
  if (trace.get_den() != 1 || trace < 0) {
    throw std::logic_error("projector trace is not a non-negative integer");
  }
  // Idempotence spot check: P(P m) == P m for one witness per block.
  if (have_witness && impl_->project(witness) != witness) {
    throw std::logic_error("projector failed idempotence");
  }
  const int rank = static_cast<int>(trace.get_num().get_si());
  cache_.emplace(std::move(key), rank);
  return rank;
}

std::vector<MultiPoly> ProjectionOracle::block_rows(const std::vector<int>& block) {
  std::vector<MultiPoly> rows;
  for (const auto& e : block_monomials(rep_, block)) {
    MultiPoly pm = impl_->project(monomial(rep_.vars, e));
    if (!pm.is_zero()) rows.push_back(std::move(pm));
  }
  return rows;
}

int ProjectionOracle::dimension(int degree) {
  if (degree < 0) throw std::invalid_argument("negative degree");
  int total = 0;
  for (const auto& block : blocks_of_degree(degree)) total += block_rank(block);
  return total;
}

std::vector<MultiPoly> ProjectionOracle::span(int degree) {
  std::vector<MultiPoly> rows;
  for (const auto& block : blocks_of_degree(degree)) {
    for (auto& r : block_rows(block)) rows.push_back(std::move(r));
  }
  return rows;
}

int oracle_dimension(const RepSum& R, int gamma, int partner, int degree) {
  ProjectionOracle oracle(R, gamma, partner);
  return oracle.dimension(degree);
}

}  // namespace covforge
