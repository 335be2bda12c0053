#include "covforge/group.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "covforge/linalg.hpp"

namespace covforge {

int FiniteGroup::element_index(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  throw UnknownElement(label);
}

int FiniteGroup::irrep_index(const std::string& label) const {
  for (size_t i = 0; i < irreps.size(); ++i) {
    if (irreps[i].label == label) return static_cast<int>(i);
  }
  throw UnknownIrrep(label);
}

int FiniteGroup::product_multiplicity(int alpha, int beta, int gamma) const {
  const int ni = static_cast<int>(irreps.size());
  if (alpha < 0 || beta < 0 || gamma < 0 || alpha >= ni || beta >= ni || gamma >= ni) {
    throw UnknownIrrep("index out of range");
  }
  FieldScalar sum;
  for (const auto& cls : classes) {
    const int g = cls.front();
    sum += FieldScalar(static_cast<long>(cls.size())) * character(alpha, g) *
           character(beta, g) * character(gamma, g);
  }
  sum = sum * FieldScalar(rat(1, order()));
  if (!sum.is_rational() || sum.a.get_den() != 1 || sum.a < 0) {
    throw GroupDataError("non-integral product multiplicity");
  }
  return static_cast<int>(sum.a.get_num().get_si());
}

namespace {

bool mats_equal(const FMat& A, const FMat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) {
      if (A(i, j) != B(i, j)) return false;
    }
  }
  return true;
}

FMat kron(const FMat& A, const FMat& B) {
  FMat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) {
      for (int k = 0; k < B.rows(); ++k) {
        for (int l = 0; l < B.cols(); ++l) {
          K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
        }
      }
    }
  }
  return K;
}

}  // namespace

const std::vector<CGTensor>& FiniteGroup::cg_tensors(int alpha, int beta, int gamma) const {
  const auto key = std::make_tuple(alpha, beta, gamma);
  auto it = cg_cache_.find(key);
  if (it != cg_cache_.end()) return it->second;

  const int c = product_multiplicity(alpha, beta, gamma);
  if (c == 0) throw ZeroMultiplicity();

  const Irrep& A = irreps[alpha];
  const Irrep& B = irreps[beta];
  const Irrep& C = irreps[gamma];
  const int N = A.dim * B.dim;

  // Transfer operators T_l = ([C]/|G|) sum_g C(g)_{l0} (A(g) (x) B(g)).
  // For any seed v the columns (T_l v)_l form an intertwiner V_C -> V_A (x) V_B.
  std::vector<FMat> T(C.dim, FMat::Zero(N, N));
  for (int g = 0; g < order(); ++g) {
    const FMat K = kron(A.mats[g], B.mats[g]);
    for (int l = 0; l < C.dim; ++l) {
      const FieldScalar w = C.mats[g](l, 0);
      if (w.is_zero()) continue;
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) T[l](i, j) += w * K(i, j);
      }
    }
  }
  const FieldScalar scale = FieldScalar(rat(C.dim, order()));
  for (auto& M : T) M *= scale;

  // Collect c independent projections of the product-space basis vectors.
  std::vector<CGTensor> tensors;
  std::vector<std::vector<FieldScalar>> collected;  // flattened, for independence/orthogonality
  for (int seed = 0; seed < N && static_cast<int>(tensors.size()) < c; ++seed) {
    std::vector<FieldScalar> flat(N * C.dim);
    for (int l = 0; l < C.dim; ++l) {
      for (int i = 0; i < N; ++i) flat[i * C.dim + l] = T[l](i, seed);
    }
    // Orthogonalize against tensors already taken (exact Gram-Schmidt).
    for (const auto& prev : collected) {
      FieldScalar dot, nn;
      for (int i = 0; i < N * C.dim; ++i) {
        dot += flat[i] * prev[i];
        nn += prev[i] * prev[i];
      }
      if (dot.is_zero()) continue;
      const FieldScalar f = dot / nn;
      for (int i = 0; i < N * C.dim; ++i) flat[i] -= f * prev[i];
    }
    bool nonzero = false;
    for (const auto& v : flat) nonzero |= !v.is_zero();
    if (!nonzero) continue;
    collected.push_back(flat);

    CGTensor t;
    t.alpha = alpha;
    t.beta = beta;
    t.gamma = gamma;
    t.mult_index = static_cast<int>(tensors.size());
    t.da = A.dim;
    t.db = B.dim;
    t.dg = C.dim;
    t.coeff = std::move(flat);
    // Deterministic normalization: first nonzero coefficient becomes one.
    FieldScalar lead;
    for (const auto& v : t.coeff) {
      if (!v.is_zero()) {
        lead = v;
        break;
      }
    }
    const FieldScalar inv = lead.inverse();
    for (auto& v : t.coeff) v *= inv;
    tensors.push_back(std::move(t));
  }
  if (static_cast<int>(tensors.size()) != c) {
    throw GroupDataError("could not realize the full coupling multiplicity");
  }

  // Intertwining identity on the group generators.
  for (const auto& t : tensors) {
    for (int g : generators) {
      const FMat K = kron(A.mats[g], B.mats[g]);
      for (int k = 0; k < C.dim; ++k) {
        for (int i = 0; i < N; ++i) {
          FieldScalar lhs;
          for (int j = 0; j < N; ++j) lhs += K(i, j) * t.coeff[j * C.dim + k];
          FieldScalar rhs;
          for (int l = 0; l < C.dim; ++l) rhs += C.mats[g](l, k) * t.coeff[i * C.dim + l];
          if (lhs != rhs) throw GroupDataError("coupling tensor fails equivariance");
        }
      }
    }
  }

  return cg_cache_.emplace(key, std::move(tensors)).first->second;
}

void FiniteGroup::finish_setup() {
  const int n = order();

  identity = -1;
  for (int e = 0; e < n; ++e) {
    bool is_id = true;
    for (int g = 0; g < n && is_id; ++g) is_id = (mult[e][g] == g && mult[g][e] == g);
    if (is_id) {
      identity = e;
      break;
    }
  }
  if (identity < 0) throw GroupDataError("no identity element");

  inverse.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if (mult[g][h] == identity) {
        inverse[g] = h;
        break;
      }
    }
    if (inverse[g] < 0) throw GroupDataError("missing inverse");
  }

  // Conjugacy classes, ordered by (size, smallest member).
  class_of.assign(n, -1);
  classes.clear();
  for (int g = 0; g < n; ++g) {
    if (class_of[g] >= 0) continue;
    std::set<int> orbit;
    for (int h = 0; h < n; ++h) orbit.insert(mult[mult[h][g]][inverse[h]]);
    std::vector<int> cls(orbit.begin(), orbit.end());
    for (int e : cls) class_of[e] = static_cast<int>(classes.size());
    classes.push_back(std::move(cls));
  }
  std::stable_sort(classes.begin(), classes.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.front() < y.front();
  });
  for (size_t c = 0; c < classes.size(); ++c) {
    for (int e : classes[c]) class_of[e] = static_cast<int>(c);
  }

  // Small generating set: greedy growth, then prune redundant members.
  auto closure_of = [&](const std::vector<int>& gens) {
    std::set<int> cl{identity};
    std::vector<int> frontier{identity};
    for (int g : gens) {
      if (cl.insert(g).second) frontier.push_back(g);
    }
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int a : frontier) {
        for (int b : std::vector<int>(cl.begin(), cl.end())) {
          for (int p : {mult[a][b], mult[b][a]}) {
            if (cl.insert(p).second) next.push_back(p);
          }
        }
      }
      frontier = std::move(next);
    }
    return cl;
  };
  generators.clear();
  {
    std::set<int> cl = closure_of({});
    for (int g = 0; g < n && static_cast<int>(cl.size()) < n; ++g) {
      if (cl.count(g)) continue;
      generators.push_back(g);
      cl = closure_of(generators);
    }
  }
  for (size_t i = generators.size(); i-- > 0;) {
    std::vector<int> trimmed = generators;
    trimmed.erase(trimmed.begin() + i);
    if (static_cast<int>(closure_of(trimmed).size()) == n) generators = std::move(trimmed);
  }
}

void FiniteGroup::validate() const {
  const int n = order();
  if (static_cast<int>(mult.size()) != n) throw GroupDataError("bad multiplication table size");
  for (const auto& row : mult) {
    if (static_cast<int>(row.size()) != n) throw GroupDataError("bad multiplication table row");
    for (int v : row) {
      if (v < 0 || v >= n) throw GroupDataError("multiplication table entry out of range");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]]) {
          throw GroupDataError("multiplication table is not associative");
        }
      }
    }
  }

  long dimsq = 0;
  for (const auto& irrep : irreps) {
    if (static_cast<int>(irrep.mats.size()) != n) throw GroupDataError("irrep matrix count");
    dimsq += static_cast<long>(irrep.dim) * irrep.dim;
    for (int g = 0; g < n; ++g) {
      const FMat& M = irrep.mats[g];
      if (M.rows() != irrep.dim || M.cols() != irrep.dim) throw GroupDataError("irrep matrix shape");
      // Real orthogonal: M M^T = 1.
      for (int i = 0; i < irrep.dim; ++i) {
        for (int j = 0; j < irrep.dim; ++j) {
          FieldScalar dot;
          for (int k = 0; k < irrep.dim; ++k) dot += M(i, k) * M(j, k);
          if (dot != FieldScalar(i == j ? 1 : 0)) throw GroupDataError("irrep matrix not orthogonal");
        }
      }
      for (int h = 0; h < n; ++h) {
        if (!mats_equal(irrep.mats[g] * irrep.mats[h], irrep.mats[mult[g][h]])) {
          throw GroupDataError("matrices do not form a representation");
        }
      }
    }
    if (irrep.primary_degrees.empty() ||
        static_cast<int>(irrep.primary_degrees.size()) != irrep.dim) {
      throw GroupDataError("irrep needs one primary degree per dimension");
    }
  }
  if (dimsq != n) throw GroupDataError("sum of squared irrep dimensions != |G|");

  // Character row orthogonality.
  for (size_t p = 0; p < irreps.size(); ++p) {
    for (size_t q = 0; q < irreps.size(); ++q) {
      FieldScalar sum;
      for (const auto& cls : classes) {
        sum += FieldScalar(static_cast<long>(cls.size())) *
               character(static_cast<int>(p), cls.front()) *
               character(static_cast<int>(q), cls.front());
      }
      if (sum != FieldScalar(p == q ? n : 0)) throw GroupDataError("character rows not orthogonal");
    }
  }
  // Characters constant on classes.
  for (size_t p = 0; p < irreps.size(); ++p) {
    for (const auto& cls : classes) {
      for (int e : cls) {
        if (character(static_cast<int>(p), e) != character(static_cast<int>(p), cls.front())) {
          throw GroupDataError("character not a class function");
        }
      }
    }
  }
}

namespace {

FMat mat1(const FieldScalar& v) {
  FMat m(1, 1);
  m(0, 0) = v;
  return m;
}

FiniteGroup build_ci() {
  FiniteGroup G;
  G.name = "Ci";
  G.labels = {"E", "I"};
  G.mult = {{0, 1}, {1, 0}};

  Irrep a1{"A1", 1, {mat1(FieldScalar(1)), mat1(FieldScalar(1))}, {1}};
  Irrep a2{"A2", 1, {mat1(FieldScalar(1)), mat1(FieldScalar(-1))}, {2}};
  G.irreps = {a1, a2};
  G.finish_setup();
  return G;
}

FiniteGroup build_td() {
  FiniteGroup G;
  G.name = "Td";

  // The vector (F2) representation of Td consists of the 24 signed
  // permutation matrices of (x, y, z) with an even number of minus signs.
  // Column j of the matrix holds the image of coordinate j.
  struct Elem {
    std::array<int, 3> perm;  // image axis of coordinate j
    std::array<int, 3> sign;
  };
  std::vector<Elem> elems;
  std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& p : perms) {
    for (int smask = 0; smask < 8; ++smask) {
      std::array<int, 3> s = {smask & 4 ? -1 : 1, smask & 2 ? -1 : 1, smask & 1 ? -1 : 1};
      if (s[0] * s[1] * s[2] != 1) continue;  // even number of minus signs
      elems.push_back({p, s});
    }
  }

  const char* axis = "xyz";
  std::vector<FMat> f2;
  for (const auto& e : elems) {
    FMat M = FMat::Zero(3, 3);
    std::string label;
    for (int j = 0; j < 3; ++j) {
      M(e.perm[j], j) = FieldScalar(e.sign[j]);
      label += (e.sign[j] > 0 ? '+' : '-');
      label += axis[e.perm[j]];
    }
    f2.push_back(M);
    G.labels.push_back(label);
  }

  const int n = static_cast<int>(elems.size());
  auto find_matrix = [&](const FMat& M) {
    for (int k = 0; k < n; ++k) {
      if (mats_equal(f2[k], M)) return k;
    }
    throw GroupDataError("composition left the group");
  };
  G.mult.assign(n, std::vector<int>(n));
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) G.mult[g][h] = find_matrix(f2[g] * f2[h]);
  }

  auto det3 = [](const FMat& M) {
    return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
           M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
           M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
  };

  std::vector<FMat> a1m, a2m, em, f1m;
  // E partners transform like (2z^2 - x^2 - y^2, sqrt3 (x^2 - y^2)); derive
  // the 2x2 matrices from the action on those quadratic forms. Coefficient
  // triples over (x^2, y^2, z^2): q1 = (-1, -1, 2), q2 = sqrt3 (1, -1, 0).
  const FieldScalar s3 = FieldScalar::sqrt3();
  for (int g = 0; g < n; ++g) {
    a1m.push_back(mat1(FieldScalar(1)));
    const FieldScalar det = det3(f2[g]);
    a2m.push_back(mat1(det));
    f1m.push_back(det * f2[g]);

    FMat E(2, 2);
    std::array<std::array<FieldScalar, 3>, 2> q = {
        {{FieldScalar(-1), FieldScalar(-1), FieldScalar(2)}, {s3, -s3, FieldScalar()}}};
    for (int i = 0; i < 2; ++i) {
      // Image of q_i under g: squares only permute, signs drop out.
      std::array<FieldScalar, 3> img;
      for (int ax = 0; ax < 3; ++ax) img[elems[g].perm[ax]] += q[i][ax];
      // Solve img = e1 * q1 + e2 * q2.
      const FieldScalar e1 = img[2] / FieldScalar(2);
      const FieldScalar e2 = (img[0] + e1) / s3;
      if (img[0] != -e1 + s3 * e2 || img[1] != -e1 - s3 * e2 || img[2] != FieldScalar(2) * e1) {
        throw GroupDataError("E block derivation failed");
      }
      E(0, i) = e1;
      E(1, i) = e2;
    }
    em.push_back(E);
  }

  G.irreps = {Irrep{"A1", 1, std::move(a1m), {1}}, Irrep{"A2", 1, std::move(a2m), {2}},
              Irrep{"E", 2, std::move(em), {2, 3}}, Irrep{"F1", 3, std::move(f1m), {2, 4, 6}},
              Irrep{"F2", 3, std::move(f2), {2, 3, 4}}};
  G.finish_setup();
  return G;
}

}  // namespace

const FiniteGroup& FiniteGroup::ci() {
  static const FiniteGroup G = build_ci();
  return G;
}

const FiniteGroup& FiniteGroup::td() {
  static const FiniteGroup G = build_td();
  return G;
}

FMat RepSum::matrix(int elem) const {
  if (elem < 0 || elem >= group->order()) throw UnknownElement(std::to_string(elem));
  FMat M = FMat::Zero(dim(), dim());
  for (const auto& s : slices) {
    const FMat& B = group->irreps[s.irrep].mats[elem];
    for (int i = 0; i < B.rows(); ++i) {
      for (int j = 0; j < B.cols(); ++j) M(s.var_offset + i, s.var_offset + j) = B(i, j);
    }
  }
  return M;
}

bool RepSum::slice_is_trivial(int i) const {
  const Irrep& irrep = group->irreps[slices[i].irrep];
  if (irrep.dim != 1) return false;
  for (const auto& M : irrep.mats) {
    if (M(0, 0) != FieldScalar(1)) return false;
  }
  return true;
}

RepSum RepSum::make(const FiniteGroup& G, const std::vector<std::string>& irrep_labels) {
  RepSum R;
  R.group = &G;
  std::vector<std::string> names;
  const bool ci_style = (G.name == "Ci");
  int offset = 0;
  for (size_t i = 0; i < irrep_labels.size(); ++i) {
    const int irr = G.irrep_index(irrep_labels[i]);
    const int d = G.irreps[irr].dim;
    R.slices.push_back(RepSlice{irr, offset});
    const std::string base =
        ci_style ? "x" + std::to_string(i + 1) : "S" + std::to_string(i + 1);
    if (d == 1) {
      names.push_back(base);
    } else {
      static const char* suff2[] = {"a", "b"};
      static const char* suff3[] = {"x", "y", "z"};
      for (int k = 0; k < d; ++k) {
        names.push_back(base + (d == 2 ? suff2[k] : suff3[k]));
      }
    }
    offset += d;
  }
  R.vars = VarTable(names);
  return R;
}

MultiPoly act(const RepSum& R, int elem, const MultiPoly& p) {
  return substitute_linear(p, R.matrix(elem));
}

}  // namespace covforge
