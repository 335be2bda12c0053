#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "covforge/poly.hpp"

namespace covforge {

// Sparse row over integer column ids, sorted by column.
using SparseVec = std::vector<std::pair<int, FieldScalar>>;

namespace detail {

// r -= f * p, both sorted by column.
inline SparseVec axpy_sub(const SparseVec& r, const FieldScalar& f, const SparseVec& p) {
  SparseVec out;
  out.reserve(r.size() + p.size());
  size_t i = 0, j = 0;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || p[j].first < r[i].first) {
      out.emplace_back(p[j].first, -(f * p[j].second));
      ++j;
    } else {
      FieldScalar v = r[i].second - f * p[j].second;
      if (!v.is_zero()) out.emplace_back(r[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

// Forward-elimination echelon. Pivot rows are normalized to leading
// coefficient one. Optionally tracks each pivot row as a combination of the
// original inserted rows.
class Echelon {
 public:
  explicit Echelon(bool track = false) : track_(track) {}

  // Reduces `row` against the pivots. If a nonzero residual remains it
  // becomes a new pivot and the function returns true.
  bool insert(SparseVec row, int orig_index = -1) {
    SparseVec comb;
    if (track_ && orig_index >= 0) comb.emplace_back(orig_index, FieldScalar(1));
    reduce_inplace(row, comb);
    if (row.empty()) return false;
    normalize_and_store(std::move(row), std::move(comb));
    return true;
  }

  // Reduces `row` to its residual; `comb_out`, when requested, receives the
  // combination of original rows that was subtracted.
  SparseVec residual(SparseVec row, SparseVec* comb_out = nullptr) const {
    SparseVec comb;
    reduce_inplace(row, comb);
    if (comb_out) *comb_out = std::move(comb);
    return row;
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

 private:
  void reduce_inplace(SparseVec& row, SparseVec& comb) const {
    while (!row.empty()) {
      auto it = pivots_.find(row.front().first);
      if (it == pivots_.end()) break;
      const FieldScalar f = row.front().second;
      row = axpy_sub(row, f, it->second.row);
      if (track_) comb = axpy_sub(comb, f, it->second.comb);
      // The leading column cancelled exactly; loop to the next one.
    }
  }

  void normalize_and_store(SparseVec row, SparseVec comb) {
    const FieldScalar inv = row.front().second.inverse();
    for (auto& [c, v] : row) v *= inv;
    for (auto& [c, v] : comb) v *= inv;
    const int col = row.front().first;
    pivots_.emplace(col, PivotRow{std::move(row), std::move(comb)});
  }

  struct PivotRow {
    SparseVec row;
    SparseVec comb;
  };
  bool track_;
  std::map<int, PivotRow> pivots_;
};

}  // namespace detail

struct RankResult {
  int rank = 0;
  std::vector<int> independent;  // indices of the first maximal independent subset
};

/// Exact rank of a list of sparse rows. Rows are first split into
/// column-connected components (graded polynomial inputs decompose into
/// per-multidegree blocks automatically), then eliminated in input order, so
/// the selected subset is the lexicographically-first maximal independent one.
inline RankResult sparse_rank(const std::vector<SparseVec>& rows) {
  int ncols = 0;
  for (const auto& r : rows) {
    if (!r.empty()) ncols = std::max(ncols, r.back().first + 1);
  }
  detail::UnionFind uf(ncols);
  for (const auto& r : rows) {
    for (size_t k = 1; k < r.size(); ++k) uf.unite(r[k].first, r[0].first);
  }
  std::map<int, detail::Echelon> components;
  RankResult res;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    auto [it, ignored] = components.try_emplace(uf.find(rows[i][0].first), false);
    if (it->second.insert(rows[i])) {
      res.rank += 1;
      res.independent.push_back(static_cast<int>(i));
    }
  }
  return res;
}

/// Solves target = sum_i x_i rows[i] exactly; nullopt when target is outside
/// the span. When the rows are linearly independent the coordinates are the
/// unique ones. Works per column-connected component of the basis.
inline std::optional<std::vector<FieldScalar>> sparse_in_span(const std::vector<SparseVec>& rows,
                                                              const SparseVec& target) {
  int ncols = target.empty() ? 0 : target.back().first + 1;
  for (const auto& r : rows) {
    if (!r.empty()) ncols = std::max(ncols, r.back().first + 1);
  }
  detail::UnionFind uf(ncols);
  std::vector<bool> covered(ncols, false);
  for (const auto& r : rows) {
    for (const auto& [c, v] : r) covered[c] = true;
    for (size_t k = 1; k < r.size(); ++k) uf.unite(r[k].first, r[0].first);
  }
  for (const auto& [c, v] : target) {
    if (!covered[c]) return std::nullopt;  // column untouched by the basis
  }

  std::map<int, detail::Echelon> components;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    auto [it, ignored] = components.try_emplace(uf.find(rows[i][0].first), true);
    it->second.insert(rows[i], static_cast<int>(i));
  }
  std::map<int, SparseVec> pieces;
  for (const auto& e : target) pieces[uf.find(e.first)].push_back(e);

  // The tracked combination is what was subtracted from the target, so the
  // span coordinates are its negation.
  std::vector<FieldScalar> coords(rows.size());
  for (const auto& [root, piece] : pieces) {
    SparseVec comb;
    SparseVec res = components.at(root).residual(piece, &comb);
    if (!res.empty()) return std::nullopt;
    for (const auto& [idx, v] : comb) coords[idx] -= v;
  }
  return coords;
}

/// Assigns integer column ids to (layer, exponent) keys; `layer`
/// distinguishes the partner components of stacked covariant tuples. Ids are
/// handed out in first-use order, which is deterministic for deterministic
/// inputs; freeze() re-numbers all known keys in graded-lex order, the
/// documented column order of the coefficient-matrix view.
class ColumnIndexer {
 public:
  int id(int layer, const Exponents& e) {
    auto [it, inserted] = ids_.try_emplace(Key{layer, e}, next_);
    if (inserted) ++next_;
    return it->second;
  }

  void note(int layer, const Exponents& e) { id(layer, e); }
  void note(const MultiPoly& p, int layer = 0) {
    for (const auto& [e, c] : p.terms()) note(layer, e);
  }

  /// Re-assigns ids following (layer, graded-lex) order of the keys.
  void freeze() {
    int k = 0;
    for (auto& [key, id] : ids_) id = k++;
  }

 private:
  struct Key {
    int layer;
    Exponents e;
    bool operator<(const Key& o) const {
      if (layer != o.layer) return layer < o.layer;
      return GrlexLess()(e, o.e);
    }
  };
  std::map<Key, int> ids_;
  int next_ = 0;
};

inline SparseVec to_sparse(const MultiPoly& p, ColumnIndexer& cols, int layer = 0) {
  SparseVec row;
  row.reserve(p.terms().size());
  for (const auto& [e, c] : p.terms()) row.emplace_back(cols.id(layer, e), c);
  std::sort(row.begin(), row.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return row;
}

inline SparseVec to_sparse_stacked(const std::vector<MultiPoly>& partners, ColumnIndexer& cols) {
  SparseVec row;
  for (size_t k = 0; k < partners.size(); ++k) {
    for (const auto& [e, c] : partners[k].terms()) {
      row.emplace_back(cols.id(static_cast<int>(k), e), c);
    }
  }
  std::sort(row.begin(), row.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return row;
}

/// Exact rank of a set of polynomials, with the deterministic
/// first-independent selection described above. Columns are the monomials in
/// graded-lex order.
inline RankResult rank_and_basis(const std::vector<MultiPoly>& polys) {
  ColumnIndexer cols;
  for (const auto& p : polys) cols.note(p);
  cols.freeze();
  std::vector<SparseVec> rows;
  rows.reserve(polys.size());
  for (const auto& p : polys) rows.push_back(to_sparse(p, cols));
  return sparse_rank(rows);
}

/// Exact coordinates of p in the span of `basis`, if any.
inline std::optional<std::vector<FieldScalar>> in_span(const MultiPoly& p,
                                                       const std::vector<MultiPoly>& basis) {
  ColumnIndexer cols;
  for (const auto& q : basis) cols.note(q);
  cols.note(p);
  cols.freeze();
  std::vector<SparseVec> rows;
  rows.reserve(basis.size());
  for (const auto& q : basis) rows.push_back(to_sparse(q, cols));
  return sparse_in_span(rows, to_sparse(p, cols));
}

inline int matrix_rank(const FMat& m) {
  std::vector<SparseVec> rows(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_zero()) rows[i].emplace_back(j, m(i, j));
    }
  }
  return sparse_rank(rows).rank;
}

/// True when the two polynomial lists span the same space.
inline bool same_span(const std::vector<MultiPoly>& a, const std::vector<MultiPoly>& b) {
  const int ra = rank_and_basis(a).rank;
  const int rb = rank_and_basis(b).rank;
  if (ra != rb) return false;
  std::vector<MultiPoly> both = a;
  both.insert(both.end(), b.begin(), b.end());
  return rank_and_basis(both).rank == ra;
}

}  // namespace covforge
