#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "loophom/backend.hpp"

namespace loophom {

template <class E>
using SparseVec = std::vector<std::pair<std::uint32_t, E>>;  // sorted by index

// Incremental exact row echelonization with a dense scatter workspace.
// Pivot of each stored row is its leftmost coordinate; the set of pivot
// columns is intrinsic to the row space, so the result is deterministic
// regardless of insertion order once back_substitute() has run.
template <class Ops>
class Eliminator {
 public:
  using E = typename Ops::Elem;

  Eliminator(Ops ops, std::uint32_t ncols)
      : ops_(ops), ncols_(ncols), pivot_of_col_(ncols, -1), work_(ncols, ops.zero()) {}

  std::uint32_t ncols() const { return ncols_; }
  std::size_t rank() const { return rows_.size(); }

  // Reduces `row` against the current pivots; if a remainder survives it
  // becomes a new pivot row (normalized to leading 1) and true is returned.
  bool add_row(const SparseVec<E>& row) {
    load(row);
    bool grew = eliminate_workspace();
    return grew;
  }

  // Pivot column created by the most recent add_row, or -1 if it vanished.
  std::int64_t last_pivot() const { return last_pivot_; }

  // Reduce a vector against the pivot rows without inserting; the remainder
  // (supported on non-pivot columns only after full echelonization, or with
  // leading non-pivot coordinate in forward mode) is returned.
  SparseVec<E> reduce(const SparseVec<E>& row) {
    load(row);
    reduce_workspace_only();
    return unload();
  }

  // Turns the forward echelon into the canonical reduced row echelon form.
  void back_substitute() {
    if (canonical_) return;
    // Process pivots right-to-left so each row only needs one pass.
    std::vector<std::uint32_t> cols = pivot_cols();
    for (auto it = cols.rbegin(); it != cols.rend(); ++it) {
      std::uint32_t c = *it;
      int r = pivot_of_col_[c];
      for (int other = 0; other < static_cast<int>(rows_.size()); ++other) {
        if (other == r) continue;
        eliminate_col_from_row(other, c, r);
      }
    }
    canonical_ = true;
  }

  std::vector<std::uint32_t> pivot_cols() const {
    std::vector<std::uint32_t> cols;
    cols.reserve(rows_.size());
    for (std::uint32_t c = 0; c < ncols_; ++c)
      if (pivot_of_col_[c] >= 0) cols.push_back(c);
    return cols;
  }

  bool is_pivot_col(std::uint32_t c) const { return pivot_of_col_[c] >= 0; }

  // Row with leading one at column c (valid only if is_pivot_col(c)).
  const SparseVec<E>& row_for_pivot(std::uint32_t c) const {
    return rows_[pivot_of_col_[c]];
  }

  // Rows sorted by pivot column.
  std::vector<SparseVec<E>> echelon_rows() const {
    std::vector<SparseVec<E>> out;
    out.reserve(rows_.size());
    for (std::uint32_t c = 0; c < ncols_; ++c)
      if (pivot_of_col_[c] >= 0) out.push_back(rows_[pivot_of_col_[c]]);
    return out;
  }

  const Ops& ops() const { return ops_; }

 private:
  void load(const SparseVec<E>& row) {
    touched_.clear();
    heap_ = {};
    for (const auto& [c, v] : row) {
      if (ops_.is_zero(v)) continue;
      if (ops_.is_zero(work_[c])) heap_.push(c);
      work_[c] = ops_.add(work_[c], v);
      touched_.push_back(c);
    }
  }

  // Pops the smallest pending nonzero column of the workspace.
  bool next_lead(std::uint32_t* lead) {
    while (!heap_.empty()) {
      std::uint32_t c = heap_.top();
      heap_.pop();
      if (!heap_.empty() && heap_.top() == c) continue;  // duplicate
      if (ops_.is_zero(work_[c])) continue;
      *lead = c;
      return true;
    }
    return false;
  }

  void apply_pivot(std::uint32_t lead) {
    const SparseVec<E>& prow = rows_[pivot_of_col_[lead]];
    E f = work_[lead];
    for (const auto& [c, v] : prow) {
      if (c == lead) continue;
      if (ops_.is_zero(work_[c])) {
        heap_.push(c);
        touched_.push_back(c);
      }
      ops_.submul(work_[c], f, v);
    }
    work_[lead] = ops_.zero();
  }

  void reduce_workspace_only() {
    std::uint32_t lead;
    std::vector<std::uint32_t> skipped;
    while (next_lead(&lead)) {
      if (pivot_of_col_[lead] >= 0) {
        apply_pivot(lead);
      } else {
        skipped.push_back(lead);
      }
    }
    for (std::uint32_t c : skipped)
      if (!ops_.is_zero(work_[c])) heap_.push(c);
  }

  bool eliminate_workspace() {
    std::uint32_t lead;
    while (next_lead(&lead)) {
      if (pivot_of_col_[lead] >= 0) {
        apply_pivot(lead);
        continue;
      }
      // New pivot: normalize, against canonical form also clear the new
      // column from existing rows lazily (only if already canonicalized).
      E f = ops_.inv(work_[lead]);
      SparseVec<E> stored;
      stored.emplace_back(lead, ops_.one());
      // Collect remaining workspace entries > nothing particular: all
      // pending entries, sorted.
      std::vector<std::uint32_t> rest;
      rest.push_back(lead);
      while (!heap_.empty()) {
        std::uint32_t c = heap_.top();
        heap_.pop();
        if (!ops_.is_zero(work_[c]) && (rest.empty() || rest.back() != c))
          rest.push_back(c);
      }
      for (std::size_t i = 1; i < rest.size(); ++i) {
        std::uint32_t c = rest[i];
        stored.emplace_back(c, ops_.mul(work_[c], f));
      }
      std::sort(stored.begin(), stored.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      clear_workspace();
      pivot_of_col_[lead] = static_cast<int>(rows_.size());
      rows_.push_back(std::move(stored));
      canonical_ = false;
      last_pivot_ = lead;
      return true;
    }
    clear_workspace();
    last_pivot_ = -1;
    return false;
  }

  SparseVec<E> unload() {
    SparseVec<E> out;
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    for (std::uint32_t c : touched_) {
      if (!ops_.is_zero(work_[c])) out.emplace_back(c, work_[c]);
      work_[c] = ops_.zero();
    }
    touched_.clear();
    heap_ = {};
    return out;
  }

  void clear_workspace() {
    for (std::uint32_t c : touched_) work_[c] = ops_.zero();
    touched_.clear();
    heap_ = {};
  }

  void eliminate_col_from_row(int row_idx, std::uint32_t col, int pivot_row) {
    SparseVec<E>& row = rows_[row_idx];
    auto it = std::lower_bound(
        row.begin(), row.end(), col,
        [](const auto& a, std::uint32_t c) { return a.first < c; });
    if (it == row.end() || it->first != col) return;
    E f = it->second;
    const SparseVec<E>& prow = rows_[pivot_row];
    SparseVec<E> merged;
    merged.reserve(row.size() + prow.size());
    auto ra = row.begin();
    auto rb = prow.begin();
    while (ra != row.end() || rb != prow.end()) {
      if (rb == prow.end() || (ra != row.end() && ra->first < rb->first)) {
        merged.push_back(*ra++);
      } else if (ra == row.end() || rb->first < ra->first) {
        E v = ops_.neg(ops_.mul(f, rb->second));
        if (!ops_.is_zero(v)) merged.emplace_back(rb->first, v);
        ++rb;
      } else {
        E v = ra->second;
        ops_.submul(v, f, rb->second);
        if (!ops_.is_zero(v)) merged.emplace_back(ra->first, v);
        ++ra;
        ++rb;
      }
    }
    row = std::move(merged);
  }

  Ops ops_;
  std::uint32_t ncols_;
  std::vector<int> pivot_of_col_;
  std::vector<E> work_;
  std::vector<std::uint32_t> touched_;
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>,
                      std::greater<std::uint32_t>>
      heap_;
  std::vector<SparseVec<E>> rows_;
  bool canonical_ = true;
  std::int64_t last_pivot_ = -1;
};

template <class Ops>
std::size_t sparse_rank(Ops ops, std::uint32_t ncols,
                        const std::vector<SparseVec<typename Ops::Elem>>& rows) {
  Eliminator<Ops> e(ops, ncols);
  for (const auto& r : rows) e.add_row(r);
  return e.rank();
}

}  // namespace loophom
