#include "loophom/matrix.hpp"

#include <sstream>

#include "loophom/elim.hpp"

namespace loophom {

Matrix::Matrix(FieldSpec f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols) {
  if (f.is_rational())
    q_.assign(rows * cols, mpq_class(0));
  else
    m_.assign(rows * cols, 0);
}

Matrix Matrix::identity(FieldSpec f, std::size_t n) {
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m.set_int(i, i, 1);
  return m;
}

Matrix Matrix::from_rows(FieldSpec f,
                         const std::vector<std::vector<Scalar>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows[0].size();
  Matrix m(f, rows.size(), nc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nc) throw Error("ragged rows in Matrix::from_rows");
    for (std::size_t j = 0; j < nc; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

Scalar Matrix::at(std::size_t i, std::size_t j) const {
  std::size_t k = i * cols_ + j;
  if (field_.is_rational()) return Scalar::from_mpq(field_, q_[k]);
  return Scalar::from_int(field_, static_cast<long long>(m_[k]));
}

void Matrix::set(std::size_t i, std::size_t j, const Scalar& v) {
  if (v.field() != field_)
    throw FieldMismatchError("matrix entry over " + v.field().str() +
                             " into matrix over " + field_.str());
  std::size_t k = i * cols_ + j;
  if (field_.is_rational())
    q_[k] = v.rational();
  else
    m_[k] = v.residue();
}

void Matrix::set_int(std::size_t i, std::size_t j, long long v) {
  set(i, j, Scalar::from_int(field_, v));
}

std::vector<Scalar> Matrix::row(std::size_t i) const {
  std::vector<Scalar> out;
  out.reserve(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out.push_back(at(i, j));
  return out;
}

std::vector<Scalar> Matrix::apply(const std::vector<Scalar>& v) const {
  if (v.size() != cols_) throw Error("dimension mismatch in Matrix::apply");
  std::vector<Scalar> out(rows_, Scalar::zero(field_));
  for (std::size_t i = 0; i < rows_; ++i) {
    Scalar acc = Scalar::zero(field_);
    for (std::size_t j = 0; j < cols_; ++j) {
      acc = acc + at(i, j) * v[j];
    }
    out[i] = acc;
  }
  return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (field_ != o.field_) throw FieldMismatchError("matrix product field mismatch");
  if (cols_ != o.rows_) throw Error("dimension mismatch in matrix product");
  Matrix out(field_, rows_, o.cols_);
  if (field_.is_rational()) {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const mpq_class& a = q_[i * cols_ + k];
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          out.q_[i * o.cols_ + j] += a * o.q_[k * o.cols_ + j];
      }
  } else {
    std::uint64_t p = field_.p;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        std::uint64_t a = m_[i * cols_ + k];
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) {
          auto& x = out.m_[i * o.cols_ + j];
          x = (x + a * o.m_[k * o.cols_ + j]) % p;
        }
      }
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (field_.is_rational())
        out.q_[j * rows_ + i] = q_[i * cols_ + j];
      else
        out.m_[j * rows_ + i] = m_[i * cols_ + j];
    }
  return out;
}

bool Matrix::is_zero() const {
  if (field_.is_rational()) {
    for (const auto& x : q_)
      if (x != 0) return false;
  } else {
    for (auto x : m_)
      if (x != 0) return false;
  }
  return true;
}

bool Matrix::operator==(const Matrix& o) const {
  return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ &&
         q_ == o.q_ && m_ == o.m_;
}

std::string Matrix::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? "\n[" : "[");
    for (std::size_t j = 0; j < cols_; ++j)
      os << (j ? " " : "") << at(i, j).str();
    os << "]";
  }
  return os.str();
}

namespace {

template <class Ops>
std::vector<SparseVec<typename Ops::Elem>> matrix_rows_sparse(const Matrix& m,
                                                              const Ops& ops) {
  std::vector<SparseVec<typename Ops::Elem>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<Ops, QOps>) {
        const mpq_class& v = m.qdata()[i * m.cols() + j];
        if (v != 0) rows[i].emplace_back(static_cast<std::uint32_t>(j), v);
      } else {
        std::uint64_t v = m.pdata()[i * m.cols() + j];
        if (v != 0) rows[i].emplace_back(static_cast<std::uint32_t>(j), v);
      }
    }
  }
  return rows;
}

template <class Ops>
Matrix echelon_to_matrix(const Eliminator<Ops>& e, const FieldSpec& f,
                         std::size_t ncols) {
  auto rows = e.echelon_rows();
  Matrix out(f, rows.size(), ncols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [c, v] : rows[i]) {
      if constexpr (std::is_same_v<Ops, QOps>)
        out.qdata()[i * ncols + c] = v;
      else
        out.pdata()[i * ncols + c] = v;
    }
  return out;
}

template <class Ops>
Matrix rref_impl(const Matrix& m, const Ops& ops,
                 std::vector<std::uint32_t>* pivots) {
  Eliminator<Ops> e(ops, static_cast<std::uint32_t>(m.cols()));
  for (auto& r : matrix_rows_sparse(m, ops)) e.add_row(r);
  e.back_substitute();
  if (pivots) *pivots = e.pivot_cols();
  return echelon_to_matrix(e, m.field(), m.cols());
}

template <class Ops>
long rank_impl(const Matrix& m, const Ops& ops) {
  Eliminator<Ops> e(ops, static_cast<std::uint32_t>(m.cols()));
  for (auto& r : matrix_rows_sparse(m, ops)) e.add_row(r);
  return static_cast<long>(e.rank());
}

}  // namespace

long rank(const Matrix& m) {
  if (m.field().is_rational()) return rank_impl(m, QOps{});
  return rank_impl(m, POps{m.field().p});
}

Matrix rref(const Matrix& m, std::vector<std::uint32_t>* pivots) {
  if (m.field().is_rational()) return rref_impl(m, QOps{}, pivots);
  return rref_impl(m, POps{m.field().p}, pivots);
}

Subspace kernel_basis(const Matrix& m) {
  std::vector<std::uint32_t> pivots;
  Matrix r = rref(m, &pivots);
  const FieldSpec& f = m.field();
  std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  std::vector<std::size_t> pivot_row_of(n, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    is_pivot[pivots[i]] = true;
    pivot_row_of[pivots[i]] = i;
  }
  std::vector<std::vector<Scalar>> basis;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    std::vector<Scalar> v(n, Scalar::zero(f));
    v[j] = Scalar::one(f);
    for (std::uint32_t c : pivots) {
      Scalar coeff = r.at(pivot_row_of[c], j);
      if (!coeff.is_zero()) v[c] = -coeff;
    }
    basis.push_back(std::move(v));
  }
  return Subspace::span(f, n, basis);
}

Subspace column_space(const Matrix& m) { return Subspace::span_of_rows(m.transpose()); }

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("inverse of non-square matrix");
  std::size_t n = m.rows();
  Matrix aug(m.field(), n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.set(i, j, m.at(i, j));
    aug.set_int(i, n + i, 1);
  }
  std::vector<std::uint32_t> pivots;
  Matrix r = rref(aug, &pivots);
  for (std::size_t i = 0; i < n; ++i)
    if (i >= pivots.size() || pivots[i] != i)
      throw Error("matrix is singular");
  Matrix out(m.field(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.set(i, j, r.at(i, n + j));
  return out;
}

std::optional<std::vector<Scalar>> solve(const Matrix& m,
                                         const std::vector<Scalar>& b) {
  if (b.size() != m.rows()) throw Error("dimension mismatch in solve");
  std::size_t n = m.cols();
  Matrix aug(m.field(), m.rows(), n + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.set(i, j, m.at(i, j));
    aug.set(i, n, b[i]);
  }
  std::vector<std::uint32_t> pivots;
  Matrix r = rref(aug, &pivots);
  std::vector<Scalar> x(n, Scalar::zero(m.field()));
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] == n) return std::nullopt;  // inconsistent
    x[pivots[i]] = r.at(i, n);
  }
  return x;
}

Subspace::Subspace(FieldSpec f, std::size_t ambient)
    : ambient_(ambient), basis_(f, 0, ambient) {}

Subspace Subspace::span_of_rows(const Matrix& m) {
  Subspace s(m.field(), m.cols());
  s.basis_ = rref(m, &s.pivots_);
  return s;
}

Subspace Subspace::span(FieldSpec f, std::size_t ambient,
                        const std::vector<std::vector<Scalar>>& vectors) {
  if (vectors.empty()) return Subspace(f, ambient);
  for (const auto& v : vectors)
    if (v.size() != ambient) throw Error("vector/ambient dimension mismatch");
  return span_of_rows(Matrix::from_rows(f, vectors));
}

std::vector<Scalar> Subspace::reduce(const std::vector<Scalar>& v) const {
  if (v.size() != ambient_) throw Error("vector/ambient dimension mismatch");
  std::vector<Scalar> out = v;
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    std::uint32_t c = pivots_[i];
    if (out[c].is_zero()) continue;
    Scalar f = out[c];
    for (std::size_t j = 0; j < ambient_; ++j) {
      Scalar bij = basis_.at(i, j);
      if (!bij.is_zero()) out[j] = out[j] - f * bij;
    }
  }
  return out;
}

bool Subspace::contains(const std::vector<Scalar>& v) const {
  for (const auto& x : reduce(v))
    if (!x.is_zero()) return false;
  return true;
}

bool Subspace::contains(const Subspace& other) const {
  for (std::size_t i = 0; i < other.dim(); ++i)
    if (!contains(other.basis_.row(i))) return false;
  return true;
}

bool Subspace::operator==(const Subspace& o) const {
  return ambient_ == o.ambient_ && basis_ == o.basis_;
}

Subspace quotient_basis(const Subspace& W, const Subspace& V) {
  if (W.ambient_dim() != V.ambient_dim())
    throw Error("quotient_basis: ambient dimension mismatch");
  for (std::size_t i = 0; i < V.dim(); ++i) {
    auto v = V.basis().row(i);
    if (!W.contains(v)) {
      std::ostringstream os;
      os << "quotient_basis: V is not contained in W; witness vector (";
      for (std::size_t j = 0; j < v.size(); ++j)
        os << (j ? " " : "") << v[j].str();
      os << ")";
      throw Error(os.str());
    }
  }
  // RREF rows of W are already reduced against V's pivot columns, so the
  // rows whose pivot is not a V-pivot are canonical coset representatives.
  std::vector<bool> vpiv(W.ambient_dim(), false);
  for (auto c : V.pivots()) vpiv[c] = true;
  std::vector<std::vector<Scalar>> reps;
  for (std::size_t i = 0; i < W.dim(); ++i) {
    if (!vpiv[W.pivots()[i]]) reps.push_back(W.basis().row(i));
  }
  Subspace out(W.field(), W.ambient_dim());
  if (!reps.empty()) out.basis_ = Matrix::from_rows(W.field(), reps);
  for (const auto& r : reps) {
    for (std::size_t j = 0; j < r.size(); ++j)
      if (!r[j].is_zero()) {
        out.pivots_.push_back(static_cast<std::uint32_t>(j));
        break;
      }
  }
  return out;
}

}  // namespace loophom
