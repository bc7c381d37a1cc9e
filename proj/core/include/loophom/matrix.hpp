#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loophom/field.hpp"

namespace loophom {

// Dense exact matrix over a runtime FieldSpec. Storage is field-typed
// internally (mpq_class for Q, one machine word per entry for F_p); Scalar
// only appears at the accessor boundary.
class Matrix {
 public:
  Matrix() : Matrix(FieldSpec::rationals(), 0, 0) {}
  Matrix(FieldSpec f, std::size_t rows, std::size_t cols);

  static Matrix identity(FieldSpec f, std::size_t n);
  static Matrix from_rows(FieldSpec f,
                          const std::vector<std::vector<Scalar>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldSpec& field() const { return field_; }

  Scalar at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Scalar& v);
  void set_int(std::size_t i, std::size_t j, long long v);

  std::vector<Scalar> row(std::size_t i) const;
  std::vector<Scalar> apply(const std::vector<Scalar>& v) const;  // M·v

  Matrix operator*(const Matrix& o) const;
  Matrix transpose() const;
  bool is_zero() const;
  bool operator==(const Matrix& o) const;

  std::string str() const;

  // Typed storage, exposed for the elimination kernels.
  std::vector<mpq_class>& qdata() { return q_; }
  const std::vector<mpq_class>& qdata() const { return q_; }
  std::vector<std::uint64_t>& pdata() { return m_; }
  const std::vector<std::uint64_t>& pdata() const { return m_; }

 private:
  FieldSpec field_;
  std::size_t rows_, cols_;
  std::vector<mpq_class> q_;
  std::vector<std::uint64_t> m_;
};

// A subspace of k^n in canonical form: basis rows in reduced row echelon
// form with strictly increasing pivots, so equality of subspaces is
// equality of representations.
class Subspace {
 public:
  Subspace() : Subspace(FieldSpec::rationals(), 0) {}
  Subspace(FieldSpec f, std::size_t ambient);

  static Subspace span_of_rows(const Matrix& m);
  static Subspace span(FieldSpec f, std::size_t ambient,
                       const std::vector<std::vector<Scalar>>& vectors);

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  const std::vector<std::uint32_t>& pivots() const { return pivots_; }
  const FieldSpec& field() const { return basis_.field(); }

  bool contains(const std::vector<Scalar>& v) const;
  bool contains(const Subspace& other) const;
  // Canonical coset representative: eliminates every pivot coordinate.
  std::vector<Scalar> reduce(const std::vector<Scalar>& v) const;

  bool operator==(const Subspace& o) const;

 private:
  std::size_t ambient_;
  Matrix basis_;
  std::vector<std::uint32_t> pivots_;
  friend Subspace quotient_basis(const Subspace&, const Subspace&);
};

long rank(const Matrix& m);
Matrix rref(const Matrix& m, std::vector<std::uint32_t>* pivots = nullptr);
Subspace kernel_basis(const Matrix& m);  // right kernel {v : Mv = 0}
Subspace column_space(const Matrix& m);
Matrix inverse(const Matrix& m);  // throws Error on singular input
std::optional<std::vector<Scalar>> solve(const Matrix& m,
                                         const std::vector<Scalar>& b);

// Representatives of a basis of W/V. Requires V ⊆ W; a violating basis
// vector of V is reported as a witness in the thrown Error.
Subspace quotient_basis(const Subspace& W, const Subspace& V);

}  // namespace loophom
