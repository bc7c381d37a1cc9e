#pragma once

#include <cstdint>

#include "loophom/field.hpp"

namespace loophom {

// Typed field backends for the elimination kernels. The public API speaks
// Scalar; hot paths are instantiated over one of these.

struct QOps {
  using Elem = mpq_class;

  FieldSpec spec() const { return FieldSpec::rationals(); }
  Elem zero() const { return mpq_class(0); }
  Elem one() const { return mpq_class(1); }
  Elem from_int(long v) const { return mpq_class(v); }
  bool is_zero(const Elem& a) const { return a == 0; }
  Elem neg(const Elem& a) const { return Elem(-a); }
  Elem add(const Elem& a, const Elem& b) const { return Elem(a + b); }
  Elem sub(const Elem& a, const Elem& b) const { return Elem(a - b); }
  Elem mul(const Elem& a, const Elem& b) const { return Elem(a * b); }
  Elem inv(const Elem& a) const {
    if (a == 0) throw DivisionByZeroError("inverse of zero over Q");
    return Elem(1 / a);
  }
  void submul(Elem& a, const Elem& f, const Elem& b) const { a -= f * b; }
  void addmul(Elem& a, const Elem& f, const Elem& b) const { a += f * b; }
  Scalar to_scalar(const Elem& a) const {
    return Scalar::from_mpq(spec(), a);
  }
  Elem from_scalar(const Scalar& s) const { return s.rational(); }
};

struct POps {
  using Elem = std::uint64_t;
  std::uint64_t p = 2;

  POps() = default;
  explicit POps(std::uint64_t prime) : p(prime) {}

  // p is validated once where the FieldSpec is first built.
  FieldSpec spec() const { return FieldSpec{FieldKind::Prime, p}; }
  Elem zero() const { return 0; }
  Elem one() const { return 1 % p; }
  Elem from_int(long v) const { return modarith::from_ll(v, p); }
  bool is_zero(Elem a) const { return a == 0; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem add(Elem a, Elem b) const { return modarith::add(a, b, p); }
  Elem sub(Elem a, Elem b) const { return modarith::sub(a, b, p); }
  Elem mul(Elem a, Elem b) const { return modarith::mul(a, b, p); }
  Elem inv(Elem a) const { return modarith::inv(a, p); }
  void submul(Elem& a, Elem f, Elem b) const { a = (a + (p - f) * b) % p; }
  void addmul(Elem& a, Elem f, Elem b) const { a = (a + f * b) % p; }
  Scalar to_scalar(Elem a) const {
    return Scalar::from_int(spec(), static_cast<long long>(a));
  }
  Elem from_scalar(const Scalar& s) const { return s.residue(); }
};

}  // namespace loophom
