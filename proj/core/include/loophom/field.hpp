#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace loophom {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldMismatchError : Error {
  using Error::Error;
};

struct DivisionByZeroError : Error {
  using Error::Error;
};

struct GuardError : Error {
  using Error::Error;
};

// Collects all violated invariants of an input, not just the first one.
struct ValidationError : Error {
  std::vector<std::string> issues;
  explicit ValidationError(std::vector<std::string> iss);
};

bool is_prime_u64(std::uint64_t n);

enum class FieldKind { Rationals, Prime };

// Ground field selector: Q or F_p. p is restricted to < 2^31 so products of
// residues fit in a 64-bit word during elimination.
struct FieldSpec {
  FieldKind kind = FieldKind::Rationals;
  std::uint64_t p = 0;

  static FieldSpec rationals() { return FieldSpec{FieldKind::Rationals, 0}; }
  static FieldSpec prime(std::uint64_t p);

  std::uint64_t characteristic() const { return kind == FieldKind::Prime ? p : 0; }
  bool is_rational() const { return kind == FieldKind::Rationals; }
  std::string str() const;

  bool operator==(const FieldSpec&) const = default;
};

namespace modarith {
inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + p - b;
}
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return (a * b) % p;  // a, b < p < 2^31
}
std::uint64_t inv(std::uint64_t a, std::uint64_t p);
std::uint64_t from_mpz(const mpz_class& z, std::uint64_t p);
std::uint64_t from_mpq(const mpq_class& q, std::uint64_t p);
inline std::uint64_t from_ll(long long v, std::uint64_t p) {
  long long r = v % static_cast<long long>(p);
  if (r < 0) r += static_cast<long long>(p);
  return static_cast<std::uint64_t>(r);
}
}  // namespace modarith

// Exact field element tagged with its FieldSpec. Rationals are kept in
// canonical form (lowest terms, positive denominator) by GMP; residues lie
// in [0, p).
class Scalar {
 public:
  Scalar() : field_(FieldSpec::rationals()), rat_(0), res_(0) {}

  static Scalar zero(const FieldSpec& f) { return from_int(f, 0); }
  static Scalar one(const FieldSpec& f) { return from_int(f, 1); }
  static Scalar from_int(const FieldSpec& f, long long v);
  static Scalar from_mpq(const FieldSpec& f, const mpq_class& q);
  // Accepts "a" or "a/b".
  static Scalar from_string(const FieldSpec& f, const std::string& s);

  const FieldSpec& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;

  // Accessors; throw when the wrong representation is requested.
  const mpq_class& rational() const;
  std::uint64_t residue() const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar inverse() const;

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  std::string str() const;

 private:
  void check_same_field(const Scalar& o) const;

  FieldSpec field_;
  mpq_class rat_;
  std::uint64_t res_;
};

enum class ArithOp { Add, Sub, Mul, Div };

// Runtime-dispatched arithmetic entry point used by the CLI surface.
Scalar arith(const Scalar& a, const Scalar& b, ArithOp op);

}  // namespace loophom
