#include "loophom/field.hpp"

#include <sstream>

namespace loophom {

ValidationError::ValidationError(std::vector<std::string> iss)
    : Error([&iss] {
        std::ostringstream os;
        os << "validation failed:";
        for (const auto& s : iss) os << "\n  - " << s;
        return os.str();
      }()),
      issues(std::move(iss)) {}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

FieldSpec FieldSpec::prime(std::uint64_t p) {
  if (!is_prime_u64(p))
    throw Error("FieldSpec: modulus " + std::to_string(p) + " is not prime");
  if (p >= (1ull << 31))
    throw Error("FieldSpec: modulus must be < 2^31, got " + std::to_string(p));
  return FieldSpec{FieldKind::Prime, p};
}

std::string FieldSpec::str() const {
  if (kind == FieldKind::Rationals) return "Q";
  return "F" + std::to_string(p);
}

namespace modarith {

std::uint64_t inv(std::uint64_t a, std::uint64_t p) {
  if (a == 0) throw DivisionByZeroError("inverse of zero in F_" + std::to_string(p));
  // Extended Euclid on signed 64-bit; p < 2^31 keeps everything in range.
  std::int64_t t = 0, newt = 1;
  std::int64_t r = static_cast<std::int64_t>(p), newr = static_cast<std::int64_t>(a);
  while (newr != 0) {
    std::int64_t q = r / newr;
    std::int64_t tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(t);
}

std::uint64_t from_mpz(const mpz_class& z, std::uint64_t p) {
  mpz_class r = z % static_cast<unsigned long>(p);
  if (r < 0) r += static_cast<unsigned long>(p);
  return r.get_ui();
}

std::uint64_t from_mpq(const mpq_class& q, std::uint64_t p) {
  std::uint64_t num = from_mpz(q.get_num(), p);
  std::uint64_t den = from_mpz(q.get_den(), p);
  if (den == 0)
    throw DivisionByZeroError("rational with denominator divisible by " +
                              std::to_string(p));
  return mul(num, inv(den, p), p);
}

}  // namespace modarith

Scalar Scalar::from_int(const FieldSpec& f, long long v) {
  Scalar s;
  s.field_ = f;
  if (f.is_rational()) {
    s.rat_ = mpq_class(static_cast<long>(v));
  } else {
    s.res_ = modarith::from_ll(v, f.p);
  }
  return s;
}

Scalar Scalar::from_mpq(const FieldSpec& f, const mpq_class& q) {
  Scalar s;
  s.field_ = f;
  if (f.is_rational()) {
    s.rat_ = q;
    s.rat_.canonicalize();
  } else {
    s.res_ = modarith::from_mpq(q, f.p);
  }
  return s;
}

Scalar Scalar::from_string(const FieldSpec& f, const std::string& str) {
  mpq_class q;
  if (q.set_str(str, 10) != 0)
    throw Error("cannot parse scalar '" + str + "'");
  if (q.get_den() == 0) throw DivisionByZeroError("scalar '" + str + "' has zero denominator");
  q.canonicalize();
  return from_mpq(f, q);
}

bool Scalar::is_zero() const {
  return field_.is_rational() ? rat_ == 0 : res_ == 0;
}

bool Scalar::is_one() const {
  return field_.is_rational() ? rat_ == 1 : res_ == 1 % field_.p;
}

const mpq_class& Scalar::rational() const {
  if (!field_.is_rational()) throw Error("scalar is not rational");
  return rat_;
}

std::uint64_t Scalar::residue() const {
  if (field_.is_rational()) throw Error("scalar is not a prime-field residue");
  return res_;
}

void Scalar::check_same_field(const Scalar& o) const {
  if (field_ != o.field_)
    throw FieldMismatchError("operands over different fields: " + field_.str() +
                             " vs " + o.field_.str());
}

Scalar Scalar::operator-() const {
  Scalar s = *this;
  if (field_.is_rational())
    s.rat_ = -rat_;
  else
    s.res_ = res_ == 0 ? 0 : field_.p - res_;
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same_field(o);
  Scalar s = *this;
  if (field_.is_rational())
    s.rat_ = rat_ + o.rat_;
  else
    s.res_ = modarith::add(res_, o.res_, field_.p);
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
  check_same_field(o);
  Scalar s = *this;
  if (field_.is_rational())
    s.rat_ = rat_ - o.rat_;
  else
    s.res_ = modarith::sub(res_, o.res_, field_.p);
  return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
  check_same_field(o);
  Scalar s = *this;
  if (field_.is_rational())
    s.rat_ = rat_ * o.rat_;
  else
    s.res_ = modarith::mul(res_, o.res_, field_.p);
  return s;
}

Scalar Scalar::operator/(const Scalar& o) const {
  check_same_field(o);
  if (o.is_zero()) throw DivisionByZeroError("division by zero over " + field_.str());
  Scalar s = *this;
  if (field_.is_rational())
    s.rat_ = rat_ / o.rat_;
  else
    s.res_ = modarith::mul(res_, modarith::inv(o.res_, field_.p), field_.p);
  return s;
}

Scalar Scalar::inverse() const {
  return one(field_) / *this;
}

bool Scalar::operator==(const Scalar& o) const {
  if (field_ != o.field_) return false;
  return field_.is_rational() ? rat_ == o.rat_ : res_ == o.res_;
}

std::string Scalar::str() const {
  if (field_.is_rational()) return rat_.get_str();
  return std::to_string(res_);
}

Scalar arith(const Scalar& a, const Scalar& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  throw Error("unreachable");
}

}  // namespace loophom
