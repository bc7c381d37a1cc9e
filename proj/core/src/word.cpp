#include "loophom/word.hpp"

#include <sstream>

namespace loophom {

Word Word::rotated(int k) const {
  Word w;
  int n = weight();
  w.letters.reserve(n);
  for (int i = 0; i < n; ++i) w.letters.push_back(letters[(k + i) % n]);
  return w;
}

std::string Word::str() const {
  if (letters.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters.size(); ++i)
    os << (i ? "." : "") << "u" << (static_cast<int>(letters[i]) + 1);
  return os.str();
}

AlgebraElement AlgebraElement::term(const Scalar& c, const Word& w) {
  AlgebraElement e(c.field());
  e.add_term(w, c);
  return e;
}

void AlgebraElement::add_term(const Word& w, const Scalar& c) {
  if (c.field() != field_)
    throw FieldMismatchError("coefficient field mismatch in AlgebraElement");
  if (c.is_zero()) return;
  if (!terms_.empty() && w.weight() != weight())
    throw Error("AlgebraElement must be weight-homogeneous: mixing weight " +
                std::to_string(weight()) + " with " + std::to_string(w.weight()));
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_.emplace(w, c);
  } else {
    Scalar s = it->second + c;
    if (s.is_zero())
      terms_.erase(it);
    else
      it->second = s;
  }
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  AlgebraElement out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, c);
  return out;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  AlgebraElement out = *this;
  for (const auto& [w, c] : o.terms_) out.add_term(w, -c);
  return out;
}

AlgebraElement AlgebraElement::scaled(const Scalar& c) const {
  AlgebraElement out(field_);
  if (c.is_zero()) return out;
  for (const auto& [w, v] : terms_) out.add_term(w, v * c);
  return out;
}

AlgebraElement AlgebraElement::operator-() const {
  return scaled(-Scalar::one(field_));
}

std::string AlgebraElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    os << (first ? "" : " + ") << "(" << c.str() << ")*" << w.str();
    first = false;
  }
  return os.str();
}

}  // namespace loophom
