#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loophom/field.hpp"

namespace loophom {

// Monomial in the generators u_1..u_r, stored as 0-based letter indices.
struct Word {
  std::vector<std::uint8_t> letters;

  Word() = default;
  explicit Word(std::vector<std::uint8_t> ls) : letters(std::move(ls)) {}
  static Word empty() { return Word{}; }
  static Word single(int i) { return Word({static_cast<std::uint8_t>(i)}); }
  static Word of(std::initializer_list<int> ls) {
    Word w;
    for (int i : ls) w.letters.push_back(static_cast<std::uint8_t>(i));
    return w;
  }

  int weight() const { return static_cast<int>(letters.size()); }
  int letter(int k) const { return letters[k]; }

  Word concat(const Word& o) const {
    Word w = *this;
    w.letters.insert(w.letters.end(), o.letters.begin(), o.letters.end());
    return w;
  }
  Word suffix_from(int k) const {
    return Word(std::vector<std::uint8_t>(letters.begin() + k, letters.end()));
  }
  Word rotated(int k) const;  // letters k.. followed by 0..k-1

  // Weight first, then lexicographic.
  auto operator<=>(const Word& o) const = default;

  std::string str() const;  // e.g. "u1.u3.u2", "1" for the empty word
};

// Finite k-linear combination of words, all of one weight (enforced).
// Degree homogeneity additionally holds for every element produced by the
// algebra operations; it is checked there, where generator degrees are known.
class AlgebraElement {
 public:
  explicit AlgebraElement(FieldSpec f) : field_(f) {}
  static AlgebraElement term(const Scalar& c, const Word& w);

  const FieldSpec& field() const { return field_; }
  const std::map<Word, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int weight() const { return terms_.empty() ? -1 : terms_.begin()->first.weight(); }

  void add_term(const Word& w, const Scalar& c);

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement scaled(const Scalar& c) const;
  AlgebraElement operator-() const;
  bool operator==(const AlgebraElement& o) const {
    return field_ == o.field_ && terms_ == o.terms_;
  }

  std::string str() const;

 private:
  FieldSpec field_;
  std::map<Word, Scalar> terms_;
};

}  // namespace loophom
