#pragma once

#include "loophom/complex.hpp"

namespace loophom {

// Loop product, Gerstenhaber bracket and (characteristic zero, equal
// degrees) the BV operator on the homology of the three-column complex.
//
// Conventions, fixed once and certified by the identity suite:
//  * column-1 classes are tuples (z_1,..,z_r) ~ sum_i x_i (x) z_i; the
//    associated derivation acts by theta(u_i) = (-1)^{|theta||u_i|} z_i;
//  * products are computed in the tensor dga A (x) U, so
//    (x_i (x) z)(x_j (x) t) = (-1)^{deg z * |x_j|} c_{ij} M^v (x) z t;
//  * the Gerstenhaber grading of a class is its A (x) U degree
//    (deg U-part minus deg A-part); the loop-space degree adds d.
template <class Ops>
class StringEngine {
 public:
  using E = typename Ops::Elem;
  using SV = SparseVec<E>;

  explicit StringEngine(ComplexEngine<Ops>& cx)
      : cx_(cx), alg_(cx.algebra()) {
    const ManifoldData& m = alg_.manifold();
    Matrix inv = inverse(m.intersection);
    cinv_.assign(m.r() * m.r(), alg_.ops().zero());
    cmat_.assign(m.r() * m.r(), alg_.ops().zero());
    for (int i = 0; i < m.r(); ++i)
      for (int j = 0; j < m.r(); ++j) {
        cinv_[i * m.r() + j] = alg_.ops().from_scalar(inv.at(i, j));
        cmat_[i * m.r() + j] =
            alg_.ops().from_scalar(Scalar::from_mpq(m.field, m.c_entry(i, j)));
      }
  }

  Algebra<Ops>& algebra() { return alg_; }
  ComplexEngine<Ops>& complex() { return cx_; }

  // A homology class in canonical form. Column 0 holds multiples of the
  // unit, column 1 tuples over (+)_i U(w) reduced mod im d1, column 2
  // vectors over U(w) reduced mod the commutator span.
  struct ClassVec {
    int column = 0;
    int w = 0;
    SV vec;

    bool is_zero() const { return vec.empty(); }
    bool operator==(const ClassVec& o) const {
      return column == o.column && w == o.w && vec == o.vec;
    }
  };

  ClassVec zero(int column, int w) { return ClassVec{column, std::max(w, 0), {}}; }

  ClassVec unit() { return ClassVec{0, 0, alg_.unit_vector(0, 0)}; }

  // The distinguished column-1 class with z_i = u_i.
  ClassVec kappa() {
    SV v;
    std::int64_t d1 = alg_.dim_u(1);
    for (int i = 0; i < alg_.r(); ++i)
      v.emplace_back(static_cast<std::uint32_t>(i * d1 + i), alg_.ops().one());
    return col1(1, v);
  }

  ClassVec col1(int w, const SV& tuple) {
    return ClassVec{1, w, cx_.h1_canonical(w, tuple)};
  }

  ClassVec col2(int w, const SV& v) {
    return ClassVec{2, w, cx_.h2_canonical(w, v)};
  }

  ClassVec col2_word(const Word& word) {
    return col2(word.weight(), alg_.reduce_word(word));
  }

  // Gerstenhaber (shifted) degree; loop degree is this plus d.
  int shifted_degree(const ClassVec& a) {
    switch (a.column) {
      case 0: return 0;
      case 1: return cx_.col1_degree(a.w, a.vec);
      case 2: return alg_.element_degree(a.w, a.vec) - alg_.manifold().d;
      default: throw Error("bad column");
    }
  }

  int loop_degree(const ClassVec& a) {
    return shifted_degree(a) + alg_.manifold().d;
  }

  ClassVec add(const ClassVec& a, const ClassVec& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.column != b.column || a.w != b.w)
      throw Error("adding classes of different bidegree");
    ClassVec out = a;
    out.vec = alg_.axpy(a.vec, alg_.ops().one(), b.vec);
    return out;
  }

  ClassVec scale(const ClassVec& a, const E& c) {
    ClassVec out = a;
    out.vec = alg_.scale(a.vec, c);
    return out;
  }

  // ------------------------------------------------------------- product

  // Tensor-dga product of canonical representatives, re-canonicalized.
  ClassVec product(const ClassVec& a, const ClassVec& b) {
    if (a.column == 0 || b.column == 0) {
      const ClassVec& scalar = a.column == 0 ? a : b;
      const ClassVec& other = a.column == 0 ? b : a;
      E c = scalar.is_zero() ? alg_.ops().zero() : scalar.vec.front().second;
      return scale(other, c);
    }
    int w = a.w + b.w;
    if (a.column != 1 || b.column != 1)  // any factor of top A-degree dies
      return zero(2, w);
    if (a.is_zero() || b.is_zero()) return zero(2, w);
    return col2(w, raw_col1_product(a, b));
  }

  // Chain-level product of two column-1 tuples (before canonicalization).
  SV raw_col1_product(const ClassVec& a, const ClassVec& b) {
    if (a.column != 1 || b.column != 1) throw Error("raw_col1_product needs column 1");
    const ManifoldData& m = alg_.manifold();
    std::vector<SV> pa = parts(a), pb = parts(b);
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (int i = 0; i < m.r(); ++i) {
      if (pa[i].empty()) continue;
      int zdeg = alg_.element_degree(a.w, pa[i]);
      for (int j = 0; j < m.r(); ++j) {
        if (pb[j].empty()) continue;
        const E& cij = cmat_[i * m.r() + j];
        if (alg_.ops().is_zero(cij)) continue;
        E coeff = (zdeg * m.x_degree(j)) % 2 ? alg_.ops().neg(cij) : cij;
        SV prod = alg_.mul(pa[i], a.w, pb[j], b.w);
        for (auto& [idx, v] : prod)
          acc.emplace_back(idx, alg_.ops().mul(coeff, v));
      }
    }
    return alg_.merge_terms(std::move(acc));
  }

  // Same product evaluated through the derivation dictionary and the
  // epsilon sign of the closed product formula; must agree with
  // raw_col1_product term by term.
  SV product_epsilon(const ClassVec& a, const ClassVec& b) {
    if (a.column != 1 || b.column != 1) throw Error("product_epsilon needs column 1");
    const ManifoldData& m = alg_.manifold();
    int ta = shifted_degree(a), tb = shifted_degree(b);
    int dtheta = ta + 1, deta = tb + 1;
    std::vector<SV> pa = parts(a), pb = parts(b);
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (int i = 0; i < m.r(); ++i) {
      if (pa[i].empty()) continue;
      SV theta_ui = ev_sign(dtheta, i, pa[i]);
      for (int j = 0; j < m.r(); ++j) {
        if (pb[j].empty()) continue;
        const E& cij = cmat_[i * m.r() + j];
        if (alg_.ops().is_zero(cij)) continue;
        SV eta_uj = ev_sign(deta, j, pb[j]);
        int ui = m.u_degree(i), uj = m.u_degree(j), xj = m.x_degree(j);
        int eps = dtheta * (ui + xj) + deta * uj + xj * ui;
        E coeff = eps % 2 ? alg_.ops().neg(cij) : cij;
        SV prod = alg_.mul(theta_ui, a.w, eta_uj, b.w);
        for (auto& [idx, v] : prod)
          acc.emplace_back(idx, alg_.ops().mul(coeff, v));
      }
    }
    return alg_.merge_terms(std::move(acc));
  }

  // ------------------------------------------------------------- bracket

  ClassVec bracket(const ClassVec& a, const ClassVec& b) {
    if (a.column == 0 || b.column == 0) return zero(2, a.w + b.w);
    if (a.column == 2 && b.column == 2) return zero(2, a.w + b.w - 1);
    if (a.is_zero() || b.is_zero())
      return zero(a.column == 1 && b.column == 1 ? 1 : 2, a.w + b.w - 1);
    if (a.column == 1 && b.column == 1) {
      // Commutator of the associated derivations, back in tuple form.
      int w = a.w + b.w - 1;
      int ta = shifted_degree(a), tb = shifted_degree(b);
      int dtheta = ta + 1, deta = tb + 1;
      int dcomm = dtheta + deta;
      std::int64_t dout = alg_.dim_u(w);
      std::vector<std::pair<std::uint32_t, E>> acc;
      for (int k = 0; k < alg_.r(); ++k) {
        SV eta_uk = derivation_on_generator(b, k);
        SV th_eta = apply_derivation(a, eta_uk, b.w);
        SV theta_uk = derivation_on_generator(a, k);
        SV eta_th = apply_derivation(b, theta_uk, a.w);
        E sign = (dtheta * deta) % 2 ? alg_.ops().one() : alg_.ops().neg(alg_.ops().one());
        SV comm = alg_.axpy(th_eta, sign, eta_th);
        // Back through the evaluation sign to tuple coordinates.
        SV part = ev_sign(dcomm, k, comm);
        std::int64_t off = static_cast<std::int64_t>(k) * dout;
        for (auto& [idx, v] : part)
          acc.emplace_back(static_cast<std::uint32_t>(off + idx), v);
      }
      return col1(w, alg_.merge_terms(std::move(acc)));
    }
    if (a.column == 1 && b.column == 2) {
      // {theta, M^v (x) y} = M^v (x) theta(y).
      SV out = apply_derivation(a, b.vec, b.w);
      return col2(a.w + b.w - 1, out);
    }
    // column 2 with column 1: extend by graded skew-symmetry.
    ClassVec rev = bracket(b, a);
    int sa = shifted_degree(a) + 1, sb = shifted_degree(b) + 1;
    E c = (sa * sb) % 2 ? alg_.ops().one() : alg_.ops().neg(alg_.ops().one());
    return scale(rev, c);
  }

  // ---------------------------------------------------------- BV operator

  bool delta_applicable(bool experimental = false) const {
    const ManifoldData& m = alg_.manifold();
    if (!m.gens.equal_degree_flag) return false;
    if (!m.field.is_rational() && !experimental) return false;
    return true;
  }

  // Delta on a single word of U(w): sum over letter positions k and targets
  // l of (-1)^{(n-1)(w-1)(k-1)} cinv[i_k][l] (x_l slot) (x) u_{i_{k+1}} ...
  // u_{i_{k-1}}.
  SV delta_word_raw(const Word& word) {
    const ManifoldData& m = alg_.manifold();
    int w = word.weight();
    if (w == 0) return {};
    int n = m.n;
    std::int64_t dprev = alg_.dim_u(w - 1);
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (int k = 0; k < w; ++k) {
      // Letters k+1, ..., k-1 cyclically: the rotation dropping position k.
      Word rest = word.rotated((k + 1) % w);
      rest.letters.pop_back();
      SV nf = alg_.reduce_word(rest);
      bool neg = (n - 1) * (w - 1) * k % 2 != 0;  // k is 0-based: (k+1)-1 = k
      int ik = word.letter(k);
      for (int l = 0; l < m.r(); ++l) {
        const E& ci = cinv_[ik * m.r() + l];
        if (alg_.ops().is_zero(ci)) continue;
        E coeff = neg ? alg_.ops().neg(ci) : ci;
        std::int64_t off = static_cast<std::int64_t>(l) * dprev;
        for (const auto& [idx, v] : nf)
          acc.emplace_back(static_cast<std::uint32_t>(off + idx),
                           alg_.ops().mul(coeff, v));
      }
    }
    return alg_.merge_terms(std::move(acc));
  }

  SV delta_vec_raw(int w, const SV& v) {
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [b, c] : v) {
      SV dw = delta_word_raw(alg_.basis_word(w, b));
      for (auto& [idx, val] : dw) acc.emplace_back(idx, alg_.ops().mul(c, val));
    }
    return alg_.merge_terms(std::move(acc));
  }

  ClassVec bv_delta(const ClassVec& a, bool experimental = false) {
    if (!delta_applicable(experimental))
      throw GuardError(
          "BV operator needs characteristic zero and equal generator degrees");
    if (a.column != 2 || a.w == 0) return zero(1, a.column == 2 ? a.w - 1 : a.w);
    return col1(a.w - 1, delta_vec_raw(a.w, a.vec));
  }

  // Closed cut-and-join formula for Delta(M^v(x)a) * Delta(M^v(x)b) as a
  // raw column-2 chain.
  SV product_cut_formula(const Word& a, const Word& b) {
    const ManifoldData& m = alg_.manifold();
    int n = m.n;
    int wa = a.weight(), wb = b.weight();
    int ra = wa - 1, rb = wb - 1;
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (int k = 0; k < wa; ++k) {
      Word resta = a.rotated((k + 1) % wa);
      resta.letters.pop_back();
      for (int l = 0; l < wb; ++l) {
        Word restb = b.rotated((l + 1) % wb);
        restb.letters.pop_back();
        const E& ci = cinv_[a.letter(k) * m.r() + b.letter(l)];
        if (alg_.ops().is_zero(ci)) continue;
        int eps = n + (n - 1) * (ra * k + rb * l);
        E coeff = eps % 2 ? alg_.ops().neg(ci) : ci;
        SV nf = alg_.reduce_word(resta.concat(restb));
        for (auto& [idx, v] : nf)
          acc.emplace_back(idx, alg_.ops().mul(coeff, v));
      }
    }
    return alg_.merge_terms(std::move(acc));
  }

  // -------------------------------------------------- identity evaluators

  // {a,b} = Delta(a*b) - Delta(a)*b - (-1)^{deg a} a*Delta(b).
  bool check_bv_relation(const ClassVec& a, const ClassVec& b) {
    ClassVec lhs = bracket(a, b);
    ClassVec t1 = bv_delta_or_zero(product(a, b));
    ClassVec t2 = product(bv_delta_or_zero(a), b);
    ClassVec t3 = product(a, bv_delta_or_zero(b));
    E sa = shifted_degree_or_zero(a) % 2 ? alg_.ops().one()
                                         : alg_.ops().neg(alg_.ops().one());
    // lhs - t1 + t2 + (-1)^{deg a} t3 = 0, arranged on a common bidegree.
    ClassVec total = lhs;
    total = add_signed(total, t1, alg_.ops().neg(alg_.ops().one()));
    total = add_signed(total, t2, alg_.ops().one());
    total = add_signed(total, t3, alg_.ops().neg(sa));
    return total.is_zero();
  }

  // Graded commutativity of the product.
  bool check_commutativity(const ClassVec& a, const ClassVec& b) {
    ClassVec ab = product(a, b);
    ClassVec ba = product(b, a);
    int s = shifted_degree_or_zero(a) * shifted_degree_or_zero(b);
    E c = s % 2 ? alg_.ops().neg(alg_.ops().one()) : alg_.ops().one();
    return ab == scale(ba, c);
  }

  // Bracket skew-symmetry on the suspension grading.
  bool check_skew(const ClassVec& a, const ClassVec& b) {
    ClassVec ab = bracket(a, b);
    ClassVec ba = bracket(b, a);
    int s = (shifted_degree_or_zero(a) + 1) * (shifted_degree_or_zero(b) + 1);
    E c = s % 2 ? alg_.ops().one() : alg_.ops().neg(alg_.ops().one());
    return ab == scale(ba, c);
  }

  // Left Leibniz form of the graded Jacobi identity.
  bool check_jacobi(const ClassVec& a, const ClassVec& b, const ClassVec& c) {
    ClassVec lhs = bracket(a, bracket(b, c));
    ClassVec r1 = bracket(bracket(a, b), c);
    int s = (shifted_degree_or_zero(a) + 1) * (shifted_degree_or_zero(b) + 1);
    ClassVec r2 = bracket(b, bracket(a, c));
    ClassVec rhs = add_signed(r1, r2, s % 2 ? alg_.ops().neg(alg_.ops().one())
                                            : alg_.ops().one());
    return classes_equal(lhs, rhs);
  }

  // Poisson compatibility {a, b*c} = {a,b}*c + (-1)^{(|a|+1)|b|} b*{a,c}.
  bool check_poisson(const ClassVec& a, const ClassVec& b, const ClassVec& c) {
    ClassVec lhs = bracket(a, product(b, c));
    ClassVec r1 = product(bracket(a, b), c);
    ClassVec r2 = product(b, bracket(a, c));
    int s = (shifted_degree_or_zero(a) + 1) * shifted_degree_or_zero(b);
    ClassVec rhs = add_signed(r1, r2, s % 2 ? alg_.ops().neg(alg_.ops().one())
                                            : alg_.ops().one());
    return classes_equal(lhs, rhs);
  }

  struct PairingRecord {
    bool applicable = false;
    bool pass = false;
  };

  // Multiplying Delta(M^v (x) u_{i_1}..u_{i_{w-1}}) by x_j (x) u_j must give
  // the signed cyclic sum of the w-letter word, as classes mod commutators.
  PairingRecord bv_pairing_check(const Word& word, int j) {
    PairingRecord rec;
    if (!delta_applicable()) return rec;
    rec.applicable = true;
    const ManifoldData& m = alg_.manifold();
    int w = word.weight() + 1;
    Word full = word;
    full.letters.push_back(static_cast<std::uint8_t>(j));

    // LHS: chain-level product of the Delta tuple with the j-slot tuple.
    ClassVec lhs_a{1, word.weight() - 1, delta_word_raw(word)};
    SV ej;
    std::int64_t d1 = alg_.dim_u(1);
    ej.emplace_back(static_cast<std::uint32_t>(j * d1 + j), alg_.ops().one());
    ClassVec lhs_b{1, 1, ej};
    SV lhs = raw_col1_product(lhs_a, lhs_b);

    std::vector<std::pair<std::uint32_t, E>> acc;
    int n = m.n;
    for (int k = 1; k <= w; ++k) {
      SV rot = alg_.reduce_word(full.rotated(k - 1));
      bool neg = ((w - 1) * (n - 1) * k) % 2 != 0;
      for (auto& [idx, v] : rot)
        acc.emplace_back(idx, neg ? alg_.ops().neg(v) : v);
    }
    SV rhs = alg_.merge_terms(std::move(acc));
    rec.pass = alg_.reduce_mod_commutators(w, alg_.axpy(lhs, alg_.ops().neg(alg_.ops().one()), rhs))
                   .empty();
    return rec;
  }

  // ----------------------------------------------------------- helpers

  std::vector<SV> parts(const ClassVec& a) {
    std::int64_t d = alg_.dim_u(a.w);
    std::vector<SV> out(alg_.r());
    for (const auto& [code, c] : a.vec) {
      int i = static_cast<int>(code / d);
      out[i].emplace_back(static_cast<std::uint32_t>(code % d), c);
    }
    return out;
  }

  // theta(u_i) for the derivation associated to a column-1 tuple.
  SV derivation_on_generator(const ClassVec& a, int i) {
    int dtheta = shifted_degree(a) + 1;
    return ev_sign(dtheta, i, parts(a)[i]);
  }

  // Leibniz extension of the derivation of a column-1 tuple to U(w).
  SV apply_derivation(const ClassVec& a, const SV& v, int w) {
    if (a.column != 1) throw Error("apply_derivation needs a column-1 class");
    if (v.empty()) return {};
    int dtheta = shifted_degree(a) + 1;
    int wout = w + a.w - 1;
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [b, c] : v) {
      const Word& word = alg_.basis_word(w, b);
      int prefix_deg = 0;
      for (int k = 0; k < w; ++k) {
        int letter = word.letter(k);
        SV target = derivation_on_generator(a, letter);
        if (!target.empty()) {
          SV piece = target;
          if (k > 0) {
            Word prefix(std::vector<std::uint8_t>(word.letters.begin(),
                                                  word.letters.begin() + k));
            piece = alg_.mul(alg_.reduce_word(prefix), k, piece, a.w);
          }
          if (k + 1 < w) {
            Word suffix = word.suffix_from(k + 1);
            piece = alg_.mul(piece, k + a.w, alg_.reduce_word(suffix), w - k - 1);
          }
          E coeff = (dtheta * prefix_deg) % 2 ? alg_.ops().neg(c) : c;
          for (auto& [idx, val] : piece)
            acc.emplace_back(idx, alg_.ops().mul(coeff, val));
        }
        prefix_deg += alg_.manifold().u_degree(letter);
      }
    }
    (void)wout;
    return alg_.merge_terms(std::move(acc));
  }

  ClassVec bv_delta_or_zero(const ClassVec& a) {
    if (a.column != 2 || a.w == 0) return zero(1, std::max(a.w - 1, 0));
    return bv_delta(a);
  }

  int shifted_degree_or_zero(const ClassVec& a) {
    return a.is_zero() ? 0 : shifted_degree(a);
  }

  ClassVec add_signed(const ClassVec& base, const ClassVec& term, const E& c) {
    if (term.is_zero()) return base;
    ClassVec scaled = scale(term, c);
    if (base.is_zero()) return scaled;
    return add(base, scaled);
  }

  bool classes_equal(const ClassVec& a, const ClassVec& b) {
    if (a.is_zero() && b.is_zero()) return true;
    if (a.is_zero() || b.is_zero()) return false;
    return a == b;
  }

 private:
  SV ev_sign(int dtheta, int i, const SV& v) {
    if ((dtheta * alg_.manifold().u_degree(i)) % 2 == 0) return v;
    return alg_.scale(v, alg_.ops().neg(alg_.ops().one()));
  }

  ComplexEngine<Ops>& cx_;
  Algebra<Ops>& alg_;
  std::vector<E> cinv_, cmat_;
};

}  // namespace loophom
