#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "loophom/elim.hpp"
#include "loophom/manifold.hpp"
#include "loophom/word.hpp"

namespace loophom {

struct AlgebraOptions {
  // Weight components are materialized (basis + reduction rows) up to this
  // weight; the next two weights can still get certified dimensions.
  int max_explicit_weight = 8;
  // Cap on r^w for the enumerative routines (cyclic model, oracles).
  std::int64_t enumeration_guard = std::int64_t{1} << 24;
};

enum class DimRoute { Explicit, Certified };

// Field-independent summary of one weight component.
struct WeightComponentView {
  int w = 0;
  std::int64_t free_dim = 0;
  std::int64_t relation_dim = 0;
  std::int64_t dim = 0;
  std::vector<Word> basis_words;
};

// The loop homology algebra U = k<u_1..u_r>/(omega), realized weight by
// weight. Weight w is constructed inside V (x) U(w-1): the relation span
// there is the image of U(w-2) under y -> pi(omega (x) y), which yields the
// same quotient as dividing V^{(x)w} by all shifted copies of omega but
// keeps every matrix at size r*dim U(w-1) instead of r^w.
template <class Ops>
class Algebra {
 public:
  using E = typename Ops::Elem;
  using SV = SparseVec<E>;

  Algebra(ManifoldData m, Ops ops, AlgebraOptions opt = AlgebraOptions{})
      : m_(std::move(m)), ops_(ops), opt_(opt) {
    if (!m_.validated) throw Error("Algebra requires a validated manifold");
    if (m_.field != ops_.spec())
      throw FieldMismatchError("manifold field does not match backend");
    build_omega();
  }

  const ManifoldData& manifold() const { return m_; }
  const Ops& ops() const { return ops_; }
  int r() const { return m_.r(); }
  const AlgebraOptions& options() const { return opt_; }

  // omega = sum_{i,j} (-1)^{|x_i|} c_{ji} u_i u_j, as (i, j, coeff) terms.
  const std::vector<std::tuple<int, int, E>>& omega_terms() const { return omega_; }

  AlgebraElement omega_element() const {
    AlgebraElement e(m_.field);
    for (const auto& [i, j, c] : omega_)
      e.add_term(Word::of({i, j}), ops_.to_scalar(c));
    return e;
  }

  // ---------------------------------------------------------------- stages

  struct Stage {
    int w = 0;
    std::vector<Word> basis;  // lex-sorted; suffix-closed by construction
    std::vector<int> degrees;
    // Coordinates of V (x) U(w-1): code = i*dim(w-1) + j.
    std::vector<std::int32_t> coord_to_basis;  // >= 0 basis index, -1 pivot
    std::vector<std::int32_t> coord_to_pivot;  // index into pivot_nf, or -1
    std::vector<SV> pivot_nf;                  // normal form of pivot coords
    // Right-multiplication columns rmul[j][b] = NF(basis[b] * u_j) in U(w+1),
    // built on demand.
    std::vector<std::vector<SV>> rmul;
    std::vector<bool> rmul_built;

    std::int64_t dim() const { return static_cast<std::int64_t>(basis.size()); }
  };

  bool stage_built(int w) const { return w >= 0 && w < built_.load(); }

  const Stage& stage(int w) {
    if (w < 0) throw Error("negative weight");
    if (w > opt_.max_explicit_weight)
      throw GuardError("weight " + std::to_string(w) + " beyond explicit cap " +
                       std::to_string(opt_.max_explicit_weight));
    if (w < built_.load(std::memory_order_acquire)) return stages_[w];
    std::lock_guard<std::mutex> lk(mu_);
    while (built_.load(std::memory_order_relaxed) <= w) build_next_stage();
    return stages_[w];
  }

  std::int64_t dim_u(int w) {
    if (w < 0) return 0;
    if (w <= opt_.max_explicit_weight) return stage(w).dim();
    std::lock_guard<std::mutex> lk(mu_);
    auto it = certified_dims_.find(w);
    if (it != certified_dims_.end()) return it->second;
    throw GuardError("dim U(" + std::to_string(w) +
                     ") not computed: beyond explicit weight cap " +
                     std::to_string(opt_.max_explicit_weight) +
                     " and not certified");
  }

  bool dim_known(int w) {
    if (w < 0 || w <= opt_.max_explicit_weight) return true;
    std::lock_guard<std::mutex> lk(mu_);
    return certified_dims_.count(w) > 0;
  }

  DimRoute dim_route(int w) const {
    return w <= opt_.max_explicit_weight ? DimRoute::Explicit : DimRoute::Certified;
  }

  bool recurrence_holds(int w) {
    if (w < 2) return true;
    return dim_u(w) == static_cast<std::int64_t>(r()) * dim_u(w - 1) - dim_u(w - 2);
  }

  WeightComponentView component_view(int w) {
    const Stage& s = stage(w);
    WeightComponentView v;
    v.w = w;
    v.free_dim = 1;
    for (int k = 0; k < w; ++k) {
      if (v.free_dim > (std::int64_t{1} << 56) / std::max(r(), 2))
        throw GuardError("free dimension overflow at weight " + std::to_string(w));
      v.free_dim *= r();
    }
    v.dim = s.dim();
    v.relation_dim = v.free_dim - v.dim;
    v.basis_words = s.basis;
    return v;
  }

  // ----------------------------------------------------------- normal form

  int word_index(int w, const Word& word) {
    const Stage& s = stage(w);
    auto it = std::lower_bound(s.basis.begin(), s.basis.end(), word);
    if (it == s.basis.end() || !(*it == word)) return -1;
    return static_cast<int>(it - s.basis.begin());
  }

  const Word& basis_word(int w, int idx) { return stage(w).basis[idx]; }

  SV unit_vector(int /*w*/, int idx) const {
    SV v;
    v.emplace_back(static_cast<std::uint32_t>(idx), ops_.one());
    return v;
  }

  // NF(u_i * v) for v over basis(w-1); result over basis(target_w).
  SV reduce_letter(int i, const SV& v, int target_w) {
    const Stage& s = stage(target_w);
    std::int64_t dprev = stage(target_w - 1).dim();
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [j, c] : v) {
      std::int64_t code = static_cast<std::int64_t>(i) * dprev + j;
      std::int32_t b = s.coord_to_basis[code];
      if (b >= 0) {
        acc.emplace_back(static_cast<std::uint32_t>(b), c);
      } else {
        for (const auto& [bb, cc] : s.pivot_nf[s.coord_to_pivot[code]])
          acc.emplace_back(bb, ops_.mul(c, cc));
      }
    }
    return merge_terms(std::move(acc));
  }

  SV reduce_word(const Word& word) {
    SV v = unit_vector(0, 0);
    int w = word.weight();
    for (int k = w - 1; k >= 0; --k)
      v = reduce_letter(word.letter(k), v, w - k);
    return v;
  }

  // NF(v * u_j) for v over basis(w_source); result over basis(w_source+1).
  SV right_mul(const SV& v, int j, int w_source) {
    ensure_rmul(w_source, j);
    const Stage& s = stage(w_source);
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [b, c] : v)
      for (const auto& [bb, cc] : s.rmul[j][b])
        acc.emplace_back(bb, ops_.mul(c, cc));
    return merge_terms(std::move(acc));
  }

  // NF(a * b) with a over basis(wa), b over basis(wb).
  SV mul(const SV& a, int wa, const SV& b, int wb) {
    if (wa == 0) return a.empty() ? SV{} : scale(b, a.front().second);
    if (wb == 0) return b.empty() ? SV{} : scale(a, b.front().second);
    const Stage& sa = stage(wa);
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [ia, ca] : a) {
      const Word& wrd = sa.basis[ia];
      SV v = b;
      for (int k = wa - 1; k >= 0; --k)
        v = reduce_letter(wrd.letter(k), v, wb + (wa - k));
      for (auto& [idx, c] : v) acc.emplace_back(idx, ops_.mul(ca, c));
    }
    return merge_terms(std::move(acc));
  }

  // Degree of a homogeneous element (throws on mixed degrees); -1 for zero.
  int element_degree(int w, const SV& v) {
    if (v.empty()) return -1;
    const Stage& s = stage(w);
    int deg = s.degrees[v.front().first];
    for (const auto& [i, c] : v) {
      (void)c;
      if (s.degrees[i] != deg)
        throw Error("element is not degree-homogeneous at weight " +
                    std::to_string(w));
    }
    return deg;
  }

  // Graded commutator [a, b] = ab - (-1)^{|a||b|} ba of homogeneous elements.
  SV commutator(const SV& a, int wa, const SV& b, int wb) {
    if (a.empty() || b.empty()) return {};
    int da = element_degree(wa, a), db = element_degree(wb, b);
    SV ab = mul(a, wa, b, wb);
    SV ba = mul(b, wb, a, wa);
    E coeff = (da * db) % 2 ? ops_.one() : ops_.neg(ops_.one());
    return axpy(ab, coeff, ba);
  }

  SV axpy(const SV& x, const E& c, const SV& y) {  // x + c*y
    std::vector<std::pair<std::uint32_t, E>> acc(x.begin(), x.end());
    for (const auto& [i, v] : y) acc.emplace_back(i, ops_.mul(c, v));
    return merge_terms(std::move(acc));
  }

  SV scale(const SV& x, const E& c) {
    SV out;
    if (ops_.is_zero(c)) return out;
    out.reserve(x.size());
    for (const auto& [i, v] : x) {
      E m = ops_.mul(c, v);
      if (!ops_.is_zero(m)) out.emplace_back(i, m);
    }
    return out;
  }

  AlgebraElement to_element(int w, const SV& v) {
    const Stage& s = stage(w);
    AlgebraElement e(m_.field);
    for (const auto& [i, c] : v) e.add_term(s.basis[i], ops_.to_scalar(c));
    return e;
  }

  SV from_element(const AlgebraElement& e) {
    SV out;
    if (e.is_zero()) return out;
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [word, c] : e.terms()) {
      SV nf = reduce_word(word);
      for (auto& [i, v] : nf) acc.emplace_back(i, ops_.mul(ops_.from_scalar(c), v));
    }
    return merge_terms(std::move(acc));
  }

  // --------------------------------------------- commutator span in U(w)

  struct CommutatorSpan {
    int w = 0;
    std::unique_ptr<Eliminator<Ops>> elim;  // RREF of [U,U] cap U(w)
    std::vector<std::int32_t> rep_words;    // non-pivot basis indices
    std::int64_t rank() const { return static_cast<std::int64_t>(elim->rank()); }
  };

  // span{ NF([u_i, b]) : i, b basis of U(w-1) }. For invertible c this is
  // exactly the image of the incoming differential of the third complex
  // column (the c-mixing is an invertible recombination for each fixed b).
  const CommutatorSpan& commutator_span(int w) {
    std::lock_guard<std::mutex> lk(comm_mu_);
    auto it = comm_.find(w);
    if (it != comm_.end()) return *it->second;
    auto span = std::make_unique<CommutatorSpan>();
    span->w = w;
    span->elim = std::make_unique<Eliminator<Ops>>(
        ops_, static_cast<std::uint32_t>(stage(w).dim()));
    if (w >= 1) {
      std::int64_t dprev = stage(w - 1).dim();
      for (int i = 0; i < r(); ++i) {
        int di = m_.u_degree(i);
        for (std::int64_t b = 0; b < dprev; ++b) {
          SV e = unit_vector(w - 1, static_cast<int>(b));
          SV lhs = reduce_letter(i, e, w);
          SV rhs = right_mul(e, i, w - 1);
          int db = stage(w - 1).degrees[b];
          E coeff = (di * db) % 2 ? ops_.one() : ops_.neg(ops_.one());
          span->elim->add_row(axpy(lhs, coeff, rhs));
        }
      }
      span->elim->back_substitute();
    }
    for (std::int64_t b = 0; b < stage(w).dim(); ++b)
      if (!span->elim->is_pivot_col(static_cast<std::uint32_t>(b)))
        span->rep_words.push_back(static_cast<std::int32_t>(b));
    auto [pos, ok] = comm_.emplace(w, std::move(span));
    (void)ok;
    return *pos->second;
  }

  std::int64_t cyclic_quotient_dim(int w) {
    if (w == 0) return 1;
    const CommutatorSpan& s = commutator_span(w);
    return stage(w).dim() - s.rank();
  }

  // Canonical representative of [v] in U(w)/[U,U].
  SV reduce_mod_commutators(int w, const SV& v) {
    const CommutatorSpan& s = commutator_span(w);
    return s.elim->reduce(v);
  }

  // -------------------------------------------------- cyclic (orbit) model

  // U(w)/[U,U] computed in necklace coordinates: commutators of words are
  // divided out combinatorially (signed cyclic orbits of words), and the
  // relation ideal contributes one sparse row per word of weight w-2. This
  // route never touches the normal-form engine, which makes it usable far
  // beyond the weights where U(w) itself fits in memory. Needs char != 2.
  struct CyclicModel {
    int w = 0;
    std::int64_t live_orbits = 0;
    std::int64_t relation_rank = 0;
    std::int64_t quotient_dim() const { return live_orbits - relation_rank; }
  };

  CyclicModel cyclic_model(int w) {
    if (ops_.spec().characteristic() == 2)
      throw GuardError("cyclic orbit model unavailable in characteristic 2");
    if (w < 1) throw Error("cyclic_model requires w >= 1");
    std::int64_t total = 1;
    for (int k = 0; k < w; ++k) {
      total *= r();
      if (total > opt_.enumeration_guard)
        throw GuardError("cyclic model enumeration guard exceeded at weight " +
                         std::to_string(w));
    }
    std::vector<std::int32_t> orbit(total, -2);  // -1 marks a dead orbit
    std::vector<std::int8_t> rel_sign(total, 1);
    std::vector<int> deg_par(r());
    for (int i = 0; i < r(); ++i) deg_par[i] = m_.u_degree(i) % 2;

    std::vector<int> word(w);
    std::int32_t norbits = 0;
    for (std::int64_t code = 0; code < total; ++code) {
      if (orbit[code] != -2) continue;
      decode(code, w, word);
      int wdeg = 0;
      for (int k = 0; k < w; ++k) wdeg += deg_par[word[k]];
      std::vector<std::int64_t> cycle;
      std::vector<std::int8_t> signs;
      std::vector<int> curw = word;
      std::int64_t cur = code;
      std::int8_t s = 1;
      while (true) {
        cycle.push_back(cur);
        signs.push_back(s);
        int v = curw[0];
        int rest = (wdeg - deg_par[v]) % 2;
        std::int8_t step = (deg_par[v] * rest) % 2 ? -1 : 1;
        std::rotate(curw.begin(), curw.begin() + 1, curw.end());
        cur = encode(curw);
        s = static_cast<std::int8_t>(s * step);
        if (cur == code) break;
      }
      if (s == -1) {  // sign around the full cycle kills the class
        for (std::int64_t c : cycle) orbit[c] = -1;
        continue;
      }
      std::size_t rep_pos = 0;
      for (std::size_t k = 1; k < cycle.size(); ++k)
        if (cycle[k] < cycle[rep_pos]) rep_pos = k;
      std::int8_t srep = signs[rep_pos];
      for (std::size_t k = 0; k < cycle.size(); ++k) {
        orbit[cycle[k]] = norbits;
        rel_sign[cycle[k]] = static_cast<std::int8_t>(signs[k] * srep);
      }
      ++norbits;
    }

    CyclicModel model;
    model.w = w;
    model.live_orbits = norbits;
    if (w >= 2) {
      Eliminator<Ops> elim(ops_, static_cast<std::uint32_t>(norbits));
      std::int64_t tail = total / (static_cast<std::int64_t>(r()) * r());
      for (std::int64_t xc = 0; xc < tail; ++xc) {
        std::vector<std::pair<std::uint32_t, E>> acc;
        for (const auto& [i, j, c] : omega_) {
          std::int64_t code = (static_cast<std::int64_t>(i) * r() + j) * tail + xc;
          if (orbit[code] < 0) continue;
          acc.emplace_back(static_cast<std::uint32_t>(orbit[code]),
                           rel_sign[code] == 1 ? c : ops_.neg(c));
        }
        elim.add_row(merge_terms(std::move(acc)));
      }
      model.relation_rank = static_cast<std::int64_t>(elim.rank());
    }
    return model;
  }

  // ------------------------------------------------- Koszulity certificates

  struct Certificates {
    int base = 0;        // B: top explicitly built weight
    bool plus1 = false;  // recurrence certified at B+1
    bool plus2 = false;  // recurrence certified at B+2
    std::string note;
  };

  // Verifies that y -> pi(omega (x) y) stays injective one and (when omega
  // has a single-letter row) two weights past the explicit cap. That pins
  // dim U there through the recurrence without materializing those stages.
  const Certificates& ensure_top_certificates() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (certs_) return *certs_;
    }
    int B = opt_.max_explicit_weight;
    stage(B);

    int jstar = -1;
    {
      std::map<int, std::vector<int>> rows;
      for (const auto& [i, j, c] : omega_) {
        (void)c;
        rows[i].push_back(j);
      }
      for (const auto& [i, js] : rows) {
        (void)i;
        if (js.size() == 1 && js[0] > jstar) jstar = js[0];
      }
    }

    bool full = run_injectivity_elim(B, jstar);
    if (!full && jstar >= 0) {
      // The deleted-block matrix can be rank-deficient even when the full
      // one is injective; retry without deletion for the +1 certificate.
      jstar = -1;
      full = run_injectivity_elim(B, jstar);
    }

    std::lock_guard<std::mutex> lk(mu_);
    if (certs_) return *certs_;
    certs_ = std::make_unique<Certificates>();
    certs_->base = B;
    std::int64_t dB = stages_[B].dim();
    std::int64_t dBm1 = stages_[B - 1].dim();
    if (full) {
      certs_->plus1 = true;
      std::int64_t d1 = static_cast<std::int64_t>(r()) * dB - dBm1;
      certified_dims_[B + 1] = d1;
      if (jstar >= 0) {
        certs_->plus2 = true;
        certified_dims_[B + 2] = static_cast<std::int64_t>(r()) * d1 - dB;
        certs_->note = "block-deleted left-multiplication certificate (block " +
                       std::to_string(jstar + 1) + " removed)";
      } else {
        certs_->note = "full stacked left-multiplication certificate";
      }
    } else {
      certs_->note = "certificate elimination not of full rank";
    }
    return *certs_;
  }

  // Used by the cross-field transfer: record an externally certified value.
  void set_certified_dim(int w, std::int64_t dim) {
    std::lock_guard<std::mutex> lk(mu_);
    certified_dims_[w] = dim;
  }

  SV merge_terms(std::vector<std::pair<std::uint32_t, E>> acc) {
    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SV out;
    std::size_t k = 0;
    while (k < acc.size()) {
      std::uint32_t idx = acc[k].first;
      E sum = acc[k].second;
      ++k;
      while (k < acc.size() && acc[k].first == idx) {
        sum = ops_.add(sum, acc[k].second);
        ++k;
      }
      if (!ops_.is_zero(sum)) out.emplace_back(idx, sum);
    }
    return out;
  }

 private:
  void decode(std::int64_t code, int len, std::vector<int>& out) const {
    for (int k = len - 1; k >= 0; --k) {
      out[k] = static_cast<int>(code % r());
      code /= r();
    }
  }
  std::int64_t encode(const std::vector<int>& word) const {
    std::int64_t code = 0;
    for (int v : word) code = code * r() + v;
    return code;
  }

  void build_omega() {
    int rr = m_.r();
    for (int i = 0; i < rr; ++i)
      for (int j = 0; j < rr; ++j) {
        mpq_class cji = m_.c_entry(j, i);
        if (cji == 0) continue;
        if (m_.x_degree(i) % 2) cji = -cji;
        E coeff = ops_.from_scalar(Scalar::from_mpq(m_.field, cji));
        if (!ops_.is_zero(coeff)) omega_.emplace_back(i, j, coeff);
      }
    if (omega_.empty())
      throw Error("relation omega vanishes over " + m_.field.str());
  }

  // Caller must hold mu_.
  void build_next_stage() {
    int w = built_.load(std::memory_order_relaxed);
    Stage s;
    s.w = w;
    if (w == 0) {
      s.basis = {Word::empty()};
      s.degrees = {0};
    } else if (w == 1) {
      for (int i = 0; i < r(); ++i) {
        s.basis.push_back(Word::single(i));
        s.degrees.push_back(m_.u_degree(i));
      }
      s.coord_to_basis.assign(r(), 0);
      for (int i = 0; i < r(); ++i) s.coord_to_basis[i] = i;
      s.coord_to_pivot.assign(r(), -1);
    } else {
      const Stage& prev = stages_[w - 1];
      const Stage& prev2 = stages_[w - 2];
      std::int64_t dprev = prev.dim();
      std::int64_t ncoords = static_cast<std::int64_t>(r()) * dprev;
      Eliminator<Ops> elim(ops_, static_cast<std::uint32_t>(ncoords));
      for (std::int64_t y = 0; y < prev2.dim(); ++y) {
        std::vector<std::pair<std::uint32_t, E>> acc;
        for (const auto& [i, j, c] : omega_) {
          SV nf = reduce_letter_prebuilt(w - 1, j,
                                         unit_vector(w - 2, static_cast<int>(y)));
          std::int64_t off = static_cast<std::int64_t>(i) * dprev;
          for (auto& [idx, v] : nf)
            acc.emplace_back(static_cast<std::uint32_t>(off + idx), ops_.mul(c, v));
        }
        elim.add_row(merge_terms(std::move(acc)));
      }
      elim.back_substitute();

      s.coord_to_basis.assign(ncoords, -1);
      s.coord_to_pivot.assign(ncoords, -1);
      for (std::int64_t code = 0; code < ncoords; ++code) {
        if (elim.is_pivot_col(static_cast<std::uint32_t>(code))) continue;
        s.coord_to_basis[code] = static_cast<std::int32_t>(s.basis.size());
        int i = static_cast<int>(code / dprev);
        int j = static_cast<int>(code % dprev);
        s.basis.push_back(Word::single(i).concat(prev.basis[j]));
        s.degrees.push_back(m_.u_degree(i) + prev.degrees[j]);
      }
      for (std::int64_t code = 0; code < ncoords; ++code) {
        if (!elim.is_pivot_col(static_cast<std::uint32_t>(code))) continue;
        const auto& row = elim.row_for_pivot(static_cast<std::uint32_t>(code));
        SV nf;
        for (const auto& [cc, v] : row) {
          if (cc == static_cast<std::uint32_t>(code)) continue;
          std::int32_t b = s.coord_to_basis[cc];
          if (b < 0) throw Error("internal: RREF row touches a pivot column");
          nf.emplace_back(static_cast<std::uint32_t>(b), ops_.neg(v));
        }
        std::sort(nf.begin(), nf.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        s.coord_to_pivot[code] = static_cast<std::int32_t>(s.pivot_nf.size());
        s.pivot_nf.push_back(std::move(nf));
      }
    }
    s.rmul.assign(r(), {});
    s.rmul_built.assign(r(), false);
    stages_.push_back(std::move(s));
    built_.store(w + 1, std::memory_order_release);
  }

  // reduce_letter against already-built stages (no locking, build path).
  SV reduce_letter_prebuilt(int target_w, int i, const SV& v) {
    const Stage& s = stages_[target_w];
    std::int64_t dprev = stages_[target_w - 1].dim();
    std::vector<std::pair<std::uint32_t, E>> acc;
    for (const auto& [j, c] : v) {
      std::int64_t code = static_cast<std::int64_t>(i) * dprev + j;
      std::int32_t b = s.coord_to_basis[code];
      if (b >= 0) {
        acc.emplace_back(static_cast<std::uint32_t>(b), c);
      } else {
        for (const auto& [bb, cc] : s.pivot_nf[s.coord_to_pivot[code]])
          acc.emplace_back(bb, ops_.mul(c, cc));
      }
    }
    return merge_terms(std::move(acc));
  }

  void ensure_rmul(int w, int j) {
    stage(w + 1);  // right multiplication lands one weight up
    std::lock_guard<std::mutex> lk(rmul_mu_);
    for (int v = 0; v <= w; ++v) {
      Stage& s = stages_[v];
      if (s.rmul_built[j]) continue;
      std::int64_t d = s.dim();
      s.rmul[j].resize(d);
      if (v == 0) {
        s.rmul[j][0] = unit_vector(1, j);
      } else {
        const Stage& sub = stages_[v - 1];
        for (std::int64_t b = 0; b < d; ++b) {
          const Word& word = s.basis[b];
          Word suffix = word.suffix_from(1);
          auto it = std::lower_bound(sub.basis.begin(), sub.basis.end(), suffix);
          std::int64_t sidx = it - sub.basis.begin();
          s.rmul[j][b] =
              reduce_letter_prebuilt(v + 1, word.letter(0), sub.rmul[j][sidx]);
        }
      }
      s.rmul_built[j] = true;
    }
  }

  // Full column rank test of the stacked left-multiplication map
  // U(B-1) -> (+)_{i != jstar} U(B) (all blocks when jstar < 0).
  bool run_injectivity_elim(int B, int jstar) {
    std::int64_t dB = stage(B).dim();
    std::int64_t dBm1 = stage(B - 1).dim();
    int blocks = 0;
    std::vector<int> block_of(r(), -1);
    for (int i = 0; i < r(); ++i)
      if (i != jstar) block_of[i] = blocks++;
    std::vector<SV> cols(dBm1);
    for (std::int64_t z = 0; z < dBm1; ++z) {
      std::vector<std::pair<std::uint32_t, E>> acc;
      for (const auto& [i, j, c] : omega_) {
        if (i == jstar) continue;
        SV nf = reduce_letter(j, unit_vector(B - 1, static_cast<int>(z)), B);
        std::int64_t off = static_cast<std::int64_t>(block_of[i]) * dB;
        for (auto& [idx, v] : nf)
          acc.emplace_back(static_cast<std::uint32_t>(off + idx), ops_.mul(c, v));
      }
      cols[z] = merge_terms(std::move(acc));
    }
    std::vector<std::size_t> order(cols.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cols[a].size() < cols[b].size();
    });
    Eliminator<Ops> elim(ops_, static_cast<std::uint32_t>(blocks * dB));
    for (std::size_t k : order) elim.add_row(cols[k]);
    return static_cast<std::int64_t>(elim.rank()) == dBm1;
  }

  ManifoldData m_;
  Ops ops_;
  AlgebraOptions opt_;
  std::vector<std::tuple<int, int, E>> omega_;
  std::deque<Stage> stages_;
  std::atomic<int> built_{0};
  std::map<int, std::int64_t> certified_dims_;
  std::unique_ptr<Certificates> certs_;
  std::map<int, std::unique_ptr<CommutatorSpan>> comm_;
  std::mutex mu_;
  std::mutex comm_mu_;
  std::mutex rmul_mu_;
};

using AlgebraQ = Algebra<QOps>;
using AlgebraP = Algebra<POps>;

// The defining relation as a public element over the manifold's field.
AlgebraElement relation_omega(const ManifoldData& m);

}  // namespace loophom
