#include "loophom/algebra.hpp"

namespace loophom {

AlgebraElement relation_omega(const ManifoldData& m) {
  if (!m.validated) throw Error("relation_omega requires a validated manifold");
  AlgebraElement e(m.field);
  for (int i = 0; i < m.r(); ++i)
    for (int j = 0; j < m.r(); ++j) {
      mpq_class cji = m.c_entry(j, i);
      if (cji == 0) continue;
      if (m.x_degree(i) % 2) cji = -cji;
      e.add_term(Word::of({i, j}), Scalar::from_mpq(m.field, cji));
    }
  if (e.is_zero())
    throw Error("relation omega vanishes over " + m.field.str());
  return e;
}

}  // namespace loophom
