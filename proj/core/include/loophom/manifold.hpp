#pragma once

#include <string>
#include <vector>

#include "loophom/matrix.hpp"

namespace loophom {

struct GeneratorTable {
  std::vector<int> u_degrees;  // |u_i| = |x_i| - 1
  bool equal_degree_flag = false;
};

// Input datum: generator degrees and intersection pairing of a highly
// connected closed manifold, together with the ground field to compute over.
struct ManifoldData {
  std::string name;
  int n = 0;                        // connectivity parameter
  int d = 0;                        // dimension
  std::vector<int> gen_degrees;     // |x_1| .. |x_r|
  std::vector<mpq_class> c_exact;   // r x r row-major, exact entries as given
  Matrix intersection;              // c_exact read into `field`
  FieldSpec field;

  bool validated = false;
  GeneratorTable gens;

  int r() const { return static_cast<int>(gen_degrees.size()); }
  int x_degree(int i) const { return gen_degrees[i]; }
  int u_degree(int i) const { return gens.u_degrees[i]; }
  const mpq_class& c_entry(int i, int j) const { return c_exact[i * r() + j]; }
};

// Convenience constructor used by tests and the reference inputs.
ManifoldData make_manifold(std::string name, int n, int d,
                           std::vector<int> degrees,
                           std::vector<std::vector<long>> c,
                           FieldSpec field);

// Checks every structural invariant and returns the normalized datum with
// its GeneratorTable. All violations are collected into one ValidationError.
ManifoldData validate(ManifoldData raw);

// Exact inverse of the intersection matrix (input must be validated).
Matrix inverse_intersection(const ManifoldData& m);

// Strict JSON reader: unknown keys are rejected. Field may be overridden by
// the caller (CLI --field) before validation.
ManifoldData manifold_from_json_string(const std::string& text);
ManifoldData manifold_from_json_file(const std::string& path);
std::string manifold_to_json_string(const ManifoldData& m);

// Re-reads the same integer/rational matrix into another field; the result
// still has to pass validate() (in particular c must stay invertible).
ManifoldData with_field(const ManifoldData& m, const FieldSpec& f);

}  // namespace loophom
