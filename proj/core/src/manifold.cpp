#include "loophom/manifold.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace loophom {

namespace {

Matrix reduce_intersection(const std::vector<mpq_class>& c, int r,
                           const FieldSpec& f) {
  Matrix m(f, r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      m.set(i, j, Scalar::from_mpq(f, c[i * r + j]));
  return m;
}

}  // namespace

ManifoldData make_manifold(std::string name, int n, int d,
                           std::vector<int> degrees,
                           std::vector<std::vector<long>> c, FieldSpec field) {
  ManifoldData m;
  m.name = std::move(name);
  m.n = n;
  m.d = d;
  m.gen_degrees = std::move(degrees);
  int r = m.r();
  m.c_exact.assign(static_cast<std::size_t>(r) * r, mpq_class(0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m.c_exact[i * r + j] = mpq_class(c[i][j]);
  m.field = field;
  m.intersection = reduce_intersection(m.c_exact, r, field);
  return m;
}

ManifoldData validate(ManifoldData raw) {
  std::vector<std::string> issues;
  int r = raw.r();

  if (raw.n < 2) issues.push_back("connectivity parameter n must be >= 2");
  if (raw.n >= 2 && raw.d > 3 * raw.n - 2)
    issues.push_back("dimension d = " + std::to_string(raw.d) +
                     " exceeds 3n-2 = " + std::to_string(3 * raw.n - 2));
  for (int i = 0; i < r; ++i) {
    int deg = raw.gen_degrees[i];
    if (deg < raw.n || deg > raw.d - raw.n)
      issues.push_back("generator degree |x_" + std::to_string(i + 1) + "| = " +
                       std::to_string(deg) + " outside [n, d-n] = [" +
                       std::to_string(raw.n) + ", " + std::to_string(raw.d - raw.n) +
                       "]");
  }
  if (r < 3)
    issues.push_back("r = " + std::to_string(r) +
                     " generators give dim H^*(M) = r+2 <= 4; need dim H^*(M) > 4");

  if (static_cast<int>(raw.c_exact.size()) != r * r)
    issues.push_back("intersection matrix is not r x r");

  if (static_cast<int>(raw.c_exact.size()) == r * r) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const mpq_class& cij = raw.c_exact[i * r + j];
        if (raw.gen_degrees[i] + raw.gen_degrees[j] != raw.d && cij != 0)
          issues.push_back("c[" + std::to_string(i + 1) + "][" +
                           std::to_string(j + 1) +
                           "] nonzero but |x_i|+|x_j| != d");
        int sign = (raw.gen_degrees[i] * raw.gen_degrees[j]) % 2 ? -1 : 1;
        mpq_class expect = sign * raw.c_exact[j * r + i];
        if (cij != expect)
          issues.push_back("graded symmetry fails at (" + std::to_string(i + 1) +
                           "," + std::to_string(j + 1) +
                           "): c_ij != (-1)^{|x_i||x_j|} c_ji");
      }

    raw.intersection = reduce_intersection(raw.c_exact, r, raw.field);
    if (rank(raw.intersection) != r)
      issues.push_back("intersection matrix is singular over " +
                       raw.field.str() + " (Poincare duality fails)");
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));

  raw.gens.u_degrees.clear();
  for (int i = 0; i < r; ++i) raw.gens.u_degrees.push_back(raw.gen_degrees[i] - 1);
  raw.gens.equal_degree_flag = true;
  for (int i = 0; i < r; ++i)
    if (raw.gen_degrees[i] != raw.n) raw.gens.equal_degree_flag = false;
  if (raw.d != 2 * raw.n) raw.gens.equal_degree_flag = false;

  // Consequence of graded symmetry in the equal-degree case: the form is
  // symmetric for even n and skew for odd n. Checked as a sanity assertion.
  if (raw.gens.equal_degree_flag) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        int sign = (raw.n % 2) ? -1 : 1;
        if (raw.c_exact[i * r + j] != sign * raw.c_exact[j * r + i])
          throw Error("internal: derived symmetry check failed");
      }
  }

  raw.validated = true;
  return raw;
}

Matrix inverse_intersection(const ManifoldData& m) {
  if (!m.validated) throw Error("inverse_intersection requires validated input");
  return inverse(m.intersection);
}

ManifoldData with_field(const ManifoldData& m, const FieldSpec& f) {
  ManifoldData out = m;
  out.field = f;
  out.intersection = reduce_intersection(out.c_exact, out.r(), f);
  out.validated = false;
  return validate(std::move(out));
}

namespace {

using nlohmann::json;

FieldSpec field_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "Q") return FieldSpec::rationals();
    throw Error("unknown field '" + j.get<std::string>() + "' (expected \"Q\" or {\"Fp\": p})");
  }
  if (j.is_object()) {
    if (j.size() != 1 || !j.contains("Fp"))
      throw Error("field object must be exactly {\"Fp\": p}");
    if (!j["Fp"].is_number_unsigned() && !j["Fp"].is_number_integer())
      throw Error("Fp modulus must be an integer");
    long long p = j["Fp"].get<long long>();
    if (p < 2) throw Error("Fp modulus must be >= 2");
    return FieldSpec::prime(static_cast<std::uint64_t>(p));
  }
  throw Error("field must be \"Q\" or {\"Fp\": p}");
}

mpq_class entry_from_json(const json& e) {
  if (e.is_number_integer()) return mpq_class(static_cast<long>(e.get<long long>()));
  if (e.is_string()) {
    mpq_class q;
    if (q.set_str(e.get<std::string>(), 10) != 0)
      throw Error("cannot parse matrix entry '" + e.get<std::string>() + "'");
    q.canonicalize();
    return q;
  }
  throw Error("matrix entries must be integers or \"a/b\" strings");
}

}  // namespace

ManifoldData manifold_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw Error("manifold file must be a JSON object");

  static const std::set<std::string> allowed = {"name", "n", "d", "degrees",
                                                "intersection", "field"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw Error("unknown key '" + it.key() + "' in manifold file");
  for (const auto& k : {"n", "d", "degrees", "intersection", "field"})
    if (!j.contains(k)) throw Error(std::string("missing key '") + k + "'");

  ManifoldData m;
  m.name = j.value("name", std::string("unnamed"));
  if (!j["n"].is_number_integer()) throw Error("'n' must be an integer");
  if (!j["d"].is_number_integer()) throw Error("'d' must be an integer");
  m.n = j["n"].get<int>();
  m.d = j["d"].get<int>();
  if (!j["degrees"].is_array()) throw Error("'degrees' must be an array");
  for (const auto& e : j["degrees"]) {
    if (!e.is_number_integer()) throw Error("'degrees' entries must be integers");
    m.gen_degrees.push_back(e.get<int>());
  }
  int r = m.r();
  if (!j["intersection"].is_array() ||
      static_cast<int>(j["intersection"].size()) != r)
    throw Error("'intersection' must be an r x r array");
  m.c_exact.assign(static_cast<std::size_t>(r) * r, mpq_class(0));
  for (int i = 0; i < r; ++i) {
    const auto& row = j["intersection"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != r)
      throw Error("'intersection' must be an r x r array");
    for (int jj = 0; jj < r; ++jj) m.c_exact[i * r + jj] = entry_from_json(row[jj]);
  }
  m.field = field_from_json(j["field"]);
  m.intersection = reduce_intersection(m.c_exact, r, m.field);
  return m;
}

ManifoldData manifold_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifold_from_json_string(buf.str());
}

std::string manifold_to_json_string(const ManifoldData& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["n"] = m.n;
  j["d"] = m.d;
  j["degrees"] = m.gen_degrees;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.r(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int k = 0; k < m.r(); ++k) {
      const mpq_class& q = m.c_entry(i, k);
      if (q.get_den() == 1 && q.get_num().fits_slong_p())
        row.push_back(q.get_num().get_si());
      else
        row.push_back(q.get_str());
    }
    rows.push_back(row);
  }
  j["intersection"] = rows;
  if (m.field.is_rational())
    j["field"] = "Q";
  else
    j["field"] = nlohmann::ordered_json{{"Fp", m.field.p}};
  return j.dump(2);
}

}  // namespace loophom
