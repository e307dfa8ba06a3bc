#include "oqrw/models.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace oqrw {

using nlohmann::json;

namespace {

void check_unitary(const Matrix& U, const char* name, double tol) {
  if (U.rows() != U.cols()) throw std::invalid_argument(std::string(name) + " must be square");
  const double defect = (U.adjoint() * U - Matrix::Identity(U.rows(), U.cols())).norm();
  if (defect > tol)
    throw std::invalid_argument(std::string(name) + " is not unitary (defect " +
                                std::to_string(defect) + ")");
}

Matrix column_slice(const Matrix& U, int i) {
  Matrix s = Matrix::Zero(U.rows(), U.cols());
  s.col(i) = U.col(i);
  return s;
}

std::shared_ptr<const CrystalLattice> hexagonal_lattice() {
  const double s = 1.0 / std::sqrt(2.0);
  BaseGraph g;
  g.vertices = {"u", "v"};
  Vector t1(2), t2(2), t3(2);
  t1 << s, s;
  t2 << -s, s;
  t3 << 0.0, 0.0;
  const Vector thetas[3] = {t1, t2, t3};
  for (int i = 0; i < 3; ++i)
    g.arcs.push_back({"e" + std::to_string(i + 1), 0, 1, i + 3, thetas[i]});
  for (int i = 0; i < 3; ++i)
    g.arcs.push_back({"e" + std::to_string(i + 1) + "r", 1, 0, i, (-thetas[i]).eval()});
  RealMatrix basis(2, 2);
  basis.col(0) = t1;
  basis.col(1) = t2;
  return std::make_shared<CrystalLattice>(std::move(g), std::move(basis));
}

}  // namespace

Matrix grover_unitary() {
  Matrix U(3, 3);
  U << -1, 2, 2, 2, -1, 2, 2, 2, -1;
  return U / 3.0;
}

Matrix hadamard3_unitary() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix U = Matrix::Zero(3, 3);
  U(0, 0) = s;
  U(0, 1) = -s;
  U(1, 0) = s;
  U(1, 1) = s;
  U(2, 2) = 1.0;
  return U;
}

ModelSpec hexagonal_model(const Matrix& U, const Matrix& V, const Tolerances& tol) {
  check_unitary(U, "U", tol.unitary_defect);
  check_unitary(V, "V", tol.unitary_defect);
  if (U.rows() != 3 || V.rows() != 3)
    throw std::invalid_argument("hexagonal model expects 3x3 unitaries");

  ModelSpec spec;
  spec.name = "hexagonal";
  spec.lattice = hexagonal_lattice();
  spec.kraus.lattice = spec.lattice;
  spec.kraus.dims = {3, 3};
  spec.kraus.ops.resize(6);
  for (int i = 0; i < 3; ++i) {
    spec.kraus.ops[i] = column_slice(U, i);      // B(e_i): H_u -> H_v
    spec.kraus.ops[i + 3] = column_slice(V, i);  // B(er_i): H_v -> H_u
  }
  spec.initial_site = LatticeCoord::origin(2);
  spec.initial_block = BlockOperator::identity(spec.kraus.dims);
  spec.initial_block *= Complex(1.0 / 6.0, 0.0);
  spec.mode = ModelSpec::KrausMode::unitary_pair;
  spec.U = U;
  spec.V = V;
  return spec;
}

ModelSpec integer_lattice_model(const std::vector<std::pair<Matrix, Matrix>>& step_ops,
                                const std::string& name, const Tolerances& tol) {
  const int d = static_cast<int>(step_ops.size());
  if (d == 0) throw std::invalid_argument("at least one direction required");
  const int dim = static_cast<int>(step_ops[0].first.rows());

  BaseGraph g;
  g.vertices = {"o"};
  for (int i = 0; i < d; ++i) {
    Vector plus = Vector::Zero(d);
    plus[i] = 1.0;
    g.arcs.push_back({"e" + std::to_string(i + 1) + "+", 0, 0, 2 * i + 1, plus});
    g.arcs.push_back({"e" + std::to_string(i + 1) + "-", 0, 0, 2 * i, (-plus).eval()});
  }

  ModelSpec spec;
  spec.name = name;
  spec.lattice = std::make_shared<CrystalLattice>(std::move(g), RealMatrix::Identity(d, d));
  spec.kraus.lattice = spec.lattice;
  spec.kraus.dims = {dim};
  for (const auto& [plus, minus] : step_ops) {
    if (plus.rows() != dim || plus.cols() != dim || minus.rows() != dim || minus.cols() != dim)
      throw std::invalid_argument("all step operators must share one square shape");
    spec.kraus.ops.push_back(plus);
    spec.kraus.ops.push_back(minus);
  }
  const auto violations = validate_kraus(spec.kraus, tol);
  if (has_errors(violations))
    throw std::invalid_argument("step operators violate completeness: " + violations.front().message);

  spec.initial_site = LatticeCoord::origin(d);
  spec.initial_block = BlockOperator::identity(spec.kraus.dims);
  spec.initial_block *= Complex(1.0 / dim, 0.0);
  spec.mode = ModelSpec::KrausMode::explicit_ops;
  return spec;
}

bool is_builtin_model(const std::string& name) {
  return name == "grover-hexagonal" || name == "ug-uh" || name == "uh-uh" ||
         name == "ug-identity" || name == "z1-biased-07";
}

ModelSpec builtin_model(const std::string& name, const Tolerances& tol) {
  if (name == "grover-hexagonal") {
    ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary(), tol);
    m.name = name;
    return m;
  }
  if (name == "ug-uh") {
    ModelSpec m = hexagonal_model(grover_unitary(), hadamard3_unitary(), tol);
    m.name = name;
    return m;
  }
  if (name == "uh-uh") {
    ModelSpec m = hexagonal_model(hadamard3_unitary(), hadamard3_unitary(), tol);
    m.name = name;
    return m;
  }
  if (name == "ug-identity") {
    ModelSpec m = hexagonal_model(grover_unitary(), Matrix::Identity(3, 3), tol);
    m.name = name;
    return m;
  }
  if (name == "z1-biased-07") {
    const double p = 0.7;
    Matrix plus(1, 1), minus(1, 1);
    plus << std::sqrt(p);
    minus << std::sqrt(1.0 - p);
    return integer_lattice_model({{plus, minus}}, name, tol);
  }
  throw std::invalid_argument("unknown builtin model: " + name);
}

// ---------------------------------------------------------------------------
// JSON model files
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw std::runtime_error(where + ": " + msg);
}

void require_object(const json& j, const std::string& where,
                    const std::set<std::string>& required,
                    const std::set<std::string>& optional = {}) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& k : required)
    if (!j.contains(k)) fail(where, "missing field '" + k + "'");
  for (const auto& [k, v] : j.items()) {
    if (!required.count(k) && !optional.count(k)) fail(where + "/" + k, "unknown field");
  }
}

json complex_matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix complex_matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where, "expected rows of [re,im] pairs");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where + "/" + std::to_string(r), "ragged row");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(where + "/" + std::to_string(r) + "/" + std::to_string(c), "expected [re,im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Vector real_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where + "/" + std::to_string(i), "expected a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

ModelSpec load_model(const std::filesystem::path& path, const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file is not valid JSON: " + std::string(e.what()));
  }

  require_object(j, "", {"version", "name", "lattice", "kraus", "initial"});
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    fail("/version", "unsupported schema version (expected 1)");
  if (!j["name"].is_string()) fail("/name", "expected a string");

  // Lattice block.
  const json& jl = j["lattice"];
  require_object(jl, "/lattice", {"vertices", "arcs", "basis"});
  BaseGraph g;
  if (!jl["vertices"].is_array() || jl["vertices"].empty())
    fail("/lattice/vertices", "expected a non-empty array of strings");
  for (const auto& v : jl["vertices"]) {
    if (!v.is_string()) fail("/lattice/vertices", "expected strings");
    g.vertices.push_back(v.get<std::string>());
  }
  if (!jl["arcs"].is_array() || jl["arcs"].empty())
    fail("/lattice/arcs", "expected a non-empty array");

  std::vector<std::string> reverse_ids;
  for (std::size_t a = 0; a < jl["arcs"].size(); ++a) {
    const std::string where = "/lattice/arcs/" + std::to_string(a);
    const json& ja = jl["arcs"][a];
    require_object(ja, where, {"id", "from", "to", "reverse", "theta"});
    Arc arc;
    arc.id = ja["id"].get<std::string>();
    arc.from = g.vertex_index(ja["from"].get<std::string>());
    arc.to = g.vertex_index(ja["to"].get<std::string>());
    if (arc.from < 0) fail(where + "/from", "unknown vertex '" + ja["from"].get<std::string>() + "'");
    if (arc.to < 0) fail(where + "/to", "unknown vertex '" + ja["to"].get<std::string>() + "'");
    arc.theta = real_vector_from_json(ja["theta"], where + "/theta");
    reverse_ids.push_back(ja["reverse"].get<std::string>());
    g.arcs.push_back(std::move(arc));
  }
  for (std::size_t a = 0; a < g.arcs.size(); ++a) {
    const int r = g.arc_index(reverse_ids[a]);
    if (r < 0)
      fail("/lattice/arcs/" + std::to_string(a) + "/reverse",
           "arc '" + g.arcs[a].id + "' names missing reverse arc '" + reverse_ids[a] + "'");
    g.arcs[a].reverse = r;
  }

  const json& jb = jl["basis"];
  if (!jb.is_array() || jb.empty()) fail("/lattice/basis", "expected a d x d array");
  const int d = static_cast<int>(jb.size());
  RealMatrix basis(d, d);
  for (int i = 0; i < d; ++i) {
    const Vector row = real_vector_from_json(jb[i], "/lattice/basis/" + std::to_string(i));
    if (row.size() != d) fail("/lattice/basis/" + std::to_string(i), "expected length " + std::to_string(d));
    basis.col(i) = row;  // basis[i] is theta_{i+1}
  }

  ModelSpec spec;
  spec.name = j["name"].get<std::string>();
  spec.lattice = std::make_shared<CrystalLattice>(std::move(g), std::move(basis));
  spec.kraus.lattice = spec.lattice;
  const BaseGraph& graph = spec.lattice->base();

  // Kraus block.
  const json& jk = j["kraus"];
  if (!jk.is_object() || !jk.contains("mode")) fail("/kraus", "missing field 'mode'");
  const std::string mode = jk["mode"].get<std::string>();
  if (mode == "explicit") {
    require_object(jk, "/kraus", {"mode", "dims", "operators"});
    if (!jk["dims"].is_object()) fail("/kraus/dims", "expected an object keyed by vertex id");
    spec.kraus.dims.assign(graph.vertices.size(), -1);
    for (const auto& [k, v] : jk["dims"].items()) {
      const int u = graph.vertex_index(k);
      if (u < 0) fail("/kraus/dims/" + k, "unknown vertex");
      if (!v.is_number_integer() || v.get<int>() <= 0) fail("/kraus/dims/" + k, "expected a positive integer");
      spec.kraus.dims[u] = v.get<int>();
    }
    for (std::size_t u = 0; u < graph.vertices.size(); ++u)
      if (spec.kraus.dims[u] < 0) fail("/kraus/dims", "missing dimension for vertex " + graph.vertices[u]);
    if (!jk["operators"].is_object()) fail("/kraus/operators", "expected an object keyed by arc id");
    spec.kraus.ops.assign(graph.arcs.size(), Matrix());
    for (const auto& [k, v] : jk["operators"].items()) {
      const int a = graph.arc_index(k);
      if (a < 0) fail("/kraus/operators/" + k, "unknown arc");
      spec.kraus.ops[a] = complex_matrix_from_json(v, "/kraus/operators/" + k);
    }
    for (std::size_t a = 0; a < graph.arcs.size(); ++a) {
      if (spec.kraus.ops[a].size() == 0)
        fail("/kraus/operators", "missing operator for arc " + graph.arcs[a].id);
      if (spec.kraus.ops[a].rows() != spec.kraus.dims[graph.arcs[a].to] ||
          spec.kraus.ops[a].cols() != spec.kraus.dims[graph.arcs[a].from])
        fail("/kraus/operators/" + graph.arcs[a].id, "operator shape does not match vertex dimensions");
    }
    spec.mode = ModelSpec::KrausMode::explicit_ops;
  } else if (mode == "unitary_pair") {
    require_object(jk, "/kraus", {"mode", "U", "V"});
    const Matrix U = complex_matrix_from_json(jk["U"], "/kraus/U");
    const Matrix V = complex_matrix_from_json(jk["V"], "/kraus/V");
    if (graph.vertices.size() != 2) fail("/kraus", "unitary_pair requires a two-vertex lattice");
    const int n = static_cast<int>(U.rows());
    if (U.cols() != n || V.rows() != n || V.cols() != n) fail("/kraus", "U and V must be square and equal size");
    const auto from_u = graph.arcs_from(0);
    if (static_cast<int>(from_u.size()) != n)
      fail("/kraus", "unitary_pair requires exactly " + std::to_string(n) + " arcs out of " +
                          graph.vertices[0]);
    spec.kraus.dims = {n, n};
    spec.kraus.ops.assign(graph.arcs.size(), Matrix());
    for (int i = 0; i < n; ++i) {
      const int a = from_u[i];
      if (graph.arcs[a].to != 1)
        fail("/kraus", "arc " + graph.arcs[a].id + " must run between the two vertices");
      spec.kraus.ops[a] = column_slice(U, i);
      spec.kraus.ops[graph.arcs[a].reverse] = column_slice(V, i);
    }
    spec.mode = ModelSpec::KrausMode::unitary_pair;
    spec.U = U;
    spec.V = V;
  } else {
    fail("/kraus/mode", "expected 'explicit' or 'unitary_pair'");
  }

  // Initial state block.
  const json& ji = j["initial"];
  require_object(ji, "/initial", {"site", "blocks"});
  if (!ji["site"].is_array() || static_cast<int>(ji["site"].size()) != spec.lattice->dimension())
    fail("/initial/site", "expected " + std::to_string(spec.lattice->dimension()) + " integers");
  std::vector<std::int64_t> site;
  for (std::size_t i = 0; i < ji["site"].size(); ++i) {
    if (!ji["site"][i].is_number_integer()) fail("/initial/site/" + std::to_string(i), "expected an integer");
    site.push_back(ji["site"][i].get<std::int64_t>());
  }
  spec.initial_site = LatticeCoord(std::move(site));
  if (!ji["blocks"].is_object()) fail("/initial/blocks", "expected an object keyed by vertex id");
  spec.initial_block = BlockOperator::zero(spec.kraus.dims);
  for (const auto& [k, v] : ji["blocks"].items()) {
    const int u = graph.vertex_index(k);
    if (u < 0) fail("/initial/blocks/" + k, "unknown vertex");
    Matrix b = complex_matrix_from_json(v, "/initial/blocks/" + k);
    if (b.rows() != spec.kraus.dims[u] || b.cols() != spec.kraus.dims[u])
      fail("/initial/blocks/" + k, "block shape does not match vertex dimension");
    spec.initial_block.blocks[u] = std::move(b);
  }
  return spec;
}

void save_model(const ModelSpec& spec, const std::filesystem::path& path) {
  const BaseGraph& g = spec.lattice->base();
  json j;
  j["version"] = 1;
  j["name"] = spec.name;

  json jl;
  jl["vertices"] = g.vertices;
  json arcs = json::array();
  for (const Arc& a : g.arcs) {
    json ja;
    ja["id"] = a.id;
    ja["from"] = g.vertices[a.from];
    ja["to"] = g.vertices[a.to];
    ja["reverse"] = g.arcs[a.reverse].id;
    json th = json::array();
    for (int i = 0; i < a.theta.size(); ++i) th.push_back(a.theta[i]);
    ja["theta"] = std::move(th);
    arcs.push_back(std::move(ja));
  }
  jl["arcs"] = std::move(arcs);
  json basis = json::array();
  for (int i = 0; i < spec.lattice->dimension(); ++i) {
    json row = json::array();
    for (int r = 0; r < spec.lattice->dimension(); ++r) row.push_back(spec.lattice->basis()(r, i));
    basis.push_back(std::move(row));
  }
  jl["basis"] = std::move(basis);
  j["lattice"] = std::move(jl);

  json jk;
  if (spec.mode == ModelSpec::KrausMode::unitary_pair) {
    jk["mode"] = "unitary_pair";
    jk["U"] = complex_matrix_to_json(spec.U);
    jk["V"] = complex_matrix_to_json(spec.V);
  } else {
    jk["mode"] = "explicit";
    json dims;
    for (std::size_t u = 0; u < g.vertices.size(); ++u) dims[g.vertices[u]] = spec.kraus.dims[u];
    jk["dims"] = std::move(dims);
    json ops;
    for (std::size_t a = 0; a < g.arcs.size(); ++a)
      ops[g.arcs[a].id] = complex_matrix_to_json(spec.kraus.ops[a]);
    jk["operators"] = std::move(ops);
  }
  j["kraus"] = std::move(jk);

  json ji;
  json site = json::array();
  for (int i = 0; i < spec.initial_site.dim(); ++i) site.push_back(spec.initial_site[i]);
  ji["site"] = std::move(site);
  json blocks;
  for (std::size_t u = 0; u < g.vertices.size(); ++u)
    blocks[g.vertices[u]] = complex_matrix_to_json(spec.initial_block.blocks[u]);
  ji["blocks"] = std::move(blocks);
  j["initial"] = std::move(ji);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

template <typename M>
bool exact_equal(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.cwiseEqual(b).all();
}

}  // namespace

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  const BaseGraph& ga = a.lattice->base();
  const BaseGraph& gb = b.lattice->base();
  if (a.name != b.name || ga.vertices != gb.vertices || ga.arcs.size() != gb.arcs.size())
    return false;
  for (std::size_t i = 0; i < ga.arcs.size(); ++i) {
    const Arc& x = ga.arcs[i];
    const Arc& y = gb.arcs[i];
    if (x.id != y.id || x.from != y.from || x.to != y.to || x.reverse != y.reverse ||
        !exact_equal(x.theta, y.theta))
      return false;
  }
  if (!exact_equal(a.lattice->basis(), b.lattice->basis())) return false;
  if (a.kraus.dims != b.kraus.dims || a.mode != b.mode) return false;
  if (a.mode == ModelSpec::KrausMode::unitary_pair) {
    if (!exact_equal(a.U, b.U) || !exact_equal(a.V, b.V)) return false;
  }
  if (a.kraus.ops.size() != b.kraus.ops.size()) return false;
  for (std::size_t i = 0; i < a.kraus.ops.size(); ++i)
    if (!exact_equal(a.kraus.ops[i], b.kraus.ops[i])) return false;
  if (a.initial_site != b.initial_site) return false;
  if (a.initial_block.blocks.size() != b.initial_block.blocks.size()) return false;
  for (std::size_t i = 0; i < a.initial_block.blocks.size(); ++i)
    if (!exact_equal(a.initial_block.blocks[i], b.initial_block.blocks[i])) return false;
  return true;
}

}  // namespace oqrw
