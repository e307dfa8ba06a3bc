#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "test_support.hpp"

using namespace oqrw;
using namespace oqrw::testing;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("oqrw_test_" + name);
}

}  // namespace

TEST_CASE("grover and hadamard3 unitaries match the displayed entries") {
  const Matrix UG = grover_unitary();
  CHECK((UG * UG.adjoint() - Matrix::Identity(3, 3)).norm() < 1e-15);
  CHECK(UG(0, 0) == Complex(-1.0 / 3.0, 0.0));
  CHECK(UG(0, 1) == Complex(2.0 / 3.0, 0.0));
  CHECK(UG(1, 1) == Complex(-1.0 / 3.0, 0.0));
  CHECK(UG(2, 2) == Complex(-1.0 / 3.0, 0.0));

  const Matrix UH = hadamard3_unitary();
  CHECK((UH * UH.adjoint() - Matrix::Identity(3, 3)).norm() < 1e-15);
  CHECK(UH(2, 0) == Complex(0.0, 0.0));
  CHECK(UH(2, 1) == Complex(0.0, 0.0));
  CHECK(UH(2, 2) == Complex(1.0, 0.0));
}

TEST_CASE("hexagonal_model") {
  SUBCASE("passes validation and has the maximally mixed invariant state") {
    const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
    CHECK(validate_lattice(*m.lattice).empty());
    CHECK(validate_kraus(m.kraus).empty());
    const InvariantStateReport r = invariant_state(m.kraus);
    CHECK(r.unique);
    BlockOperator expected = BlockOperator::identity({3, 3});
    expected *= Complex(1.0 / 6.0, 0.0);
    CHECK(distance(r.state, expected) < 1e-10);
  }
  SUBCASE("(U_G, U_H) is unique, (U_H, U_H) is not") {
    CHECK(invariant_state(hexagonal_model(grover_unitary(), hadamard3_unitary()).kraus).unique);
    CHECK_FALSE(invariant_state(hexagonal_model(hadamard3_unitary(), hadamard3_unitary()).kraus).unique);
  }
  SUBCASE("non-unitary input is rejected") {
    Matrix bad = grover_unitary();
    bad(0, 0) = 0.0;
    CHECK_THROWS_AS(hexagonal_model(bad, grover_unitary()), std::invalid_argument);
  }
  SUBCASE("P_u entries come from the unitary columns") {
    const ModelSpec m = hexagonal_model(grover_unitary(), hadamard3_unitary());
    const auto [Pu, Pv] = stochastic_matrices(m.kraus, 0, 1);
    const Matrix U = grover_unitary();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(Pu(i, j) == doctest::Approx(std::norm(U(j, i))).epsilon(1e-15));
  }
}

TEST_CASE("rho^(lambda) family is invariant for (U_H, U_H)") {
  const ModelSpec m = hexagonal_model(hadamard3_unitary(), hadamard3_unitary());
  for (double lambda : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
    const BlockOperator rho = hexagonal_rho_lambda(lambda);
    CHECK(distance(cp_apply(m.kraus, rho), rho) <= 1e-12);
  }
}

TEST_CASE("integer_lattice_model") {
  SUBCASE("biased 1-d walk") {
    const double p = 0.7;
    Matrix plus(1, 1), minus(1, 1);
    plus << std::sqrt(p);
    minus << std::sqrt(1.0 - p);
    const ModelSpec m = integer_lattice_model({{plus, minus}});
    CHECK(validate_lattice(*m.lattice).empty());
    CHECK(validate_kraus(m.kraus).empty());
    const InvariantStateReport r = invariant_state(m.kraus);
    const Vector mean = mean_vector(m.kraus, r.state);
    CHECK(mean[0] == doctest::Approx(2.0 * p - 1.0).epsilon(1e-12));
  }
  SUBCASE("2-d isotropic walk has zero mean by symmetry") {
    const Matrix half = 0.5 * Matrix::Identity(2, 2);
    const ModelSpec m = integer_lattice_model({{half, half}, {half, half}});
    const InvariantStateReport r = invariant_state(m.kraus);
    CHECK(mean_vector(m.kraus, r.state).norm() < 1e-12);
  }
  SUBCASE("diagonal Pauli-style family is valid") {
    const double p = 0.3, q = 0.8;
    Matrix plus = Matrix::Zero(2, 2), minus = Matrix::Zero(2, 2);
    plus(0, 0) = std::sqrt(p);
    plus(1, 1) = std::sqrt(q);
    minus(0, 0) = std::sqrt(1.0 - p);
    minus(1, 1) = std::sqrt(1.0 - q);
    const ModelSpec m = integer_lattice_model({{plus, minus}});
    CHECK(validate_kraus(m.kraus).empty());
  }
  SUBCASE("incomplete family is rejected") {
    Matrix plus(1, 1), minus(1, 1);
    plus << 0.5;
    minus << 0.5;
    CHECK_THROWS_AS(integer_lattice_model({{plus, minus}}), std::invalid_argument);
  }
}

TEST_CASE("model save/load round trip is lossless") {
  const fs::path path = temp_file("roundtrip.json");
  SUBCASE("unitary pair") {
    const ModelSpec m = builtin_model("grover-hexagonal");
    save_model(m, path);
    const ModelSpec loaded = load_model(path);
    CHECK(loaded == m);
  }
  SUBCASE("explicit operators") {
    const ModelSpec m = builtin_model("z1-biased-07");
    save_model(m, path);
    const ModelSpec loaded = load_model(path);
    CHECK(loaded == m);
  }
  SUBCASE("random explicit family with complex entries") {
    const ModelSpec m = random_hexagonal_family(55);
    save_model(m, path);
    CHECK(load_model(path) == m);
  }
  fs::remove(path);
}

TEST_CASE("loader rejects malformed files with located errors") {
  const fs::path path = temp_file("malformed.json");
  const ModelSpec m = builtin_model("grover-hexagonal");
  save_model(m, path);
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  in.close();
  auto write = [&](const nlohmann::json& doc) {
    std::ofstream out(path);
    out << doc.dump();
  };

  SUBCASE("missing reverse names the arc") {
    nlohmann::json bad = j;
    bad["lattice"]["arcs"][0]["reverse"] = "nope";
    write(bad);
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("e1"), std::runtime_error);
  }
  SUBCASE("unknown fields are rejected") {
    nlohmann::json bad = j;
    bad["lattice"]["extra"] = 1;
    write(bad);
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("/lattice/extra"), std::runtime_error);
  }
  SUBCASE("wrong version is rejected") {
    nlohmann::json bad = j;
    bad["version"] = 2;
    write(bad);
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("/version"), std::runtime_error);
  }
  SUBCASE("missing file") { CHECK_THROWS(load_model(temp_file("does_not_exist.json"))); }
  fs::remove(path);
}

TEST_CASE("hand-written Z model file equals the constructor") {
  const fs::path path = fs::path(OQRW_MODELS_DIR) / "z1_biased_07.json";
  REQUIRE(fs::exists(path));
  const ModelSpec loaded = load_model(path);
  const ModelSpec built = builtin_model("z1-biased-07");
  CHECK(loaded == built);
}

TEST_CASE("bundled model files validate") {
  for (const auto& entry : fs::directory_iterator(OQRW_MODELS_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const ModelSpec m = load_model(entry.path());
    CHECK_FALSE(has_errors(validate_lattice(*m.lattice)));
    CHECK_FALSE(has_errors(validate_kraus(m.kraus)));
  }
}
