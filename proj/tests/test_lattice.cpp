#include <doctest.h>

#include "test_support.hpp"

using namespace oqrw;

namespace {

std::shared_ptr<const CrystalLattice> hex_lattice() {
  return hexagonal_model(grover_unitary(), grover_unitary()).lattice;
}

// Z as a crystal lattice: one vertex, one arc pair with theta = +-1.
std::shared_ptr<const CrystalLattice> z1_lattice() {
  BaseGraph g;
  g.vertices = {"o"};
  Vector plus(1), minus(1);
  plus << 1.0;
  minus << -1.0;
  g.arcs.push_back({"e", 0, 0, 1, plus});
  g.arcs.push_back({"er", 0, 0, 0, minus});
  return std::make_shared<CrystalLattice>(std::move(g), RealMatrix::Identity(1, 1));
}

}  // namespace

TEST_CASE("hexagonal lattice validates cleanly") {
  auto lat = hex_lattice();
  CHECK(validate_lattice(*lat).empty());
  CHECK(lat->dimension() == 2);
  CHECK(lat->det_theta() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("broken antisymmetry is reported once, naming the edited arc") {
  auto good = hex_lattice();
  BaseGraph g = good->base();
  const int r = g.arc_index("e1r");
  g.arcs[r].theta = g.arcs[g.arc_index("e1")].theta;  // +theta(e1) instead of -theta(e1)
  CrystalLattice broken(std::move(g), good->basis());
  const auto violations = validate_lattice(broken);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].subject == "e1r");
  CHECK(violations[0].severity == Violation::Severity::error);
}

TEST_CASE("Z as a two-arc loop lattice validates") {
  CHECK(validate_lattice(*z1_lattice()).empty());
}

TEST_CASE("embed") {
  auto lat = hex_lattice();
  const double s = 1.0 / std::sqrt(2.0);

  SUBCASE("basis vector") {
    const Vector v = embed(*lat, LatticeCoord({1, 0}));
    CHECK(v[0] == doctest::Approx(s).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(s).epsilon(1e-14));
  }
  SUBCASE("origin") { CHECK(embed(*lat, LatticeCoord::origin(2)).norm() == 0.0); }
  SUBCASE("theta1 + theta2 by hand") {
    const Vector v = embed(*lat, LatticeCoord({1, 1}));
    CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("arc_step") {
  auto lat = hex_lattice();
  const int e1 = lat->base().arc_index("e1");
  const int e3 = lat->base().arc_index("e3");
  const int e2r = lat->base().arc_index("e2r");

  CHECK(arc_step(*lat, LatticeCoord::origin(2), e1) == LatticeCoord({1, 0}));
  CHECK(arc_step(*lat, LatticeCoord::origin(2), e3) == LatticeCoord({0, 0}));
  CHECK(arc_step(*lat, LatticeCoord({2, -1}), e2r) == LatticeCoord({2, -2}));
}

TEST_CASE("lattice properties") {
  auto lat = hex_lattice();
  testing::TestRng rng(7);
  auto random_coord = [&] {
    return LatticeCoord({static_cast<std::int64_t>(rng.uniform() * 20) - 10,
                         static_cast<std::int64_t>(rng.uniform() * 20) - 10});
  };

  SUBCASE("arc followed by its reverse returns home") {
    for (int a = 0; a < 6; ++a) {
      const LatticeCoord x = random_coord();
      CHECK(arc_step(*lat, arc_step(*lat, x, a), lat->base().arcs[a].reverse) == x);
    }
  }
  SUBCASE("embed is linear") {
    for (int trial = 0; trial < 20; ++trial) {
      const LatticeCoord x = random_coord();
      const LatticeCoord y = random_coord();
      const LatticeCoord sum({x[0] + y[0], x[1] + y[1]});
      CHECK((embed(*lat, sum) - embed(*lat, x) - embed(*lat, y)).norm() < 1e-12);
    }
  }
  SUBCASE("canonical basis relation e_i = sum_j Theta_ij theta_j") {
    for (int i = 0; i < 2; ++i) {
      Vector ei = Vector::Zero(2);
      ei[i] = 1.0;
      Vector recon = Vector::Zero(2);
      for (int j = 0; j < 2; ++j) recon += lat->theta_matrix()(i, j) * lat->basis().col(j);
      CHECK((recon - ei).norm() < 1e-12);
    }
  }
}

TEST_CASE("unsnappable translation label is a validation error") {
  BaseGraph g;
  g.vertices = {"o"};
  Vector plus(1), minus(1);
  plus << 0.5;  // not an integer combination of the basis
  minus << -0.5;
  g.arcs.push_back({"e", 0, 0, 1, plus});
  g.arcs.push_back({"er", 0, 0, 0, minus});
  CrystalLattice lat(std::move(g), RealMatrix::Identity(1, 1));
  CHECK(has_errors(validate_lattice(lat)));
}

TEST_CASE("dependent non-reverse labels warn but do not error") {
  BaseGraph g;
  g.vertices = {"o"};
  Vector one(1), two(1);
  one << 1.0;
  two << 2.0;
  g.arcs.push_back({"a", 0, 0, 1, one});
  g.arcs.push_back({"ar", 0, 0, 0, (-one).eval()});
  g.arcs.push_back({"b", 0, 0, 3, two});
  g.arcs.push_back({"br", 0, 0, 2, (-two).eval()});
  CrystalLattice lat(std::move(g), RealMatrix::Identity(1, 1));
  const auto violations = validate_lattice(lat);
  CHECK_FALSE(has_errors(violations));
  REQUIRE_FALSE(violations.empty());
  CHECK(violations.front().severity == Violation::Severity::warning);
}

TEST_CASE("out-degree zero is a validation error") {
  BaseGraph g;
  g.vertices = {"u", "isolated"};
  Vector plus(1), minus(1);
  plus << 1.0;
  minus << -1.0;
  g.arcs.push_back({"e", 0, 0, 1, plus});
  g.arcs.push_back({"er", 0, 0, 0, minus});
  CrystalLattice lat(std::move(g), RealMatrix::Identity(1, 1));
  const auto violations = validate_lattice(lat);
  REQUIRE(has_errors(violations));
  CHECK(violations.front().subject == "isolated");
}
