#include <doctest.h>

#include "oqrw/fourier.hpp"
#include "test_support.hpp"

using namespace oqrw;
using namespace oqrw::testing;

namespace {

Vector random_momentum(TestRng& rng) {
  Vector k(2);
  k[0] = 2.0 * M_PI * (rng.uniform() - 0.5);
  k[1] = 2.0 * M_PI * (rng.uniform() - 0.5);
  return k;
}

// D(k) = diag(e^{-i<k,theta1>}, e^{-i<k,theta2>}, 1).
Matrix phase_diag(const CrystalLattice& lat, const Vector& k, double power = 1.0) {
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = std::exp(Complex(0.0, -power * k.dot(lat.basis().col(0))));
  D(1, 1) = std::exp(Complex(0.0, -power * k.dot(lat.basis().col(1))));
  D(2, 2) = 1.0;
  return D;
}

Matrix matrix_power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

BlockOperator from_diagonals(const Matrix& A_block, const Matrix& B_block) {
  const Eigen::Vector3cd ones = Eigen::Vector3cd::Ones();
  Matrix a = (A_block * ones).asDiagonal();
  Matrix b = (B_block * ones).asDiagonal();
  return BlockOperator({a, b});
}

}  // namespace

TEST_CASE("dual_iterate basics") {
  const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
  const BlockOperator id = BlockOperator::identity({3, 3});
  TestRng rng(1);

  SUBCASE("n = 0 is the identity") {
    CHECK(distance(dual_iterate(m.kraus, random_momentum(rng), 0), id) == 0.0);
  }
  SUBCASE("k = 0, n = 1 is the identity by completeness") {
    CHECK(distance(dual_iterate(m.kraus, Vector::Zero(2), 1), id) < 1e-14);
  }
  SUBCASE("DualSymbol at k = 0 fixes the identity") {
    const DualSymbol symbol(m.kraus);
    CHECK(distance(symbol.apply(Vector::Zero(2), id), id) < 1e-14);
  }
}

TEST_CASE("(U_G, identity) dual process matches the closed forms") {
  const ModelSpec m = hexagonal_model(grover_unitary(), Matrix::Identity(3, 3));
  const Matrix P = grover_p_matrix().cast<Complex>();
  TestRng rng(2);

  for (int trial = 0; trial < 5; ++trial) {
    const Vector k = random_momentum(rng);
    const Matrix D = phase_diag(*m.lattice, k);

    for (int n = 1; n <= 20; ++n) {
      Matrix A_tilde, B_tilde;
      if (n % 2 == 0) {
        const int half = n / 2;
        A_tilde = D * matrix_power(P, half) * D.adjoint();
        B_tilde = matrix_power(P, half);
      } else {
        const int half = (n + 1) / 2;
        A_tilde = D * matrix_power(P, half);
        B_tilde = matrix_power(P, half - 1) * D.adjoint();
      }
      const BlockOperator expected = from_diagonals(A_tilde, B_tilde);
      CHECK(distance(dual_iterate(m.kraus, k, n), expected) < 1e-12);
    }
  }
}

TEST_CASE("(U_G, identity) explicit even-step matrices") {
  // The displayed A-tilde_{2m} and B-tilde_{2m} entries, checked against the
  // closed forms D P^m D* and P^m and against the operator iteration through
  // their contraction with the all-ones vector.
  const ModelSpec m = hexagonal_model(grover_unitary(), Matrix::Identity(3, 3));
  const Matrix P = grover_p_matrix().cast<Complex>();
  TestRng rng(3);
  const Vector k = random_momentum(rng);
  const Matrix D = phase_diag(*m.lattice, k);
  const double phi1 = k.dot(m.lattice->basis().col(0));
  const double phi2 = k.dot(m.lattice->basis().col(1));

  for (int half = 1; half <= 10; ++half) {
    const double alpha = std::pow(-1.0 / 3.0, half);
    const double diag = (1.0 + 2.0 * alpha) / 3.0;
    const double off = (1.0 - alpha) / 3.0;
    // B-tilde_{2m} = P^m is all real; its (1,1) entry is (1+2(-1/3)^m)/3.
    Matrix B_tilde = Matrix::Constant(3, 3, Complex(off, 0.0));
    for (int i = 0; i < 3; ++i) B_tilde(i, i) = diag;
    // A-tilde_{2m} carries the relative phases.
    Matrix A_tilde(3, 3);
    A_tilde(0, 0) = A_tilde(1, 1) = A_tilde(2, 2) = diag;
    A_tilde(0, 1) = off * std::exp(Complex(0.0, phi2 - phi1));
    A_tilde(1, 0) = off * std::exp(Complex(0.0, phi1 - phi2));
    A_tilde(0, 2) = off * std::exp(Complex(0.0, -phi1));
    A_tilde(2, 0) = off * std::exp(Complex(0.0, phi1));
    A_tilde(1, 2) = off * std::exp(Complex(0.0, -phi2));
    A_tilde(2, 1) = off * std::exp(Complex(0.0, phi2));

    CHECK((matrix_power(P, half) - B_tilde).norm() < 1e-12);
    CHECK((D * matrix_power(P, half) * D.adjoint() - A_tilde).norm() < 1e-12);
    CHECK(std::abs(B_tilde(0, 0) - Complex(diag, 0.0)) == 0.0);

    const BlockOperator y = dual_iterate(m.kraus, k, 2 * half);
    CHECK(distance(y, from_diagonals(A_tilde, B_tilde)) < 1e-12);
  }
}

TEST_CASE("(U_G, U_G) dual process matches the interleaved closed forms") {
  const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
  const Matrix P = grover_p_matrix().cast<Complex>();
  TestRng rng(4);

  for (int trial = 0; trial < 5; ++trial) {
    const Vector k = random_momentum(rng);
    const Matrix D = phase_diag(*m.lattice, k);
    const Matrix Dh = phase_diag(*m.lattice, k, 0.5);  // D^{1/2}
    const Matrix core_a = Dh * P * D.adjoint() * P * Dh;
    const Matrix core_b = Dh.adjoint() * P * D * P * Dh.adjoint();

    for (int n = 1; n <= 20; ++n) {
      Matrix A_tilde, B_tilde;
      if (n % 2 == 1) {
        const int half = (n - 1) / 2;
        A_tilde = Dh * matrix_power(core_a, half) * Dh;
        B_tilde = Dh.adjoint() * matrix_power(core_b, half) * Dh.adjoint();
      } else {
        const int half = n / 2;
        A_tilde = Dh * matrix_power(core_a, half - 1) * Dh * P * D.adjoint();
        B_tilde = Dh.adjoint() * matrix_power(core_b, half - 1) * Dh.adjoint() * P * D;
      }
      const BlockOperator expected = from_diagonals(A_tilde, B_tilde);
      CHECK(distance(dual_iterate(m.kraus, k, n), expected) < 1e-12);
    }
  }
}

TEST_CASE("blockwise recurrences a_n = D P b_{n-1}") {
  // Both worked examples keep Y_n diagonal; iterating the displayed
  // recurrences must agree with the operator iteration.
  for (bool grover_pair : {false, true}) {
    const ModelSpec m = grover_pair
                            ? hexagonal_model(grover_unitary(), grover_unitary())
                            : hexagonal_model(grover_unitary(), Matrix::Identity(3, 3));
    const Matrix P = grover_p_matrix().cast<Complex>();
    TestRng rng(grover_pair ? 5 : 6);
    const Vector k = random_momentum(rng);
    const Matrix D = phase_diag(*m.lattice, k);

    Eigen::Vector3cd a = Eigen::Vector3cd::Ones();
    Eigen::Vector3cd b = Eigen::Vector3cd::Ones();
    for (int n = 1; n <= 12; ++n) {
      const Eigen::Vector3cd a_next = D * (P * b);
      const Eigen::Vector3cd b_next =
          grover_pair ? (D.adjoint() * (P * a)).eval() : (D.adjoint() * a).eval();
      a = a_next;
      b = b_next;
      const BlockOperator y = dual_iterate(m.kraus, k, n);
      CHECK((y.blocks[0].diagonal() - a).norm() < 1e-12);
      CHECK((y.blocks[1].diagonal() - b).norm() < 1e-12);
      // Off-diagonal entries vanish for these models.
      CHECK((y.blocks[0] - Matrix(a.asDiagonal())).norm() < 1e-12);
    }
  }
}

TEST_CASE("the stochastic matrix P diagonalizes with eigenvalues {1, -1/3, -1/3}") {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(grover_p_matrix());
  const Vector ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("characteristic_function") {
  const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
  const LatticeState initial = m.initial_state();
  TestRng rng(7);

  SUBCASE("k = 0 carries total probability") {
    for (int n : {0, 1, 5, 9})
      CHECK(std::abs(characteristic_function(m.kraus, initial, Vector::Zero(2), n) -
                     Complex(1.0, 0.0)) < 1e-10);
  }
  SUBCASE("one step equals the transform of the five-point law") {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector k = random_momentum(rng);
      const double expected = 1.0 / 3.0 +
                              (std::cos(k.dot(m.lattice->basis().col(0))) +
                               std::cos(k.dot(m.lattice->basis().col(1)))) / 3.0;
      CHECK(std::abs(characteristic_function(m.kraus, initial, k, 1) - Complex(expected, 0.0)) <
            1e-12);
    }
  }
  SUBCASE("Hermitian symmetry and modulus bound") {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector k = random_momentum(rng);
      const int n = 1 + static_cast<int>(rng.uniform() * 7);
      const Complex plus = characteristic_function(m.kraus, initial, k, n);
      const Complex minus = characteristic_function(m.kraus, initial, (-k).eval(), n);
      CHECK(std::abs(plus - std::conj(minus)) < 1e-12);
      CHECK(std::abs(plus) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("(U_G, identity) trigonometric polynomial at even steps") {
  const ModelSpec m = hexagonal_model(grover_unitary(), Matrix::Identity(3, 3));
  const LatticeState initial = m.initial_state();
  TestRng rng(8);
  for (int half = 1; half <= 8; ++half) {
    const Vector k = random_momentum(rng);
    const double phi1 = k.dot(m.lattice->basis().col(0));
    const double phi2 = k.dot(m.lattice->basis().col(1));
    const double alpha = std::pow(-1.0 / 3.0, half);
    const double expected = (2.0 / 3.0 + alpha / 3.0) +
                            (1.0 - alpha) / 18.0 *
                                (2.0 * std::cos(phi1) + 2.0 * std::cos(phi2) +
                                 2.0 * std::cos(phi2 - phi1));
    const Complex got = characteristic_function(m.kraus, initial, k, 2 * half);
    CHECK(std::abs(got - Complex(expected, 0.0)) < 1e-12);
  }
}

TEST_CASE("dual process equals the transform of the direct evolution") {
  for (const char* name : {"grover-hexagonal", "ug-identity"}) {
    const ModelSpec m = builtin_model(name);
    TestRng rng(9);
    LatticeState s = m.initial_state();
    for (int n = 0; n <= 8; ++n) {
      const auto p = distribution(s);
      for (int trial = 0; trial < 8; ++trial) {
        const Vector k = random_momentum(rng);
        Complex direct = 0.0;
        for (const auto& [x, prob] : p)
          direct += prob * std::exp(Complex(0.0, -k.dot(embed(*m.lattice, x))));
        const Complex dual = characteristic_function(m.kraus, m.initial_state(), k, n);
        CHECK(std::abs(dual - direct) <= 1e-10);
      }
      s = oqrw_step(m.kraus, s);
    }
  }
}

TEST_CASE("invert") {
  const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());

  SUBCASE("one step on an 8-point grid recovers the five-point law") {
    const auto p = invert(m.kraus, m.initial_state(), 1, MomentumGrid{8});
    REQUIRE(p.size() == 5);
    CHECK(p.at(LatticeCoord({0, 0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(p.at(LatticeCoord({1, 0})) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    CHECK(p.at(LatticeCoord({0, -1})) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  }
  SUBCASE("zero steps reproduce the initial distribution") {
    const auto p = invert(m.kraus, m.initial_state(), 0, MomentumGrid{4});
    REQUIRE(p.size() == 1);
    CHECK(p.at(LatticeCoord({0, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("six steps of (U_G, identity) match the direct distribution") {
    const ModelSpec z = builtin_model("ug-identity");
    LatticeState s = z.initial_state();
    for (int i = 0; i < 6; ++i) s = oqrw_step(z.kraus, s);
    const auto direct = distribution(s);
    const auto inverted = invert(z.kraus, z.initial_state(), 6, MomentumGrid{16});
    for (const auto& [x, prob] : direct) {
      const auto it = inverted.find(x);
      const double got = it == inverted.end() ? 0.0 : it->second;
      CHECK(std::abs(got - prob) < 1e-10);
    }
    for (const auto& [x, prob] : inverted) CHECK(direct.count(x));
  }
  SUBCASE("grids at or below 2n alias and are refused") {
    CHECK_THROWS_WITH_AS(invert(m.kraus, m.initial_state(), 4, MomentumGrid{8}),
                         doctest::Contains("aliasing"), std::runtime_error);
    CHECK_NOTHROW(invert(m.kraus, m.initial_state(), 4, MomentumGrid{9}));
  }
  SUBCASE("round trip at the acceptance grid size") {
    LatticeState s = m.initial_state();
    for (int i = 0; i < 5; ++i) s = oqrw_step(m.kraus, s);
    const auto direct = distribution(s);
    const auto inverted = invert(m.kraus, m.initial_state(), 5, MomentumGrid{12});
    for (const auto& [x, prob] : direct) {
      const auto it = inverted.find(x);
      CHECK(std::abs((it == inverted.end() ? 0.0 : it->second) - prob) < 1e-10);
    }
  }
  SUBCASE("off-origin initial sites widen the support bound") {
    const LatticeState shifted = delta_state(LatticeCoord({3, -2}), m.initial_block);
    CHECK_THROWS_WITH_AS(invert(m.kraus, shifted, 2, MomentumGrid{10}),
                         doctest::Contains("aliasing"), std::runtime_error);
    LatticeState s = shifted;
    for (int i = 0; i < 2; ++i) s = oqrw_step(m.kraus, s);
    const auto direct = distribution(s);
    const auto inverted = invert(m.kraus, shifted, 2, MomentumGrid{11});
    for (const auto& [x, prob] : direct)
      CHECK(std::abs(inverted.at(x) - prob) < 1e-10);
  }
}

TEST_CASE("momentum grid nodes are Theta images of the uniform q grid") {
  const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
  const auto nodes = MomentumGrid{4}.nodes(*m.lattice);
  REQUIRE(nodes.size() == 16);
  CHECK(nodes[0].norm() == 0.0);
  Vector q(2);
  q << 0.0, M_PI / 2.0;
  CHECK((nodes[1] - m.lattice->theta_matrix() * q).norm() < 1e-14);
}

TEST_CASE("scaled_cf_limit_probe") {
  SUBCASE("t = 0 is exactly 1") {
    const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
    CHECK(std::abs(scaled_cf_limit_probe(m.kraus, m.initial_state(), Vector::Zero(2), 50) -
                   Complex(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("Grover pair approaches the Gaussian limit") {
    const ModelSpec m = hexagonal_model(grover_unitary(), grover_unitary());
    Vector t(2);
    t << 1.0, 0.0;
    const Complex probe = scaled_cf_limit_probe(m.kraus, m.initial_state(), t, 10000);
    CHECK(std::abs(probe.real() - std::exp(-1.0 / 3.0)) < 1e-2);
  }
  SUBCASE("(U_G, identity) approaches the Dirac limit") {
    const ModelSpec m = builtin_model("ug-identity");
    Vector t(2);
    t << 1.0, 1.0;
    const Complex probe = scaled_cf_limit_probe(m.kraus, m.initial_state(), t, 10000);
    CHECK(std::abs(probe.real() - 1.0) < 1e-2);
  }
}
