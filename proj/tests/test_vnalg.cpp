#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "helpers.hpp"
#include "relmix/rng.hpp"
#include "relmix/vnalg.hpp"

using namespace relmix;
using relmix::testing::diag;
using relmix::testing::I;
using relmix::testing::unit;

namespace {

MatrixStarAlgebra diagonal2() { return block_diagonal_algebra({1, 1}); }

std::vector<Matrix> random_generators(Rng& rng, Index d, int count) {
  std::vector<Matrix> g;
  for (int i = 0; i < count; ++i) {
    Matrix m = rng.gaussian_matrix(d, d);
    // sparsify some entries so the generated algebra is often proper
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        if (rng.below(3) == 0) m(r, c) = 0.0;
      }
    }
    if (rng.below(2) == 0) {
      // block diagonal generator
      const Index cut = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
      m.topRightCorner(cut, d - cut).setZero();
      m.bottomLeftCorner(d - cut, cut).setZero();
    }
    g.push_back(m);
  }
  return g;
}

}  // namespace

TEST(GenerateAlgebra, Examples) {
  EXPECT_EQ(generate_algebra(std::vector<Matrix>{}, 2).dim(), 1);
  EXPECT_EQ(generate_algebra(std::vector<Matrix>{unit(2, 0, 1)}, 2).dim(), 4);
  const MatrixStarAlgebra d = generate_algebra(std::vector<Matrix>{diag({1, 2})}, 2);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_LT(span_distance(d, diagonal2()), 1e-10);
}

TEST(GenerateAlgebra, RandomGeneratorsGiveStarAlgebras) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(6));
    const int k = static_cast<int>(rng.below(4));
    const auto gens = random_generators(rng, d, k);
    const MatrixStarAlgebra a = generate_algebra(gens, d);
    EXPECT_LE(closure_defect(a), 1e-8) << "d=" << d << " k=" << k;
    EXPECT_TRUE(a.contains_unit());
    for (const auto& g : gens) EXPECT_TRUE(a.contains(g, 1e-8));
  }
}

TEST(Commutant, Examples) {
  EXPECT_EQ(commutant(scalar_algebra(2)).dim(), 4);
  const MatrixStarAlgebra c = commutant(diagonal2());
  EXPECT_LT(span_distance(c, diagonal2()), 1e-10);

  // left multiplications of M_2 on its 4-dimensional GNS space
  std::vector<Matrix> left;
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) left.push_back(Eigen::kroneckerProduct(Matrix::Identity(2, 2), unit(2, i, j)).eval());
  }
  const MatrixStarAlgebra l = MatrixStarAlgebra::from_span(4, left);
  const MatrixStarAlgebra lc = commutant(l);
  EXPECT_EQ(lc.dim(), 4);
  // the commutant is the right multiplications
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      EXPECT_TRUE(lc.contains(Eigen::kroneckerProduct(unit(2, i, j), Matrix::Identity(2, 2)).eval()));
    }
  }
}

TEST(Commutant, DoubleCommutantOfGeneratedAlgebras) {
  Rng rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(5));
    const auto gens = random_generators(rng, d, 1 + static_cast<int>(rng.below(3)));
    const MatrixStarAlgebra a = generate_algebra(gens, d);
    EXPECT_LT(span_distance(commutant(commutant(a)), a), 1e-8) << "d=" << d;
  }
}

TEST(Center, BlockDiagonal) {
  const MatrixStarAlgebra a = block_diagonal_algebra({2, 1});
  EXPECT_EQ(center(a).dim(), 2);
  EXPECT_EQ(center(full_algebra(3)).dim(), 1);
}

TEST(FixedAlgebra, Examples) {
  const MatrixStarAlgebra m2 = full_algebra(2);
  EXPECT_EQ(fixed_algebra(m2, identity_automorphism(m2)).dim(), 4);

  const MatrixStarAlgebra f = fixed_algebra(m2, inner_automorphism(m2, diag({1, I})));
  EXPECT_LT(span_distance(f, diagonal2()), 1e-10);

  const MatrixStarAlgebra c2 = diagonal2();
  const MatrixStarAlgebra swapped = fixed_algebra(c2, block_permutation_automorphism(c2, {1, 1}, {1, 0}));
  EXPECT_EQ(swapped.dim(), 1);
  EXPECT_TRUE(swapped.contains_unit());
}

TEST(FixedAlgebra, RandomInnerAutomorphismsGiveStarAlgebras) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + static_cast<Index>(rng.below(3));
    const MatrixStarAlgebra a = full_algebra(d);
    // low order unitary so the fixed algebra is large
    Vector phases(d);
    for (Index i = 0; i < d; ++i) phases(i) = std::pow(I, static_cast<int>(rng.below(4)));
    const Matrix v = haar_unitary(rng, d);
    const Matrix u = v * phases.asDiagonal() * v.adjoint();
    const MatrixStarAlgebra f = fixed_algebra(a, inner_automorphism(a, u));
    EXPECT_LE(closure_defect(f), 1e-8);
    for (const auto& x : f.basis()) EXPECT_LT(max_abs(u * x - x * u), 1e-8);
  }
}

TEST(ValidateState, Examples) {
  const MatrixStarAlgebra m2 = full_algebra(2);
  EXPECT_TRUE(validate_state(m2, Matrix::Identity(2, 2) / 2.0).is_trace);
  try {
    validate_state(m2, diag({1, 0}));
    FAIL() << "singular density accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not faithful"), std::string::npos);
  }
  EXPECT_THROW(validate_state(m2, Matrix::Identity(2, 2)), ValidationError);
  EXPECT_TRUE(validate_state(diagonal2(), diag({2.0 / 3, 1.0 / 3})).is_trace);
  EXPECT_FALSE(validate_state(m2, diag({2.0 / 3, 1.0 / 3})).is_trace);
}

TEST(ValidateAutomorphism, Examples) {
  const MatrixStarAlgebra m2 = full_algebra(2);
  const StateSpec tr = normalized_trace(2);
  Rng rng(24);
  EXPECT_NO_THROW(validate_automorphism(m2, inner_automorphism(m2, haar_unitary(rng, 2)), tr));
  EXPECT_NO_THROW(validate_automorphism(m2, inner_automorphism(m2, diag({1, I})), tr));

  std::vector<Matrix> images;
  for (const auto& b : m2.basis()) images.push_back(b);
  // e12 -> 2 e12, the other matrix units fixed
  std::vector<Matrix> units{unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 0), unit(2, 1, 1)};
  std::vector<Matrix> unit_images = units;
  unit_images[1] *= 2.0;
  const MatrixStarAlgebra by_units = MatrixStarAlgebra::from_span(2, units);
  // express the map on the algebra's own basis
  std::vector<Matrix> mapped;
  for (const auto& b : by_units.basis()) {
    Matrix img = Matrix::Zero(2, 2);
    for (std::size_t k = 0; k < units.size(); ++k) img += hs_inner(units[k], b) * unit_images[k];
    mapped.push_back(img);
  }
  EXPECT_THROW(validate_automorphism(by_units, linear_map_automorphism(by_units, mapped), tr), ValidationError);
}

TEST(ValidateAutomorphism, NonInvariantStateRejected) {
  const MatrixStarAlgebra c2 = diagonal2();
  const StateSpec rho = validate_state(c2, diag({2.0 / 3, 1.0 / 3}));
  EXPECT_THROW(validate_automorphism(c2, block_permutation_automorphism(c2, {1, 1}, {1, 0}), rho), ValidationError);
}

TEST(ModularInvariance, Examples) {
  const MatrixStarAlgebra m2 = full_algebra(2);
  EXPECT_TRUE(modular_invariance_check(generate_algebra(std::vector<Matrix>{unit(2, 0, 1) + unit(2, 1, 0)}, 2),
                                       normalized_trace(2)));
  const StateSpec rho{diag({2.0 / 3, 1.0 / 3}), false};
  EXPECT_TRUE(modular_invariance_check(diagonal2(), rho));
  const std::vector<Matrix> flip{Matrix::Identity(2, 2), unit(2, 0, 1) + unit(2, 1, 0)};
  EXPECT_FALSE(modular_invariance_check(MatrixStarAlgebra::from_span(2, flip), rho));
}

TEST(Subsystem, AlphaInvariantAndDimensionPreserved) {
  Rng rng(25);
  for (int trial = 0; trial < 15; ++trial) {
    const Index d = 2 + static_cast<Index>(rng.below(3));
    const MatrixStarAlgebra a = full_algebra(d);
    const Matrix u = haar_unitary(rng, d);
    const SystemSpec sys = make_system(a, Matrix::Identity(d, d) / static_cast<double>(d), inner_automorphism(a, u));
    Matrix h = rng.gaussian_matrix(d, d);
    h = (h + h.adjoint()).eval();
    const MatrixStarAlgebra f = generate_algebra(alpha_orbit(sys.alpha, h, 2 * d * d), d);
    const Subsystem sub = make_subsystem(sys, f);
    Index image_rank = 0;
    std::vector<Matrix> images;
    for (const auto& x : f.basis()) {
      const Matrix y = sys.alpha.apply(x);
      EXPECT_TRUE(f.contains(y, 1e-8));
      images.push_back(y);
    }
    image_rank = MatrixStarAlgebra::from_span(d, images).dim();
    EXPECT_EQ(image_rank, f.dim());
    EXPECT_EQ(sub.phi.rows(), f.dim());
  }
}

TEST(Subsystem, RejectsNonInvariantSubalgebra) {
  const MatrixStarAlgebra m2 = full_algebra(2);
  const Matrix swap = unit(2, 0, 1) + unit(2, 1, 0);
  const SystemSpec sys = make_system(m2, Matrix::Identity(2, 2) / 2.0, inner_automorphism(m2, swap));
  // diag(1,0) is mapped to diag(0,1): fine. A rotation is not.
  const Matrix rot = (Matrix(2, 2) << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3)).finished();
  const SystemSpec sys2 = make_system(m2, Matrix::Identity(2, 2) / 2.0, inner_automorphism(m2, rot));
  EXPECT_NO_THROW(make_subsystem(sys, diagonal2()));
  EXPECT_THROW(make_subsystem(sys2, diagonal2()), ValidationError);
}
