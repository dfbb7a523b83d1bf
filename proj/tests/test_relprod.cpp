#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "relmix/relprod.hpp"
#include "relmix/rng.hpp"

using namespace relmix;
using namespace relmix::testing;

namespace {

// Everything a ProductGns points into, kept alive together.
struct Joining {
  GnsRep gns;
  CondExpectation c;
  MirrorData mirror;
  ProductGns p;
};

std::unique_ptr<Joining> join(const SystemConfig& cfg) {
  auto j = std::make_unique<Joining>();
  j->gns = build_gns(cfg.system);
  j->c = cond_expectation(j->gns, make_subsystem(cfg.system, cfg.subsystem));
  j->mirror = mirror_system(j->gns, j->c);
  j->p = build_product_gns(j->gns, j->mirror, j->c);
  return j;
}

SystemConfig with_subsystem(SystemConfig cfg, MatrixStarAlgebra f) {
  cfg.subsystem = std::move(f);
  return cfg;
}

// Gram matrix of the basis pairs assembled from omega_eval on products.
Matrix oracle_gram(const Joining& j) {
  const auto& a = j.gns.algebra().basis();
  const auto& b = j.mirror.a_prime.basis();
  const Index n = static_cast<Index>(a.size() * b.size());
  Matrix g(n, n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t l = 0; l < a.size(); ++l) {
        for (std::size_t m = 0; m < b.size(); ++m) {
          const Index r = static_cast<Index>(i * b.size() + k), c = static_cast<Index>(l * b.size() + m);
          g(r, c) = omega_eval(j.gns, j.c, TensorElement::simple(a[i].adjoint() * a[l], b[k].adjoint() * b[m]));
        }
      }
    }
  }
  return g;
}

Index numerical_rank(const Matrix& herm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  const RealVector ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  Index r = 0;
  for (Index i = 0; i < ev.size(); ++i) r += ev(i) > 1e-10 * top ? 1 : 0;
  return r;
}

// Product relative ergodicity decided from a direct eigensolve of W.
bool oracle_product_ergodic(const ProductGns& p) {
  Eigen::ComplexEigenSolver<Matrix> es(p.W);
  SpanBuilder fixed(p.dim);
  for (Index i = 0; i < p.dim; ++i) {
    if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-8) fixed.add(es.eigenvectors().col(i));
  }
  const Matrix f = fixed.basis();
  return f.cols() == 0 || max_abs(f - p.R * f) < 1e-7;
}

}  // namespace

TEST(Omega, Examples) {
  Rng rng(41);
  for (int h = 0; h < 3; ++h) {
    const auto j = join(hand(h));
    const Index n = j->gns.dim;
    for (int t = 0; t < 5; ++t) {
      const Matrix a = random_element(rng, j->gns.algebra().basis());
      const Matrix b = random_element(rng, j->mirror.a_prime.basis());
      EXPECT_NEAR(std::abs(omega_eval(j->gns, j->c, TensorElement::simple(a, Matrix::Identity(n, n))) -
                           j->gns.mu(a)),
                  0.0, 1e-12);
      EXPECT_NEAR(std::abs(omega_eval(j->gns, j->c, TensorElement::simple(Matrix::Identity(j->gns.system.d(), j->gns.system.d()), b)) -
                           mu_prime(j->gns, b)),
                  0.0, 1e-12);
    }
  }
  // F = C1 factorizes
  {
    const auto j = join(with_subsystem(hand(0), scalar_algebra(2)));
    for (int t = 0; t < 5; ++t) {
      const Matrix a = random_element(rng, j->gns.algebra().basis());
      const Matrix b = random_element(rng, j->mirror.a_prime.basis());
      EXPECT_NEAR(std::abs(omega_eval(j->gns, j->c, TensorElement::simple(a, b)) - j->gns.mu(a) * mu_prime(j->gns, b)),
                  0.0, 1e-12);
    }
  }
  // D(e12) = 0 for the diagonal subsystem
  {
    const auto j = join(hand(1));
    for (const auto& b : j->mirror.a_prime.basis()) {
      EXPECT_NEAR(std::abs(omega_eval(j->gns, j->c, TensorElement::simple(unit(2, 0, 1), b))), 0.0, 1e-12);
    }
  }
}

TEST(ProductGns, ScalarAlgebra) {
  SystemConfig cfg;
  const MatrixStarAlgebra a = scalar_algebra(1);
  cfg.system = make_system(a, Matrix::Identity(1, 1), identity_automorphism(a));
  cfg.subsystem = a;
  const auto j = join(cfg);
  EXPECT_EQ(j->p.dim, 1);
  EXPECT_NEAR(std::abs(j->p.W(0, 0) - 1.0), 0.0, 1e-12);
}

TEST(ProductGns, GramMatchesOracleAndRank) {
  for (int h = 0; h < 3; ++h) {
    const auto j = join(hand(h));
    const Matrix g = oracle_gram(*j);
    EXPECT_LT(max_abs(g - j->p.gram), 1e-12);
    EXPECT_EQ(numerical_rank(g), j->p.dim);
  }
  // M_2 over the diagonal: dim H_omega is 8 (frozen from the dense eigensolve above)
  EXPECT_EQ(join(hand(1))->p.dim, 8);
}

TEST(ProductGns, FullSubsystemGivesHLambdaEqualHMu) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    SystemConfig cfg = random_config(s);
    cfg.subsystem = cfg.system.algebra;
    const auto j = join(cfg);
    EXPECT_LT(span_distance(j->p.h_lambda, j->p.h_mu), 1e-8) << s;
  }
}

TEST(ProductGns, ProductErgodicityHandInstances) {
  EXPECT_TRUE(product_relatively_ergodic(join(hand(0))->p, 1e-7).value);
  EXPECT_FALSE(product_relatively_ergodic(join(hand(1))->p, 1e-7).value);
  EXPECT_FALSE(product_relatively_ergodic(join(hand(2))->p, 1e-7).value);
}

TEST(ProductGns, ProductErgodicityAgreesWithDirectEigensolve) {
  for (int h = 0; h < 3; ++h) {
    const auto j = join(hand(h));
    EXPECT_EQ(product_relatively_ergodic(j->p, 1e-7).value, oracle_product_ergodic(j->p)) << h;
  }
  for (std::uint64_t s = 0; s < 15; ++s) {
    const auto j = join(random_config(s));
    EXPECT_EQ(product_relatively_ergodic(j->p, 1e-7).value, oracle_product_ergodic(j->p)) << s;
  }
}

TEST(ProductGns, JoiningResidualsOnSuite) {
  std::vector<SystemConfig> cfgs{hand(0), hand(1), hand(2), nontracial_m2()};
  for (std::uint64_t s = 0; s < 25; ++s) cfgs.push_back(random_config(s));
  for (const auto& cfg : cfgs) {
    const auto j = join(cfg);
    for (const auto& [k, v] : joining_residuals(j->p)) EXPECT_LE(v, 1e-7) << cfg.name << " " << k;
  }
}

TEST(ProductGns, KernelTensorsOrthogonalToHLambda) {
  Rng rng(42);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto j = join(random_config(s));
    const auto kernel = kernel_basis(j->c);
    if (kernel.empty()) continue;
    for (int t = 0; t < 5; ++t) {
      const Matrix a = random_element(rng, kernel);
      EXPECT_LT(max_abs(j->c.apply(a)), 1e-10);
      const Matrix b = random_element(rng, j->mirror.a_prime.basis());
      const Vector v = j->p.embed(TensorElement::simple(a, b));
      EXPECT_LT((j->p.h_lambda.basis.adjoint() * v).norm(), 1e-7) << s;
    }
  }
}

TEST(ProductGns, ConditionalExpectationIsProjectionOntoHLambda) {
  Rng rng(43);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto j = join(random_config(s));
    for (int t = 0; t < 5; ++t) {
      const Matrix a = random_element(rng, j->gns.algebra().basis());
      const Matrix b = random_element(rng, j->mirror.a_prime.basis());
      const Vector lhs = j->p.embed(TensorElement::simple(j->c.apply(a), d_tilde(j->gns, j->c, b)));
      const Vector rhs = j->p.R * j->p.embed(TensorElement::simple(a, b));
      EXPECT_LT((lhs - rhs).norm(), 1e-7) << s;
    }
  }
}
