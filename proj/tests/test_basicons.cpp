#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "relmix/basicons.hpp"
#include "relmix/ergodic.hpp"
#include "relmix/rng.hpp"

using namespace relmix;
using namespace relmix::testing;

namespace {

struct Built {
  GnsRep gns;
  CondExpectation c;
  BasicConstruction bc;
};

std::unique_ptr<Built> build(const SystemConfig& cfg) {
  auto b = std::make_unique<Built>();
  b->gns = build_gns(cfg.system);
  b->c = cond_expectation(b->gns, make_subsystem(cfg.system, cfg.subsystem));
  b->bc = build_basic_construction(b->gns, b->c);
  return b;
}

SystemConfig with_subsystem(SystemConfig cfg, MatrixStarAlgebra f) {
  cfg.subsystem = std::move(f);
  return cfg;
}

// Dimension of the algebra generated by pi(A) and P, grown by repeated
// multiplication of spanning words until the span stops growing.
Index oracle_generated_dim(const Built& b) {
  std::vector<Matrix> gens;
  for (const auto& e : b.gns.algebra().basis()) gens.push_back(b.gns.pi(e));
  gens.push_back(b.c.P);
  const Index n = b.gns.dim;
  SpanBuilder span(n * n);
  std::vector<Matrix> words{Matrix::Identity(n, n)};
  span.add(vectorize(words[0]));
  while (true) {
    std::vector<Matrix> fresh;
    for (const auto& w : words) {
      for (const auto& g : gens) {
        const Matrix x = w * g;
        if (span.add(vectorize(x))) fresh.push_back(x);
      }
    }
    if (fresh.empty()) break;
    words = std::move(fresh);
  }
  return span.rank();
}

}  // namespace

TEST(BasicConstruction, FullSubsystemCollapsesToA) {
  const auto b = build(hand(0));
  EXPECT_LT(max_abs(b->c.P - Matrix::Identity(4, 4)), 1e-12);
  EXPECT_EQ(b->bc.abar.dim(), 4);
  Rng rng(61);
  for (int t = 0; t < 5; ++t) {
    const Matrix a = random_element(rng, b->gns.algebra().basis());
    EXPECT_NEAR(std::abs(b->bc.mubar(b->gns.pi(a)) - b->gns.mu(a)), 0.0, 1e-12);
  }
}

TEST(BasicConstruction, TrivialSubsystemProjectionHasRankOne) {
  const auto b = build(with_subsystem(hand(0), scalar_algebra(2)));
  EXPECT_NEAR(b->c.P.trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(b->bc.mubar(b->c.P) - 1.0), 0.0, 1e-12);
}

TEST(BasicConstruction, GeneratedDimensionMatchesWordGrowth) {
  const auto b = build(hand(1));
  const Index dim = oracle_generated_dim(*b);
  EXPECT_EQ(b->bc.abar.dim(), dim);
  // M_2 over the diagonal: frozen from the word-growth oracle
  EXPECT_EQ(dim, 8);
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto r = build(random_config(s));
    EXPECT_EQ(r->bc.abar.dim(), oracle_generated_dim(*r)) << s;
    EXPECT_EQ(r->bc.dim_gap, 0) << s;
  }
}

TEST(BasicConstruction, RejectsNonTracialState) {
  const SystemConfig cfg = nontracial_m2();
  const GnsRep g = build_gns(cfg.system);
  const CondExpectation c = cond_expectation(g, make_subsystem(cfg.system, cfg.subsystem));
  EXPECT_THROW(build_basic_construction(g, c), NotTracialError);
}

TEST(Mubar, DefiningFormulaAndRepresentativeIndependence) {
  Rng rng(62);
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto b = build(random_config(s));
    const auto& basis = b->gns.algebra().basis();
    const Matrix& p = b->c.P;
    const Index n = b->gns.dim;
    EXPECT_NEAR(std::abs(b->bc.mubar(Matrix::Zero(n, n))), 0.0, 1e-15);
    for (int t = 0; t < 4; ++t) {
      const Matrix a1 = random_element(rng, basis), b1 = random_element(rng, basis);
      const Matrix a2 = random_element(rng, basis), b2 = random_element(rng, basis);
      const Matrix x1 = b->gns.pi(a1) * p * b->gns.pi(b1);
      const Matrix x2 = b->gns.pi(a2) * p * b->gns.pi(b2);
      EXPECT_NEAR(std::abs(b->bc.mubar(x1) - b->gns.mu(a1 * b1)), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(b->bc.mubar(x1 + x2) - b->gns.mu(a1 * b1) - b->gns.mu(a2 * b2)), 0.0, 1e-10);
      // a second decomposition of x1 + x2: move an F element across P
      const Matrix f = random_element(rng, b->c.f().basis());
      const Matrix y1 = b->gns.pi(a1 * f) * p * b->gns.pi(b1);
      const Matrix y2 = b->gns.pi(a1) * p * b->gns.pi(f * b1);
      EXPECT_LT(max_abs(y1 - y2), 1e-10);
      EXPECT_NEAR(std::abs(b->bc.mubar(y1) - b->bc.mubar(y2)), 0.0, 1e-10);
    }
  }
}

TEST(Mubar, OutsideSpanIsRejected) {
  const auto b = build(hand(1));
  Rng rng(64);
  const Matrix x = rng.gaussian_matrix(4, 4);
  ASSERT_FALSE(b->bc.apa_span.contains(x, 1e-8));
  EXPECT_THROW(b->bc.mubar(x), InputError);
}

TEST(Lemma, HandValues) {
  {
    const auto b = build(hand(1));
    const PredicateReport r = lemma_identity_check(b->bc, unit(2, 0, 1), unit(2, 1, 0), 1);
    EXPECT_TRUE(r.value);
    EXPECT_NEAR(r.values.at("mubar_side"), 0.5, 1e-12);
    EXPECT_NEAR(r.values.at("rwm_term"), 0.5, 1e-12);
  }
  for (int h = 0; h < 3; ++h) {
    const auto b = build(hand(h));
    const Index d = b->gns.system.d();
    const PredicateReport r = lemma_identity_check(b->bc, Matrix::Identity(d, d), Matrix::Identity(d, d), 0);
    EXPECT_TRUE(r.value);
    EXPECT_NEAR(r.values.at("mubar_side"), 1.0, 1e-12);
  }
}

TEST(Lemma, RandomPairsOnRandomSystems) {
  Rng rng(63);
  for (std::uint64_t s = 0; s < 25; ++s) {
    const auto b = build(random_config(s));
    const auto& basis = b->gns.algebra().basis();
    for (int t = 0; t < 2; ++t) {
      const Matrix a = random_element(rng, basis), bb = random_element(rng, basis);
      for (int n = 0; n <= 10; ++n) {
        const PredicateReport r = lemma_identity_check(b->bc, a, bb, n);
        EXPECT_TRUE(r.value) << s << " n=" << n << " residual " << r.max_residual;
      }
    }
  }
}

TEST(BarGns, ResidualsAndGramRank) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const auto b = build(random_config(s));
    const BarGns bar = build_bar_gns(b->bc);
    for (const auto& [k, v] : basic_construction_residuals(b->bc, bar, s)) EXPECT_LE(v, 1e-8) << s << " " << k;
    Eigen::SelfAdjointEigenSolver<Matrix> es(bar.gram);
    const double top = es.eigenvalues().maxCoeff();
    Index rank = 0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 1e-10 * top ? 1 : 0;
    EXPECT_EQ(rank, bar.dim) << s;
  }
}

TEST(BarGns, TrivialSubsystemDimension) {
  const auto b = build(with_subsystem(hand(0), scalar_algebra(2)));
  const BarGns bar = build_bar_gns(b->bc);
  // frozen from the dense eigensolve in ResidualsAndGramRank's oracle
  EXPECT_EQ(bar.dim, 16);
  EXPECT_LT((bar.Ubar * bar.p_class - bar.p_class).norm(), 1e-10);
}

TEST(BarGns, FullSubsystemMatchesGns) {
  const auto b = build(hand(0));
  const BarGns bar = build_bar_gns(b->bc);
  EXPECT_EQ(bar.dim, b->gns.dim);
  // same spectrum for the dynamics
  const auto s1 = unitary_spectrum(bar.Ubar), s2 = unitary_spectrum(b->gns.U);
  ASSERT_EQ(s1.eigenvalues.size(), s2.eigenvalues.size());
  for (std::size_t k = 0; k < s1.eigenvalues.size(); ++k) {
    EXPECT_NEAR(std::abs(s1.eigenvalues[k] - s2.eigenvalues[k]), 0.0, 1e-10);
    EXPECT_EQ(s1.multiplicities[k], s2.multiplicities[k]);
  }
}
