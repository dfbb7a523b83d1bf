#include <gtest/gtest.h>

#include <cmath>

#include "relmix/errors.hpp"
#include "relmix/freegrp.hpp"

using namespace relmix::free;

namespace {

Element l(const std::string& w) { return Element::of(parse_word(w)); }

const ShiftPermAut& swap_ab() {
  static const ShiftPermAut t({1, 0, 2});
  return t;
}

// Inner product sum_g conj(x(g)) y(g) straight from the supports.
ExactComplex l2_inner(const Element& x, const Element& y) {
  ExactComplex s;
  for (const auto& [w, c] : x.support()) s = s + c.conj() * y.coefficient(w);
  return s;
}

Element random_centered(std::uint64_t seed) {
  const Element x = random_element(seed, 3, 0, 4, 3, 3);
  return x - cond_d(x, swap_ab());
}

}  // namespace

TEST(Words, ReductionAndProducts) {
  EXPECT_TRUE((parse_word("a") * parse_word("a^-1")).is_identity());
  const Word ab = parse_word("a") * parse_word("b");
  EXPECT_EQ(ab.length(), 2u);
  EXPECT_EQ(ab, parse_word("a b"));
  EXPECT_EQ(parse_word("a s3 s3^-1 b"), parse_word("a b"));
  EXPECT_EQ(parse_word("a s0 b^-1").inverse(), parse_word("b s0^-1 a^-1"));
  EXPECT_EQ(parse_word("1"), Word());
  EXPECT_THROW(parse_word("q$"), relmix::InputError);
}

TEST(Elements, StarAndConvolution) {
  const Element x = l("a") + l("b");
  EXPECT_EQ(l("a") * l("a^-1"), l("1"));
  EXPECT_EQ((x.star() * x).coefficient(Word()), ExactComplex(2));
  const Element y = ExactComplex(Rational(1, 2), 3) * l("a s1");
  EXPECT_EQ(y.star().coefficient(parse_word("s1^-1 a^-1")), ExactComplex(Rational(1, 2), -3));
  EXPECT_TRUE((x - x).is_zero());
}

TEST(Trace, DeltaAtIdentity) {
  EXPECT_EQ(mu(l("1")), ExactComplex(1));
  EXPECT_EQ(mu(l("a")), ExactComplex(0));
  EXPECT_EQ(mu(l("s0 s0^-1 b b^-1")), ExactComplex(1));
}

TEST(Trace, TracialAndPositiveOnRandomElements) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Element x = random_element(2 * s, 3, -2, 3);
    const Element y = random_element(2 * s + 1, 3, -2, 3);
    EXPECT_EQ(mu(x * y), mu(y * x)) << s;
    EXPECT_EQ(mu(x.star() * y), l2_inner(x, y)) << s;
    EXPECT_EQ(mu(x.star() * x), ExactComplex(l2_inner(x, x).re)) << s;
  }
}

TEST(Automorphism, LetterwiseAction) {
  EXPECT_EQ(swap_ab().apply(l("a s0"), 1), l("b s1"));
  EXPECT_EQ(swap_ab().apply(l("a s0"), 2), l("a s2"));
  EXPECT_EQ(swap_ab().apply(l("b s2"), -2), l("b s0"));
  EXPECT_TRUE(swap_ab().in_k(parse_word("a b a^-1 c")));
  EXPECT_FALSE(swap_ab().in_k(parse_word("a s0")));
  // alpha is multiplicative and preserves mu
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element x = random_element(3 * s, 3, -2, 3), y = random_element(3 * s + 1, 3, -2, 3);
    EXPECT_EQ(swap_ab().apply(x * y, 3), swap_ab().apply(x, 3) * swap_ab().apply(y, 3));
    EXPECT_EQ(mu(swap_ab().apply(x, 5)), mu(x));
  }
}

TEST(ConditionalExpectation, SupportFilter) {
  EXPECT_EQ(cond_d(l("a b a^-1"), swap_ab()), l("a b a^-1"));
  EXPECT_TRUE(cond_d(l("s0"), swap_ab()).is_zero());
  EXPECT_EQ(cond_d(ExactComplex(2) * l("a") + ExactComplex(3) * l("s0 a"), swap_ab()), ExactComplex(2) * l("a"));
}

TEST(ConditionalExpectation, ConditionalExpectationIdentities) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Element x = random_element(4 * s, 3, -1, 2, 4, 3);
    const Element f = cond_d(random_element(4 * s + 1, 3, -1, 2, 4, 3), swap_ab()) + l("a");
    const Element g = cond_d(random_element(4 * s + 2, 3, -1, 2, 4, 3), swap_ab()) + l("c^-1");
    const Element dx = cond_d(x, swap_ab());
    EXPECT_EQ(cond_d(dx, swap_ab()), dx);
    EXPECT_EQ(mu(dx), mu(x));
    EXPECT_EQ(cond_d(f * x * g, swap_ab()), f * dx * g);
    EXPECT_EQ(cond_d(swap_ab().apply(x, 1), swap_ab()), swap_ab().apply(dx, 1));
  }
}

TEST(RwmTerm, Examples) {
  for (long n = 1; n <= 12; ++n) {
    EXPECT_EQ(rwm_term_free(l("s0"), l("s5"), n, swap_ab()), 0) << n;
    EXPECT_EQ(rwm_term_free(l("a"), l("a"), n, swap_ab()), 1) << n;
    EXPECT_EQ(rwm_term_free(l("s0"), l("a b^-1") + ExactComplex(2) * l("c"), n, swap_ab()), 0) << n;
  }
}

TEST(VanishingHorizon, Examples) {
  EXPECT_EQ(vanishing_horizon(l("s0"), l("s5^-1"), swap_ab()), 5);
  EXPECT_EQ(rwm_term_free(l("s0"), l("s5^-1"), 5, swap_ab()), 1);
  EXPECT_EQ(vanishing_horizon(l("s0"), l("a"), swap_ab()), 0);
  EXPECT_EQ(vanishing_horizon(l("s0 s1"), l("1"), swap_ab()), 0);
  EXPECT_THROW(vanishing_horizon(l("a"), l("b"), swap_ab()), relmix::InputError);
}

TEST(VanishingHorizon, DirectEvaluationOnRandomPairs) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Element a = random_centered(2 * s);
    const Element b = random_element(2 * s + 1, 3, 0, 6, 3, 3);
    const long h = vanishing_horizon(a, b, swap_ab());
    EXPECT_LE(h, shift_bound(a, b));
    if (h > 0) EXPECT_GT(rwm_term_free(a, b, h, swap_ab()), 0) << s;
    for (long n = h + 1; n <= h + 25; ++n) EXPECT_EQ(rwm_term_free(a, b, n, swap_ab()), 0) << s << " n=" << n;
    // the term is the squared l2 norm of the K part, computed again from the product
    const long n = std::max(1L, h);
    const Element k_part = cond_d(b * swap_ab().apply(a, n), swap_ab());
    EXPECT_EQ(ExactComplex(rwm_term_free(a, b, n, swap_ab())), l2_inner(k_part, k_part));
  }
}

TEST(CommutatorNorm, Examples) {
  const double r2 = std::sqrt(2.0);
  EXPECT_EQ(commutator_norm(parse_word("a"), parse_word("a"), 2, swap_ab()), 0.0);
  EXPECT_EQ(commutator_norm(parse_word("a"), parse_word("a"), 1, swap_ab()), r2);
  EXPECT_EQ(commutator_norm(parse_word("s0"), parse_word("s5"), 1, swap_ab()), r2);
  EXPECT_EQ(commutator_norm(parse_word("s0"), parse_word("s5"), 5, swap_ab()), 0.0);
  // generators in two separate orbits
  EXPECT_EQ(commutator_norm(parse_word("a"), parse_word("c"), 3, swap_ab()), r2);
  EXPECT_EQ(commutator_norm(parse_word("s0"), parse_word("c"), 7, swap_ab()), r2);
}

TEST(CommutatorNorm, AgreesWithDirectEvaluation) {
  const char* words[] = {"a", "b", "c", "s0", "s1", "a b", "s0 s0", "a^-1", "1", "s2 a s2^-1"};
  for (const char* g : words) {
    for (const char* h : words) {
      for (long n = 0; n <= 3; ++n) {
        const double v = commutator_norm(parse_word(g), parse_word(h), n, swap_ab());
        EXPECT_TRUE(v == 0.0 || v == std::sqrt(2.0));
        EXPECT_NEAR(v, commutator_norm_direct(parse_word(g), parse_word(h), n, swap_ab()), 1e-15)
            << g << " " << h << " " << n;
      }
    }
  }
}

TEST(Subsystem, NoncommutativeAndNonErgodic) {
  EXPECT_NE(l("a") * l("b"), l("b") * l("a"));
  EXPECT_EQ(cond_d(l("a"), swap_ab()), l("a"));
  // alpha^2 fixes l(a): a nonscalar fixed element
  EXPECT_EQ(swap_ab().apply(l("a") + l("b"), 1), l("a") + l("b"));
}

TEST(ExampleChecks, AllPass) {
  for (const auto& r : example_checks(0)) EXPECT_TRUE(r.value) << r.name;
  for (const auto& r : example_checks(7)) EXPECT_TRUE(r.value) << r.name;
}
