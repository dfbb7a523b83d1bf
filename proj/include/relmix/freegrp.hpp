#pragma once

// Finitely supported elements of the group algebra of a free group whose
// generators are a finite permuted set plus a two-sided shifted sequence.
// Coefficients are exact complex rationals.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "relmix/report.hpp"

namespace relmix::free {

using Rational = boost::multiprecision::cpp_rational;

struct ExactComplex {
  Rational re;
  Rational im;

  ExactComplex() = default;
  ExactComplex(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(long r) : re(r), im(0) {}  // NOLINT: integer literals as coefficients

  bool is_zero() const { return re == 0 && im == 0; }
  ExactComplex conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }

  friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) { return a.re == b.re && a.im == b.im; }

  std::string to_string() const;
};

struct Symbol {
  enum class Kind : int { perm = 0, shift = 1 };
  Kind kind = Kind::perm;
  long index = 0;

  static Symbol perm(long i) { return {Kind::perm, i}; }
  static Symbol shift(long k) { return {Kind::shift, k}; }
  bool is_perm() const { return kind == Kind::perm; }

  auto operator<=>(const Symbol&) const = default;
  bool operator==(const Symbol&) const = default;
};

struct Letter {
  Symbol symbol;
  int exponent = 1;  // +1 or -1

  auto operator<=>(const Letter&) const = default;
  bool operator==(const Letter&) const = default;
};

/// Reduced word; the empty word is the identity.
class Word {
 public:
  Word() = default;
  /// Reduces the given letters.
  explicit Word(const std::vector<Letter>& letters);
  static Word of(Symbol s, int exponent = 1) { return Word({Letter{s, exponent}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }
  std::size_t length() const { return letters_.size(); }
  Word inverse() const;

  friend Word operator*(const Word& a, const Word& b);
  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

  /// Letters of the permuted set print as a, b, c, ...; shifts as s<k>.
  std::string to_string() const;

 private:
  std::vector<Letter> letters_;
};

/// Parses words such as "a s0 b^-1 s5^-1" or "1".
Word parse_word(const std::string& text);

class Element {
 public:
  Element() = default;
  static Element of(const Word& w, ExactComplex c = 1);

  const std::map<Word, ExactComplex>& support() const { return support_; }
  ExactComplex coefficient(const Word& w) const;
  bool is_zero() const { return support_.empty(); }

  Element star() const;
  friend Element operator+(const Element& x, const Element& y);
  friend Element operator-(const Element& x, const Element& y);
  friend Element operator*(const Element& x, const Element& y);
  friend Element operator*(const ExactComplex& c, const Element& x);
  bool operator==(const Element&) const = default;

  /// Largest / smallest shift index in the support, if any shift letter occurs.
  bool has_shift() const;
  long max_shift() const;
  long min_shift() const;

  std::string to_string() const;

 private:
  void add(const Word& w, const ExactComplex& c);
  std::map<Word, ExactComplex> support_;
};

/// T: Perm(i) -> Perm(perm[i]), Shift(k) -> Shift(k + 1).
struct ShiftPermAut {
  std::vector<long> perm;

  explicit ShiftPermAut(std::vector<long> p);
  std::size_t perm_size() const { return perm.size(); }

  Symbol apply(Symbol s, long n) const;
  Word apply(const Word& w, long n) const;
  Element apply(const Element& x, long n) const;
  /// g has a finite T-orbit, i.e. every letter is in the permuted set.
  bool in_k(const Word& g) const;
};

/// Coefficient at the identity.
ExactComplex mu(const Element& x);

/// Restriction of the support to K.
Element cond_d(const Element& x, const ShiftPermAut& t);

/// lambda(|D(b alpha^n(a))|^2) = sum over g in K of |(b alpha^n(a))(g)|^2.
Rational rwm_term_free(const Element& a, const Element& b, long n, const ShiftPermAut& t);

/// max(0, max shift index of b - min shift index of a): beyond it no shift
/// letter of alpha^n(a) can cancel against b.
long shift_bound(const Element& a, const Element& b);

/// Last n >= 1 with D(b alpha^n(a)) != 0, or 0; verified to vanish on the
/// five following n. InputError unless D(a) = 0.
long vanishing_horizon(const Element& a, const Element& b, const ShiftPermAut& t);

/// |[alpha^n(l(g)), l(h)] Omega|: 0 when T^n(g) and h commute, sqrt(2) otherwise.
double commutator_norm(const Word& g, const Word& h, long n, const ShiftPermAut& t);

/// The same norm computed from the commutator element, sqrt(mu(c* c)).
double commutator_norm_direct(const Word& g, const Word& h, long n, const ShiftPermAut& t);

/// Seeded random element with small integer coefficients, letters drawn from
/// the permuted set and shifts in [shift_lo, shift_hi].
Element random_element(std::uint64_t seed, std::size_t perm_size, long shift_lo, long shift_hi,
                       std::size_t terms = 3, std::size_t max_len = 3);

/// The exact checks of the free-group example: conditional expectation on
/// hand words, traciality, vanishing horizons and commutator norms.
std::vector<PredicateReport> example_checks(std::uint64_t seed);

}  // namespace relmix::free
