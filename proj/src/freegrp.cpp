#include "relmix/freegrp.hpp"

#include <cmath>
#include <cstdlib>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "relmix/errors.hpp"
#include "relmix/rng.hpp"

namespace relmix::free {

std::string ExactComplex::to_string() const {
  std::ostringstream os;
  if (im == 0) {
    os << re;
  } else if (re == 0) {
    os << im << "i";
  } else {
    os << "(" << re << (im < 0 ? "-" : "+") << (im < 0 ? Rational(-im) : im) << "i)";
  }
  return os.str();
}

Word::Word(const std::vector<Letter>& letters) {
  for (const auto& l : letters) {
    if (l.exponent != 1 && l.exponent != -1) throw InputError("word: exponent must be +1 or -1");
    if (!letters_.empty() && letters_.back().symbol == l.symbol && letters_.back().exponent == -l.exponent) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& l : out) l.exponent = -l.exponent;
  Word w;
  w.letters_ = std::move(out);
  return w;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> all = a.letters_;
  all.insert(all.end(), b.letters_.begin(), b.letters_.end());
  return Word(all);
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string out;
  for (const auto& l : letters_) {
    if (!out.empty()) out += ' ';
    if (l.symbol.is_perm()) {
      const long i = l.symbol.index;
      out += i < 26 ? std::string(1, static_cast<char>('a' + i)) : "p" + std::to_string(i);
    } else {
      out += "s" + std::to_string(l.symbol.index);
    }
    if (l.exponent < 0) out += "^-1";
  }
  return out;
}

Word parse_word(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::vector<Letter> letters;
  while (is >> tok) {
    if (tok == "1") continue;
    int exponent = 1;
    if (tok.size() > 3 && tok.ends_with("^-1")) {
      exponent = -1;
      tok.resize(tok.size() - 3);
    }
    Symbol s;
    try {
      if (tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'r') {
        s = Symbol::perm(tok[0] - 'a');
      } else if (tok.size() > 1 && tok[0] == 's') {
        std::size_t used = 0;
        s = Symbol::shift(std::stol(tok.substr(1), &used));
        if (used != tok.size() - 1) throw std::invalid_argument(tok);
      } else if (tok.size() > 1 && tok[0] == 'p') {
        std::size_t used = 0;
        s = Symbol::perm(std::stol(tok.substr(1), &used));
        if (used != tok.size() - 1) throw std::invalid_argument(tok);
      } else {
        throw std::invalid_argument(tok);
      }
    } catch (const std::logic_error&) {
      throw InputError("word: cannot parse letter '" + tok + "'");
    }
    letters.push_back({s, exponent});
  }
  return Word(letters);
}

Element Element::of(const Word& w, ExactComplex c) {
  Element e;
  e.add(w, c);
  return e;
}

void Element::add(const Word& w, const ExactComplex& c) {
  if (c.is_zero()) return;
  auto it = support_.find(w);
  if (it == support_.end()) {
    support_.emplace(w, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) support_.erase(it);
}

ExactComplex Element::coefficient(const Word& w) const {
  auto it = support_.find(w);
  return it == support_.end() ? ExactComplex() : it->second;
}

Element Element::star() const {
  Element out;
  for (const auto& [w, c] : support_) out.add(w.inverse(), c.conj());
  return out;
}

Element operator+(const Element& x, const Element& y) {
  Element out = x;
  for (const auto& [w, c] : y.support_) out.add(w, c);
  return out;
}

Element operator-(const Element& x, const Element& y) {
  Element out = x;
  for (const auto& [w, c] : y.support_) out.add(w, ExactComplex() - c);
  return out;
}

Element operator*(const Element& x, const Element& y) {
  Element out;
  for (const auto& [u, cu] : x.support_) {
    for (const auto& [v, cv] : y.support_) out.add(u * v, cu * cv);
  }
  return out;
}

Element operator*(const ExactComplex& c, const Element& x) {
  Element out;
  for (const auto& [w, cw] : x.support_) out.add(w, c * cw);
  return out;
}

bool Element::has_shift() const {
  for (const auto& [w, c] : support_) {
    for (const auto& l : w.letters()) {
      if (!l.symbol.is_perm()) return true;
    }
  }
  return false;
}

long Element::max_shift() const {
  bool found = false;
  long m = 0;
  for (const auto& [w, c] : support_) {
    for (const auto& l : w.letters()) {
      if (l.symbol.is_perm()) continue;
      m = found ? std::max(m, l.symbol.index) : l.symbol.index;
      found = true;
    }
  }
  if (!found) throw InputError("max_shift: no shift letters");
  return m;
}

long Element::min_shift() const {
  bool found = false;
  long m = 0;
  for (const auto& [w, c] : support_) {
    for (const auto& l : w.letters()) {
      if (l.symbol.is_perm()) continue;
      m = found ? std::min(m, l.symbol.index) : l.symbol.index;
      found = true;
    }
  }
  if (!found) throw InputError("min_shift: no shift letters");
  return m;
}

std::string Element::to_string() const {
  if (support_.empty()) return "0";
  std::string out;
  for (const auto& [w, c] : support_) {
    if (!out.empty()) out += " + ";
    out += c.to_string() + "*l(" + w.to_string() + ")";
  }
  return out;
}

ShiftPermAut::ShiftPermAut(std::vector<long> p) : perm(std::move(p)) {
  std::vector<bool> seen(perm.size(), false);
  for (long v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)]) {
      throw InputError("shift-permutation automorphism: perm is not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Symbol ShiftPermAut::apply(Symbol s, long n) const {
  if (!s.is_perm()) return Symbol::shift(s.index + n);
  if (s.index < 0 || static_cast<std::size_t>(s.index) >= perm.size()) {
    throw InputError("symbol index outside the permuted set");
  }
  long i = s.index;
  if (n >= 0) {
    for (long k = 0; k < n; ++k) i = perm[static_cast<std::size_t>(i)];
  } else {
    for (long k = 0; k < -n; ++k) {
      for (std::size_t j = 0; j < perm.size(); ++j) {
        if (perm[j] == i) {
          i = static_cast<long>(j);
          break;
        }
      }
    }
  }
  return Symbol::perm(i);
}

Word ShiftPermAut::apply(const Word& w, long n) const {
  std::vector<Letter> out;
  for (const auto& l : w.letters()) out.push_back({apply(l.symbol, n), l.exponent});
  return Word(out);
}

Element ShiftPermAut::apply(const Element& x, long n) const {
  Element out;
  for (const auto& [w, c] : x.support()) out = out + Element::of(apply(w, n), c);
  return out;
}

bool ShiftPermAut::in_k(const Word& g) const {
  for (const auto& l : g.letters()) {
    if (!l.symbol.is_perm()) return false;
  }
  return true;
}

ExactComplex mu(const Element& x) { return x.coefficient(Word()); }

Element cond_d(const Element& x, const ShiftPermAut& t) {
  Element out;
  for (const auto& [w, c] : x.support()) {
    if (t.in_k(w)) out = out + Element::of(w, c);
  }
  return out;
}

Rational rwm_term_free(const Element& a, const Element& b, long n, const ShiftPermAut& t) {
  const Element d = cond_d(b * t.apply(a, n), t);
  Rational sum = 0;
  for (const auto& [w, c] : d.support()) sum += c.norm2();
  return sum;
}

long shift_bound(const Element& a, const Element& b) {
  if (!a.has_shift() || !b.has_shift()) return 0;
  return std::max(0L, b.max_shift() - a.min_shift());
}

long vanishing_horizon(const Element& a, const Element& b, const ShiftPermAut& t) {
  if (!cond_d(a, t).is_zero()) throw InputError("vanishing_horizon: D(a) != 0 (pass a - D(a))");
  const long bound = shift_bound(a, b);
  long last = 0;
  for (long n = 1; n <= bound; ++n) {
    if (rwm_term_free(a, b, n, t) != 0) last = n;
  }
  for (long n = bound + 1; n <= bound + 5; ++n) {
    if (rwm_term_free(a, b, n, t) != 0) {
      throw InternalError("vanishing_horizon: D(b alpha^n(a)) != 0 at n = " + std::to_string(n));
    }
  }
  return last;
}

double commutator_norm(const Word& g, const Word& h, long n, const ShiftPermAut& t) {
  const Word tg = t.apply(g, n);
  return tg * h == h * tg ? 0.0 : std::sqrt(2.0);
}

double commutator_norm_direct(const Word& g, const Word& h, long n, const ShiftPermAut& t) {
  const Element x = Element::of(t.apply(g, n));
  const Element y = Element::of(h);
  const Element c = x * y - y * x;
  return std::sqrt(mu(c.star() * c).re.convert_to<double>());
}

Element random_element(std::uint64_t seed, std::size_t perm_size, long shift_lo, long shift_hi,
                       std::size_t terms, std::size_t max_len) {
  Rng rng(seed);
  Element out;
  const std::uint64_t shifts = static_cast<std::uint64_t>(shift_hi - shift_lo + 1);
  for (std::size_t k = 0; k < terms; ++k) {
    std::vector<Letter> letters;
    const std::size_t len = 1 + rng.below(max_len);
    for (std::size_t i = 0; i < len; ++i) {
      Symbol s;
      if (rng.below(2) == 0 && perm_size > 0) {
        s = Symbol::perm(static_cast<long>(rng.below(perm_size)));
      } else {
        s = Symbol::shift(shift_lo + static_cast<long>(rng.below(shifts)));
      }
      letters.push_back({s, rng.below(2) == 0 ? 1 : -1});
    }
    const ExactComplex c(Rational(static_cast<long>(rng.below(7)) - 3, 1 + static_cast<long>(rng.below(3))),
                         Rational(static_cast<long>(rng.below(5)) - 2));
    out = out + Element::of(Word(letters), c);
  }
  return out;
}

std::vector<PredicateReport> example_checks(std::uint64_t seed) {
  std::vector<PredicateReport> out;
  const ShiftPermAut t({1, 0, 2});  // a <-> b, c fixed, s_k -> s_{k+1}

  {
    PredicateReport r;
    r.name = "free_conditional_expectation_formula";
    r.tolerance = 0.0;
    struct Case {
      const char* word;
      bool in_k;
    };
    const Case cases[] = {
        {"1", true},           {"a", true},           {"b", true},         {"a b a^-1", true},
        {"s0", false},         {"a s0", false},       {"s0 a s0^-1", false}, {"s3^-1", false},
        {"b^-1 a^-1", true},   {"a a a", true},       {"c", true},         {"a c b", true},
        {"s-2", false},        {"a s1 b", false},     {"s0 s0^-1", true},  {"a s2 s2^-1 b", true},
        {"b s5 s6", false},    {"c^-1 a^-1 b^-1 c", true}, {"s0^-1 a", false}, {"a^-1 b s4^-1 s4 a", true},
    };
    for (const auto& cs : cases) {
      const Word w = parse_word(cs.word);
      const Element x = Element::of(w);
      const Element expected = cs.in_k ? x : Element();
      r.observe(std::string("D(l(") + cs.word + "))", cond_d(x, t) == expected ? 0.0 : 1.0);
    }
    const Element mixed = ExactComplex(2) * Element::of(parse_word("a")) +
                          ExactComplex(3) * Element::of(parse_word("s0 a"));
    r.observe("D(2l(a) + 3l(s0 a))",
              cond_d(mixed, t) == ExactComplex(2) * Element::of(parse_word("a")) ? 0.0 : 1.0);
    r.values["words"] = static_cast<double>(std::size(cases));
    r.finish();
    out.push_back(r);
  }

  {
    PredicateReport r;
    r.name = "free_trace";
    r.tolerance = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Element x = random_element(seed * 1000 + 2 * i, 3, -2, 3);
      const Element y = random_element(seed * 1000 + 2 * i + 1, 3, -2, 3);
      const ExactComplex diff = mu(x * y) - mu(y * x);
      r.observe("pair " + std::to_string(i), std::sqrt(diff.norm2().convert_to<double>()));
      Rational sq = 0;
      for (const auto& [w, c] : x.support()) sq += c.norm2();
      const ExactComplex gap = mu(x.star() * x) - ExactComplex(sq);
      r.observe("mu(x* x) pair " + std::to_string(i), std::sqrt(gap.norm2().convert_to<double>()));
    }
    r.finish();
    out.push_back(r);
  }

  {
    PredicateReport r;
    r.name = "free_vanishing_horizon";
    r.tolerance = 0.0;
    struct Fixed {
      const char* a;
      const char* b;
      long expected;
    };
    const Fixed fixed[] = {{"s0", "s5^-1", 5}, {"s0", "a", 0}, {"s0 s1", "1", 0}};
    std::vector<std::pair<Element, Element>> pairs;
    for (const auto& f : fixed) {
      const Element a = Element::of(parse_word(f.a)), b = Element::of(parse_word(f.b));
      r.observe(std::string("horizon(") + f.a + ", " + f.b + ")",
                static_cast<double>(std::labs(vanishing_horizon(a, b, t) - f.expected)));
      pairs.emplace_back(a, b);
    }
    for (int i = 0; pairs.size() < 20; ++i) {
      const Element raw = random_element(seed * 7919 + 3 * i, 3, 0, 4);
      const Element a = raw - cond_d(raw, t);
      const Element b = random_element(seed * 7919 + 3 * i + 1, 3, -1, 6);
      if (a.is_zero()) continue;
      pairs.emplace_back(a, b);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [a, b] = pairs[i];
      const long n0 = vanishing_horizon(a, b, t);
      double bad = 0.0;
      for (long n = n0 + 1; n <= n0 + 20; ++n) {
        if (rwm_term_free(a, b, n, t) != 0) bad += 1.0;
      }
      if (n0 > 0 && rwm_term_free(a, b, n0, t) == 0) bad += 1.0;  // horizon is the last nonzero term
      if (n0 > shift_bound(a, b)) bad += 1.0;
      r.observe("pair " + std::to_string(i) + " (N0=" + std::to_string(n0) + ")", bad);
    }
    r.values["pairs"] = static_cast<double>(pairs.size());
    r.finish();
    out.push_back(r);
  }

  {
    PredicateReport r;
    r.name = "free_commutator_norm";
    r.tolerance = 1e-12;
    struct Case {
      const char* g;
      const char* h;
      long n;
      double expected;  // negative: no fixed expectation
    };
    const Case cases[] = {
        {"a", "a", 0, 0.0}, {"a", "a", 2, 0.0}, {"a", "a", 4, 0.0}, {"s0", "s5", 1, std::sqrt(2.0)},
        {"s0", "s5", 5, 0.0}, {"s0", "s7", 3, std::sqrt(2.0)}, {"a", "s0", 1, std::sqrt(2.0)},
        {"c", "c", 3, 0.0}, {"a", "b", 1, 0.0}, {"a", "b", 2, std::sqrt(2.0)},
    };
    for (const auto& cs : cases) {
      const Word g = parse_word(cs.g), h = parse_word(cs.h);
      const double v = commutator_norm(g, h, cs.n, t);
      const double direct = commutator_norm_direct(g, h, cs.n, t);
      const std::string label = std::string("[T^") + std::to_string(cs.n) + "(" + cs.g + "), " + cs.h + "]";
      r.observe(label, std::abs(v - direct) + std::abs(v - cs.expected));
    }
    for (int i = 0; i < 20; ++i) {
      const Element x = random_element(seed * 104729 + 2 * i, 3, -2, 2, 1, 3);
      const Element y = random_element(seed * 104729 + 2 * i + 1, 3, -2, 2, 1, 3);
      if (x.is_zero() || y.is_zero()) continue;
      const Word g = x.support().begin()->first, h = y.support().begin()->first;
      const long n = i % 4;
      const double v = commutator_norm(g, h, n, t);
      const double direct = commutator_norm_direct(g, h, n, t);
      const double in_set = std::min(std::abs(v), std::abs(v - std::sqrt(2.0)));
      r.observe("[T^" + std::to_string(n) + "(" + g.to_string() + "), " + h.to_string() + "]",
                std::abs(v - direct) + in_set);
    }
    r.finish();
    out.push_back(r);
  }

  {
    PredicateReport r;
    r.name = "free_subsystem_nontrivial";
    r.tolerance = 0.0;
    const Element la = Element::of(parse_word("a")), lb = Element::of(parse_word("b"));
    r.observe("l(a) l(b) != l(b) l(a)", la * lb == lb * la ? 1.0 : 0.0);
    r.observe("D(l(a)) = l(a), not a scalar", cond_d(la, t) == la && mu(la).is_zero() ? 0.0 : 1.0);
    r.observe("D(l(s0)) = 0", cond_d(Element::of(parse_word("s0")), t).is_zero() ? 0.0 : 1.0);
    r.finish();
    out.push_back(r);
  }
  return out;
}

}  // namespace relmix::free
