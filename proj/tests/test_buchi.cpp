#include "doctest.h"
#include "hfl/buchi.hpp"
#include "lasso_oracle.hpp"

using namespace hfl::buchi;

namespace {

// over {a=0, b=1}: infinitely many b
Automaton inf_b() {
  Automaton x;
  x.alphabet = 2;
  x.add_state("q");
  x.initial = {0};
  x.add(0, 0, 0, false);
  x.add(0, 1, 0, true);
  return x;
}

// finitely many b: guess the last b
Automaton fin_b() {
  Automaton x;
  x.alphabet = 2;
  x.add_state("p");
  x.add_state("r");
  x.initial = {0};
  x.add(0, 0, 0, false);
  x.add(0, 1, 0, false);
  x.add(0, 0, 1, false);
  x.add(1, 0, 1, true);
  return x;
}

Automaton universal(size_t alphabet) {
  Automaton x;
  x.alphabet = alphabet;
  x.add_state();
  x.initial = {0};
  for (Symbol s = 0; s < alphabet; ++s) x.add(0, s, 0, true);
  return x;
}

}  // namespace

TEST_CASE("accepts_lasso on small languages") {
  auto a = inf_b();
  CHECK(accepts_lasso(a, {{}, {1}}));
  CHECK(accepts_lasso(a, {{0, 0}, {0, 1}}));
  CHECK_FALSE(accepts_lasso(a, {{1, 1}, {0}}));
  auto f = fin_b();
  CHECK(accepts_lasso(f, {{1, 1}, {0}}));
  CHECK_FALSE(accepts_lasso(f, {{}, {0, 1}}));
  CHECK_THROWS(accepts_lasso(a, {{}, {}}));
  CHECK_THROWS(accepts_lasso(a, {{}, {2}}));
}

TEST_CASE("word_str prints prefix and cycle") {
  CHECK(word_str({{0}, {1, 0}}) == "0 (1 0)^ω");
  std::vector<std::string> names{"a", "b"};
  CHECK(word_str({{}, {1}}, &names) == "(b)^ω");
}

TEST_CASE("emptiness and witnesses") {
  Automaton none;
  none.alphabet = 1;
  none.add_state();
  none.initial = {0};
  none.add(0, 0, 0, false);
  CHECK(is_empty(none).empty);
  auto e = is_empty(inf_b());
  REQUIRE_FALSE(e.empty);
  REQUIRE(e.witness);
  CHECK(accepts_lasso(inf_b(), *e.witness));
}

TEST_CASE("complement of complementary pair") {
  auto c = complement(inf_b());
  for (const LassoWord& w : {LassoWord{{}, {1}}, LassoWord{{1}, {0}}, LassoWord{{0, 1}, {0, 0, 1}}, LassoWord{{}, {0}}})
    CHECK(accepts_lasso(c, w) == accepts_lasso(fin_b(), w));
  CHECK(contains(fin_b(), c).holds);
  CHECK(contains(c, fin_b()).holds);
  CHECK(is_empty(complement(universal(2))).empty);
}

TEST_CASE("complement size guard") {
  std::mt19937 rng(7);
  Automaton a;
  a.alphabet = 2;
  for (int i = 0; i < 6; ++i) a.add_state();
  a.initial = {0};
  for (size_t p = 0; p < 6; ++p)
    for (size_t q = 0; q < 6; ++q) a.add(p, rng() % 2, q, rng() % 2);
  CHECK_THROWS_AS(complement(a, 10), SizeGuard);
}

TEST_CASE("intersection") {
  auto x = intersect(inf_b(), fin_b());
  CHECK(is_empty(x).empty);
  auto y = intersect(inf_b(), universal(2));
  CHECK(accepts_lasso(y, {{0}, {1, 0}}));
  CHECK_FALSE(accepts_lasso(y, {{1}, {0}}));
}

TEST_CASE("containment counterexamples separate the languages") {
  auto r = contains(universal(2), inf_b());
  REQUIRE_FALSE(r.holds);
  REQUIRE(r.counterexample);
  CHECK_FALSE(accepts_lasso(inf_b(), *r.counterexample));
  auto q = contains_ramsey(universal(2), inf_b());
  REQUIRE_FALSE(q.holds);
  REQUIRE(q.counterexample);
  CHECK_FALSE(accepts_lasso(inf_b(), *q.counterexample));
  CHECK(contains(inf_b(), universal(2)).holds);
  CHECK(contains_ramsey(inf_b(), universal(2)).holds);
}

TEST_CASE("property: state-based conversion, ramsey and rank containment agree") {
  std::mt19937 rng(2026);
  for (int k = 0; k < 120; ++k) {
    size_t alpha = 1 + rng() % 2;
    auto a = oracle::random_automaton(rng, 3, alpha);
    auto b = oracle::random_automaton(rng, 3, alpha);
    auto sb = to_state_based(a);
    auto us = oracle::words_upto(alpha, 3, false), vs = oracle::words_upto(alpha, 3, true);
    auto va = oracle::all_verdicts(a, us, vs);
    for (size_t j = 0; j < vs.size(); ++j)
      for (size_t i = 0; i < us.size(); ++i) {
        LassoWord w{us[i], vs[j]};
        CHECK(accepts_lasso(a, w) == (bool)va[j][i]);
        CHECK(accepts_lasso(sb, w) == (bool)va[j][i]);
      }
    auto r1 = contains(a, b), r2 = contains_ramsey(a, b);
    CHECK(r1.holds == r2.holds);
    for (auto* r : {&r1, &r2})
      if (!r->holds) {
        REQUIRE(r->counterexample);
        CHECK(accepts_lasso(a, *r->counterexample));
        CHECK_FALSE(accepts_lasso(b, *r->counterexample));
      }
  }
}

TEST_CASE("dump and dot mention every transition") {
  auto a = fin_b();
  auto d = dump(a);
  CHECK(d.find('*') != std::string::npos);
  CHECK(to_dot(a).find("digraph") != std::string::npos);
}
