#include "doctest.h"
#include "hfl/encodings.hpp"
#include "hfl/kernel.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"

using namespace hfl;

namespace {

Sequent S(const std::string& s, const TypeEnv& env = {}) {
  Defs d = enc::standard_defs();
  ParseContext ctx;
  ctx.env = env;
  ctx.defs = &d;
  return parse_sequent(s, ctx).seq;
}

FPtr F(const std::string& s, const TypeEnv& env = {}) {
  Defs d = enc::standard_defs();
  ParseContext ctx;
  ctx.env = env;
  ctx.defs = &d;
  return parse_formula(s, ctx);
}

RuleInst R(Rule r) {
  RuleInst x;
  x.tag = r;
  return x;
}

const std::string kCorpus = HFL_CORPUS_DIR;

}  // namespace

TEST_CASE("axiom closes identical sides only") {
  TypeEnv env{{"p", prop_type()}, {"q", prop_type()}};
  CHECK_NOTHROW(check_rule(env, S("p |- p", env), R(Rule::Axiom), {}));
  CHECK_THROWS_AS(check_rule(env, S("p |- q", env), R(Rule::Axiom), {}), RuleError);
  CHECK_THROWS_AS(check_rule(env, S("p, q |- p", env), R(Rule::Axiom), {}), RuleError);
  // alpha-equivalent sides
  CHECK_NOTHROW(check_rule({}, S("mu x:O. x |- mu y:O. y"), R(Rule::Axiom), {}));
}

TEST_CASE("multi-premise Mono") {
  TypeEnv env{{"x", prop_type()}, {"y", prop_type()}};
  RuleInst m = R(Rule::Mono);
  m.var = "h";
  m.var_type = prop_type();
  m.formula = F("h \\/ mu z:O. (h \\/ z)", {{"h", prop_type()}});
  m.psi = F("x", env);
  m.chi = F("x \\/ y", env);
  Sequent c = S("x \\/ mu z:O. (x \\/ z) |- (x \\/ y) \\/ mu z:O. ((x \\/ y) \\/ z)", env);
  Sequent p = S("x |- x \\/ y", env);
  auto d = check_rule(env, c, m, {p, p});
  CHECK(d.premises.size() == 2);
  CHECK(d.links[1].mono_occ == 1);
  CHECK_THROWS_AS(check_rule(env, c, m, {p}), RuleError);
}

TEST_CASE("Mono freshness side condition") {
  TypeEnv env{{"f", parse_type("N->O")}, {"g", parse_type("N->O")}, {"y", nat_type()}};
  RuleInst m = R(Rule::Mono);
  m.var = "h";
  m.var_type = parse_type("N->O");
  m.formula = F("h Z", {{"h", m.var_type}});
  m.psi = F("f", env);
  m.chi = F("g", env);
  m.ys = {"y"};
  Sequent c = S("f Z |- g Z", env);
  CHECK_NOTHROW(check_rule(env, c, m, {S("f y |- g y", env)}));
  Sequent c2 = S("f Z, y = y |- g Z", env);
  RuleInst m2 = m;
  m2.at = 0;
  CHECK_THROWS_AS(check_rule(env, c2, m2, {S("f y, y = y |- g y", env)}), SideConditionViolated);
}

TEST_CASE("P2 strips one successor from each side") {
  TypeEnv env{{"s", nat_type()}, {"t", nat_type()}};
  CHECK_NOTHROW(check_rule(env, S("S s = S t |-", env), R(Rule::P2), {S("s = t |-", env)}));
  CHECK_THROWS_AS(check_rule(env, S("S s = S t |-", env), R(Rule::P2), {S("t = s |-", env)}), SchemaMismatch);
  CHECK_NOTHROW(check_rule(env, S("S s = Z |-", env), R(Rule::P1), {}));
  CHECK_THROWS_AS(check_rule(env, S("Z = S s |-", env), R(Rule::P1), {}), RuleError);
}

TEST_CASE("structural rules and occurrence links") {
  TypeEnv env{{"p", prop_type()}, {"q", prop_type()}, {"r", prop_type()}};
  auto d = check_rule(env, S("p /\\ q, r |- p", env), [] {
    RuleInst a = R(Rule::AndL);
    a.at = 0;
    return a;
  }(), {S("p, q, r |- p", env)});
  auto occ = relevant_occurrences(d, 0);
  CHECK(occ.at({false, 0}).index == 0);
  CHECK(occ.at({false, 1}).index == 0);
  CHECK(occ.at({false, 2}).index == 1);
  RuleInst cut = R(Rule::Cut);
  cut.formula = F("r", env);
  auto dc = check_rule(env, S("p |- q", env), cut, {S("p |- r, q", env), S("p, r |- q", env)});
  CHECK(relevant_occurrences(dc, 0).count({true, 0}) == 0);
  CHECK(relevant_occurrences(dc, 1).count({false, 1}) == 0);
  // weakened formula has no preimage
  auto dw = check_rule(env, S("p, q |- q", env), R(Rule::WkL), {S("p |- q", env)});
  CHECK(relevant_occurrences(dw, 0).size() == 2);
  auto dx = check_rule(env, S("p, q |- r", env), R(Rule::ExL), {S("q, p |- r", env)});
  CHECK(relevant_occurrences(dx, 0).at({false, 0}).index == 1);
  auto dctr = check_rule(env, S("p |- q", env), R(Rule::CtrL), {S("p, p |- q", env)});
  CHECK(relevant_occurrences(dctr, 0).at({false, 1}).index == 0);
}

TEST_CASE("fixpoint and lambda rules") {
  TypeEnv env{{"t", nat_type()}};
  CHECK_NOTHROW(check_rule({}, S("|- nu x:O. x"), R(Rule::NuR), {S("|- nu x:O. x")}));
  CHECK_THROWS_AS(check_rule({}, S("|- nu x:O. x"), R(Rule::MuR), {S("|- nu x:O. x")}), RuleError);
  Sequent n = S("N t |-", env);
  Sequent un = {{unfold(n.left[0])}, {}};
  CHECK_NOTHROW(check_rule(env, n, R(Rule::MuL), {un}));
  Sequent b = {{beta_head(un.left[0])}, {}};
  CHECK_NOTHROW(check_rule(env, un, R(Rule::LamL), {b}));
}

TEST_CASE("Nat and EqL") {
  TypeEnv env{{"t", nat_type()}, {"u", nat_type()}};
  RuleInst nat = R(Rule::Nat);
  nat.var = "t";
  CHECK_NOTHROW(check_rule(env, S("|- t = t", env), nat, {S("N t |- t = t", env)}));
  CHECK(alpha_eq(rewrite_term(F("leq (S t) u", env), Term::variable("t"), Term::zero()), F("leq 1 u", env)));
  // only occurrences with at least as many successors are rewritten
  CHECK(alpha_eq(rewrite_term(F("t = S u", env), Term::variable("u", 1), Term::zero()), F("t = Z", env)));
  CHECK(alpha_eq(rewrite_term(F("u = Z", env), Term::variable("u", 1), Term::zero()), F("u = Z", env)));
  RuleInst eq = R(Rule::EqL);
  CHECK_NOTHROW(check_rule(env, S("leq (S t) u, t = Z |- N (S t)", env), eq, {S("leq 1 u |- N 1", env)}));
  // template mode flips sides of a single equation
  RuleInst tm = eq;
  tm.tmpl = EqTemplate{"a", "b", S("|- a = S Z", {{"a", nat_type()}, {"b", nat_type()}})};
  CHECK_NOTHROW(check_rule(env, S("t = u |- t = S Z", env), tm, {S("|- u = S Z", env)}));
}

TEST_CASE("Subst instantiates a premise") {
  TypeEnv env{{"t", nat_type()}, {"u", nat_type()}};
  RuleInst s = R(Rule::Subst);
  s.subst["t"] = Arg::of(Term::variable("u", 1));
  CHECK_NOTHROW(check_rule(env, S("N (S u) |- N (S u)", env), s, {S("N t |- N t", env)}));
  CHECK_THROWS_AS(check_rule(env, S("N u |- N u", env), s, {S("N t |- N t", env)}), RuleError);
  s.subst["t"] = Arg::of(F("top"));
  CHECK_THROWS_AS(check_rule(env, S("N u |- N u", env), s, {S("N t |- N t", env)}), TypeError);
}

TEST_CASE("extended rules are refused in core proofs") {
  TypeEnv env{{"t", nat_type()}};
  RuleInst fr = R(Rule::ForallR);
  Sequent c{{}, {enc::forall_n("t", F("leq Z t", env))}};
  Sequent p = S("|- leq Z t", env);
  CHECK_NOTHROW(check_rule(env, c, fr, {p}));
  PreProof pp;
  pp.env = env;
  pp.nodes = {{"a", "", c, fr, {1}}, {"b", "", p, std::nullopt, {}}};
  auto issues = validate_preproof(pp, false);
  bool refused = false;
  for (const auto& i : issues)
    if (i.message.find("admissible") != std::string::npos) refused = true;
  CHECK(refused);
}

TEST_CASE("golden single-loop proof validates") {
  PreProof pp = load_proof(kCorpus + "/example_3_4.hflp");
  CHECK(pp.nodes.size() == 5);
  CHECK(validate_preproof(pp).empty());
  CHECK(successors(pp, 4) == std::vector<size_t>{0});
  CHECK(successors(pp, 0) == std::vector<size_t>{1});
  // round trip through the writer
  PreProof again = parse_proof(write_proof(pp));
  CHECK(validate_preproof(again).empty());
  CHECK(write_proof(again) == write_proof(pp));
}

TEST_CASE("broken back-edges are reported") {
  PreProof pp = load_proof(kCorpus + "/example_3_4.hflp");
  PreProof to_leaf = pp;
  to_leaf.back[4] = 4;
  CHECK_FALSE(validate_preproof(to_leaf).empty());
  PreProof other = pp;
  other.back[4] = 2;
  auto is = validate_preproof(other);
  REQUIRE_FALSE(is.empty());
  CHECK(is[0].node == "n4");
  PreProof none = pp;
  none.back.clear();
  CHECK_FALSE(validate_preproof(none).empty());
}

TEST_CASE("proof file errors carry a line") {
  CHECK_THROWS_AS(parse_proof("(node a (seq \"|- top\"))"), ProofParseError);
  try {
    parse_proof("(vars \"\")\n\n(node a (seq \"|- top\") (rule Bogus))");
    FAIL("expected an error");
  } catch (const ProofParseError& e) {
    CHECK(e.line == 3);
  }
}
