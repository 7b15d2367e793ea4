#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "hfl/encodings.hpp"
#include "hfl/parser.hpp"
#include "hfl/syntax.hpp"

using namespace hfl;

namespace {

FPtr P(const std::string& s, const TypeEnv& env = {}) {
  ParseContext ctx;
  ctx.env = env;
  return parse_formula(s, ctx);
}

// Random well-typed formulas of type O over a fixed environment.
struct Gen {
  std::mt19937 rng;
  int counter = 0;
  explicit Gen(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Term term(const std::vector<std::string>& nats) {
    Term t = nats.empty() || pick(3) == 0 ? Term::zero() : Term::variable(nats[pick((int)nats.size())]);
    return t.plus(pick(3));
  }

  // formula of type O; props: variables of type O in scope; preds: N->O in scope
  FPtr prop(int depth, std::vector<std::string> nats, std::vector<std::string> props,
            std::vector<std::string> preds) {
    int choice = depth <= 0 ? pick(3) : pick(9);
    switch (choice) {
      case 0: return mk_eq(term(nats), term(nats));
      case 1:
        if (!props.empty()) return mk_var(props[pick((int)props.size())]);
        return enc::top();
      case 2:
        if (!preds.empty()) return mk_app(mk_var(preds[pick((int)preds.size())]), term(nats));
        return enc::bot();
      case 3: return mk_or(prop(depth - 1, nats, props, preds), prop(depth - 1, nats, props, preds));
      case 4: return mk_and(prop(depth - 1, nats, props, preds), prop(depth - 1, nats, props, preds));
      case 5: {
        std::string x = "p" + std::to_string(counter++ % 3);
        auto ps = props;
        ps.push_back(x);
        return mk_fix(pick(2) ? FKind::Mu : FKind::Nu, x, prop_type(), prop(depth - 1, nats, ps, preds));
      }
      case 6: {
        // (\n:N. body) t
        std::string n = "n" + std::to_string(counter++ % 3);
        auto ns = nats;
        ns.push_back(n);
        return mk_app(mk_lam(n, nat_type(), prop(depth - 1, ns, props, preds)), term(nats));
      }
      case 7: {
        // (sigma X:N->O. \n. body) t
        std::string X = "X" + std::to_string(counter++ % 2);
        std::string n = "m" + std::to_string(counter++ % 2);
        auto ns = nats;
        ns.push_back(n);
        auto qs = preds;
        qs.push_back(X);
        FPtr body = mk_lam(n, nat_type(), prop(depth - 1, ns, props, qs));
        return mk_app(mk_fix(pick(2) ? FKind::Mu : FKind::Nu, X, arrow_type(nat_type(), prop_type()), body),
                      term(nats));
      }
      default: {
        // (\q:O. body) arg
        std::string q = "q" + std::to_string(counter++ % 2);
        auto ps = props;
        ps.push_back(q);
        return mk_app(mk_lam(q, prop_type(), prop(depth - 1, nats, ps, preds)),
                      prop(depth - 1, nats, props, preds));
      }
    }
  }
};

}  // namespace

TEST_CASE("parse: least fixpoint and zero") {
  FPtr f = P("mu x:O. x");
  CHECK(f->kind == FKind::Mu);
  CHECK(f->name == "x");
  CHECK(f->type->kind == Type::Kind::Prop);
  CHECK(f->lhs->kind == FKind::Var);
  CHECK(alpha_eq(f, enc::bot()));
  auto z = parse("Z");
  REQUIRE(std::holds_alternative<Term>(z));
  CHECK(std::get<Term>(z) == Term::zero());
}

TEST_CASE("parse: numerals desugar to successors") {
  Term t = parse_term("3");
  CHECK(t == Term::numeral(3));
  CHECK(parse_term("S S S Z") == t);
  FPtr e = P("x = S 2", {{"x", nat_type()}});
  CHECK(e->t2 == Term::numeral(3));
}

TEST_CASE("parse: precedence and associativity") {
  FPtr f = P("a \\/ b /\\ c \\/ d", {{"a", prop_type()}, {"b", prop_type()}, {"c", prop_type()}, {"d", prop_type()}});
  REQUIRE(f->kind == FKind::Or);
  CHECK(f->lhs->kind == FKind::Or);
  CHECK(f->lhs->rhs->kind == FKind::And);
  TypeP t = parse_type("N -> N -> O");
  CHECK(type_str(t) == "N->N->O");
  CHECK(t->res->kind == Type::Kind::Arrow);
  CHECK(type_str(parse_type("(N->O)->N->O")) == "(N->O)->N->O");
}

TEST_CASE("parse: lambda example round-trips") {
  FPtr f = P("(\\p:N->O.\\x:N. p x /\\ X p (S x))", {{"X", parse_type("(N->O)->N->O")}});
  std::string printed = to_string(f);
  FPtr g = P(printed, {{"X", parse_type("(N->O)->N->O")}});
  CHECK(alpha_eq(f, g));
  CHECK(to_string(g) == printed);
}

TEST_CASE("parse: errors carry positions") {
  CHECK_THROWS_AS(P("mu x:N. x"), SyntaxError);
  CHECK_THROWS_AS(P("(p \\/ q"), SyntaxError);
  CHECK_THROWS_AS(parse_type("O -> N"), SyntaxError);
  try {
    P("p /\\ ) q");
    FAIL("expected error");
  } catch (const SyntaxError& e) {
    CHECK(e.pos == 5);
  }
}

TEST_CASE("parse: sequents with declarations") {
  auto ps = parse_sequent("x:O, n:N | x, n = Z |- x");
  CHECK(ps.seq.left.size() == 2);
  CHECK(ps.seq.right.size() == 1);
  CHECK(ps.env.at("n")->kind == Type::Kind::Nat);
  check_sequent(ps.env, ps.seq);
  auto empty = parse_sequent("|-");
  CHECK(empty.seq.left.empty());
  CHECK(empty.seq.right.empty());
}

TEST_CASE("infer_type") {
  CHECK(infer_type({}, enc::bot())->kind == Type::Kind::Prop);
  CHECK(infer_type({{"x", nat_type()}}, mk_eq(Term::variable("x"), Term::variable("x")))->kind ==
        Type::Kind::Prop);
  CHECK(type_str(infer_type({}, enc::forall_pred())) == "(N->O)->N->O");
  CHECK_THROWS_AS(infer_type({}, mk_var("y")), UnboundVariable);
  CHECK_THROWS_AS(infer_type({}, mk_mu("x", nat_type(), mk_var("x"))), IllTyped);
  CHECK_THROWS_AS(infer_type({{"p", prop_type()}}, mk_app(mk_var("p"), Term::zero())), IllTyped);
  CHECK(type_str(infer_type({}, enc::sum_pred())) == "N->N->N->O");
  CHECK(type_str(infer_type({}, enc::nat_pred())) == "N->O");
  CHECK(type_str(infer_type({}, enc::leq_pred())) == "N->N->O");
}

TEST_CASE("substitute: simple and capture-avoiding") {
  TypeEnv env{{"x", prop_type()}, {"y", prop_type()}};
  FPtr f = P("x \\/ y", env);
  CHECK(alpha_eq(substitute(f, "x", Arg::of(enc::top())), mk_or(enc::top(), mk_var("y"))));

  FPtr lam = mk_lam("y", prop_type(), mk_var("x"));
  FPtr r = substitute(lam, "x", Arg::of(mk_var("y")));
  REQUIRE(r->kind == FKind::Lam);
  CHECK(r->name != "y");
  CHECK(r->lhs->kind == FKind::Var);
  CHECK(r->lhs->name == "y");
  CHECK(free_vars(r) == std::set<std::string>{"y"});
}

TEST_CASE("substitute: body substitution of the lambda/nu/mu example") {
  TypeP t = arrow_type(prop_type(), prop_type());
  FPtr nu = P("nu f:(O->O)->O->O. \\g:O->O. g (f g)");
  FPtr mu = P("mu x:O->O. \\a:O. a");
  FPtr body = P("h ((nu f:(O->O)->O->O. \\g:O->O. g (f g)) h)", {{"h", t}});
  FPtr r = substitute(body, "h", Arg::of(mu));
  FPtr expect = mk_app(mu, mk_app(nu, mu));
  CHECK(alpha_eq(r, expect));
}

TEST_CASE("substitute: free-variable postcondition over a generated corpus") {
  Gen g(7);
  for (int i = 0; i < 300; ++i) {
    FPtr f = g.prop(4, {"n"}, {"a", "b"}, {"r"});
    FPtr arg = g.prop(2, {"n"}, {"b", "p0", "q0"}, {});
    FPtr s = substitute(f, "a", Arg::of(arg));
    auto fv = free_vars(s);
    auto allowed = free_vars(f);
    allowed.erase("a");
    for (const auto& v : free_vars(arg)) allowed.insert(v);
    for (const auto& v : fv) CHECK(allowed.count(v));
    TypeEnv env{{"n", nat_type()}, {"a", prop_type()}, {"b", prop_type()}, {"p0", prop_type()},
                {"q0", prop_type()}, {"r", arrow_type(nat_type(), prop_type())}};
    CHECK(infer_type(env, s)->kind == Type::Kind::Prop);  // type preservation
  }
}

TEST_CASE("unfold") {
  CHECK(alpha_eq(unfold(enc::bot()), enc::bot()));
  FPtr nu = P("nu f:(O->O)->O->O. \\g:O->O. g (f g)");
  FPtr mu = P("mu x:O->O. \\a:O. a");
  FPtr u = unfold(mk_app(nu, mu));
  FPtr expect = P("(\\h:O->O. h ((nu f:(O->O)->O->O. \\g:O->O. g (f g)) h)) (mu x:O->O. \\a:O. a)");
  CHECK(alpha_eq(u, expect));
  // N t unfolds to the Fig. 2 body applied to t
  FPtr nt = enc::nat(Term::variable("t"));
  FPtr un = unfold(nt);
  REQUIRE(un->kind == FKind::App);
  CHECK(un->lhs->kind == FKind::Lam);
  CHECK(un->t1 == Term::variable("t"));
  CHECK_THROWS_AS(unfold(mk_var("p")), TypeError);
}

TEST_CASE("unfold preserves type and free variables on a generated corpus") {
  Gen g(11);
  TypeEnv env{{"n", nat_type()}, {"a", prop_type()}, {"b", prop_type()}, {"r", arrow_type(nat_type(), prop_type())}};
  int tried = 0;
  for (int i = 0; i < 500 && tried < 150; ++i) {
    FPtr f = g.prop(4, {"n"}, {"a", "b"}, {"r"});
    if (!is_fix(spine(f).head->kind)) continue;
    ++tried;
    FPtr u = unfold(f);
    CHECK(free_vars(u) == free_vars(f));
    CHECK(infer_type(env, u)->kind == Type::Kind::Prop);
  }
  CHECK(tried > 20);
}

TEST_CASE("print then parse is the identity up to alpha on a generated corpus") {
  Gen g(3);
  TypeEnv env{{"n", nat_type()}, {"a", prop_type()}, {"b", prop_type()}, {"r", arrow_type(nat_type(), prop_type())}};
  ParseContext ctx;
  ctx.env = env;
  for (int i = 0; i < 400; ++i) {
    FPtr f = g.prop(5, {"n"}, {"a", "b"}, {"r"});
    std::string s = to_string(f);
    FPtr h = parse_formula(s, ctx);
    CHECK_MESSAGE(alpha_eq(f, h), s);
  }
}

TEST_CASE("alpha-equivalence is an equivalence relation on renamings") {
  FPtr a = P("\\x:N. mu y:N->O. \\z:N. x = z \\/ y (S z)");
  FPtr b = P("\\u:N. mu w:N->O. \\v:N. u = v \\/ w (S v)");
  FPtr c = P("\\p:N. mu q:N->O. \\r:N. p = r \\/ q (S r)");
  FPtr d = P("\\p:N. mu q:N->O. \\r:N. r = p \\/ q (S r)");
  CHECK(alpha_eq(a, a));
  CHECK(alpha_eq(a, b));
  CHECK(alpha_eq(b, a));
  CHECK(alpha_eq(b, c));
  CHECK(alpha_eq(a, c));
  CHECK_FALSE(alpha_eq(a, d));
  CHECK(canon(a) == canon(c));
  CHECK(canon(a) != canon(d));
  CHECK_FALSE(alpha_eq(P("x", {{"x", prop_type()}}), P("y", {{"y", prop_type()}})));
}

TEST_CASE("encodings") {
  CHECK(to_string(enc::bot()) == "mu x:O. x");
  CHECK(to_string(enc::top()) == "nu x:O. x");
  TypeP oo = arrow_type(prop_type(), prop_type());
  CHECK(to_string(enc::top_t(oo)) == "nu x:O->O. x");
  FPtr lt = enc::lt(Term::variable("s"), Term::variable("t"));
  FPtr expect = P("(mu X:N->O. \\y:N. (S y = t) \\/ X (S y)) s", {{"s", nat_type()}, {"t", nat_type()}});
  CHECK(alpha_eq(lt, expect));
  FPtr nat = enc::nat_pred();
  FPtr nat_text = P("mu X:N->O. \\x:N. x = Z \\/ (mu E:N->O. \\x':N. (x = S x' /\\ X x') \\/ E (S x')) Z");
  CHECK(alpha_eq(nat, nat_text));
  // capture avoidance in lt when t is named y
  FPtr lty = enc::lt(Term::zero(), Term::variable("y"));
  CHECK(free_vars(lty) == std::set<std::string>{"y"});
  auto q = enc::match_quant(enc::exists_n("k", mk_eq(Term::variable("k"), Term::numeral(2))));
  REQUIRE(q);
  CHECK(q->exists);
  CHECK(q->var == "k");
  auto q2 = enc::match_quant(enc::forall_t("p", oo, mk_app(mk_var("p"), enc::top())));
  REQUIRE(q2);
  CHECK_FALSE(q2->exists);
}

TEST_CASE("printer folds definitions") {
  DefTable defs{{"N", enc::nat_pred()}};
  FPtr f = enc::nat(Term::variable("t"));
  CHECK(to_string(f, &defs) == "N t");
  Defs d = enc::standard_defs();
  ParseContext ctx;
  ctx.env = {{"t", nat_type()}};
  ctx.defs = &d;
  CHECK(alpha_eq(parse_formula("N t", ctx), f));
}

TEST_CASE("fresh names are unique across threads") {
  std::set<std::string> seen;
  std::vector<std::string> names(4000);
  std::vector<std::thread> ts;
  for (int t = 0; t < 4; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < 1000; ++i) names[t * 1000 + i] = fresh_name("x");
    });
  for (auto& t : ts) t.join();
  for (const auto& n : names) seen.insert(n);
  CHECK(seen.size() == names.size());
}
