#include "hfl/encodings.hpp"

namespace hfl::enc {

namespace {

TypeP N() { return nat_type(); }
TypeP O() { return prop_type(); }
TypeP arr(TypeP a, TypeP b) { return arrow_type(std::move(a), std::move(b)); }
Term var(const std::string& x, unsigned k = 0) { return Term::variable(x, k); }

// a binder name not free in any of the given formulas / terms
std::string avoid(const std::string& base, std::initializer_list<std::set<std::string>> sets) {
  for (const auto& s : sets)
    if (s.count(base)) return fresh_name(base);
  return base;
}

}  // namespace

FPtr top() { return top_t(O()); }
FPtr bot() { return bot_t(O()); }
FPtr top_t(const TypeP& t) { return mk_nu("x", t, mk_var("x")); }
FPtr bot_t(const TypeP& t) { return mk_mu("x", t, mk_var("x")); }

FPtr forall_pred() {
  // nu X. \p. \x. p x /\ X p (S x)
  TypeP pt = arr(N(), O());
  FPtr body = mk_and(mk_app(mk_var("p"), var("x")),
                     mk_app(mk_app(mk_var("X"), mk_var("p")), var("x", 1)));
  return mk_nu("X", arr(pt, arr(N(), O())), mk_lam("p", pt, mk_lam("x", N(), body)));
}

FPtr exists_pred(const std::string& x, const FPtr& body) {
  std::string e = avoid("E", {free_vars(body)});
  return mk_mu(e, arr(N(), O()), mk_lam(x, N(), mk_or(body, mk_app(mk_var(e), var(x, 1)))));
}

FPtr exists_n(const std::string& x, const FPtr& body) { return mk_app(exists_pred(x, body), Term::zero()); }

FPtr forall_pred_of(const std::string& x, const FPtr& body) {
  std::string a = avoid("A", {free_vars(body)});
  return mk_nu(a, arr(N(), O()), mk_lam(x, N(), mk_and(body, mk_app(mk_var(a), var(x, 1)))));
}

FPtr forall_n(const std::string& x, const FPtr& body) { return mk_app(forall_pred_of(x, body), Term::zero()); }

FPtr exists_t(const std::string& x, const TypeP& t, const FPtr& body) {
  return mk_app(mk_lam(x, t, body), top_t(t));
}

FPtr forall_t(const std::string& x, const TypeP& t, const FPtr& body) {
  return mk_app(mk_lam(x, t, body), bot_t(t));
}

FPtr sum_pred() {
  // mu sum. \x.\y.\z. (x = Z /\ y = z) \/ (∃x'. ∃z'. x = S x' /\ sum x' y z' /\ z = S z')
  FPtr rec = mk_app(mk_app(mk_app(mk_var("sum"), var("x'")), var("y")), var("z'"));
  FPtr inner = mk_and(mk_and(mk_eq(var("x"), var("x'", 1)), rec), mk_eq(var("z"), var("z'", 1)));
  FPtr ex = exists_n("x'", exists_n("z'", inner));
  FPtr body = mk_or(mk_and(mk_eq(var("x"), Term::zero()), mk_eq(var("y"), var("z"))), ex);
  return mk_mu("sum", arr(N(), arr(N(), arr(N(), O()))),
               mk_lam("x", N(), mk_lam("y", N(), mk_lam("z", N(), body))));
}

FPtr nat_pred() {
  // mu X. \x. (x = Z) \/ (∃x'. x = S x' /\ X x')
  FPtr ex = exists_n("x'", mk_and(mk_eq(var("x"), var("x'", 1)), mk_app(mk_var("X"), var("x'"))));
  return mk_mu("X", arr(N(), O()), mk_lam("x", N(), mk_or(mk_eq(var("x"), Term::zero()), ex)));
}

FPtr leq_pred() {
  FPtr body = mk_or(mk_eq(var("n"), var("m")), mk_app(mk_app(mk_var("Y"), var("n", 1)), var("m")));
  return mk_mu("Y", arr(N(), arr(N(), O())), mk_lam("n", N(), mk_lam("m", N(), body)));
}

FPtr lt_pred() {
  // \t. mu X. \y. (S y = t) \/ X (S y), then applied as lt_pred t s
  FPtr body = mk_or(mk_eq(var("y", 1), var("t")), mk_app(mk_var("X"), var("y", 1)));
  return mk_lam("t", N(), mk_mu("X", arr(N(), O()), mk_lam("y", N(), body)));
}

FPtr lt(const Term& s, const Term& t) {
  std::string y = avoid("y", {free_vars(t)});
  FPtr body = mk_or(mk_eq(var(y, 1), t), mk_app(mk_var("X"), var(y, 1)));
  return mk_app(mk_mu("X", arr(N(), O()), mk_lam(y, N(), body)), s);
}

FPtr neq(const Term& s, const Term& t) { return mk_or(lt(s, t), lt(t, s)); }
FPtr leq(const Term& s, const Term& t) { return mk_app(mk_app(leq_pred(), s), t); }
FPtr nat(const Term& t) { return mk_app(nat_pred(), t); }
FPtr sum(const Term& a, const Term& b, const Term& c) {
  return mk_app(mk_app(mk_app(sum_pred(), a), b), c);
}

std::optional<Quant> match_quant(const FPtr& f) {
  if (f->kind != FKind::App) return std::nullopt;
  if (f->term_arg) {
    if (!(f->t1 == Term::zero())) return std::nullopt;
    const FPtr& h = f->lhs;
    // exists over N: mu E. \y. body \/ E (S y) ; forall: nu A. \y. body /\ A (S y)
    if (is_fix(h->kind) && h->lhs->kind == FKind::Lam && h->lhs->type->kind == Type::Kind::Nat) {
      const FPtr& lam = h->lhs;
      const FPtr& b = lam->lhs;
      bool ex = h->kind == FKind::Mu;
      if (b->kind == (ex ? FKind::Or : FKind::And) && b->rhs->kind == FKind::App && b->rhs->term_arg &&
          b->rhs->lhs->kind == FKind::Var && b->rhs->lhs->name == h->name &&
          b->rhs->t1 == Term::variable(lam->name, 1) && !occurs_free(b->lhs, h->name))
        return Quant{ex, lam->name, N(), b->lhs};
    }
    return std::nullopt;
  }
  if (f->lhs->kind != FKind::Lam || f->lhs->type->kind == Type::Kind::Nat) return std::nullopt;
  const TypeP& t = f->lhs->type;
  if (alpha_eq(f->rhs, top_t(t))) return Quant{true, f->lhs->name, t, f->lhs->lhs};
  if (alpha_eq(f->rhs, bot_t(t))) return Quant{false, f->lhs->name, t, f->lhs->lhs};
  return std::nullopt;
}

FPtr encoding(const std::string& name, const TypeP& t) {
  if (name == "top") return top();
  if (name == "bot") return bot();
  if (name == "top_T" || name == "bot_T") {
    if (!t) throw TypeError(name + " needs a type");
    return name == "top_T" ? top_t(t) : bot_t(t);
  }
  if (name == "forall") return forall_pred();
  if (name == "sum") return sum_pred();
  if (name == "lt") return lt_pred();
  if (name == "leq") return leq_pred();
  if (name == "N" || name == "nat") return nat_pred();
  throw std::invalid_argument("unknown encoding " + name);
}

Defs standard_defs() {
  return {{"top", top()}, {"bot", bot()},     {"forall", forall_pred()},
          {"sum", sum_pred()}, {"leq", leq_pred()}, {"N", nat_pred()}};
}

}  // namespace hfl::enc
