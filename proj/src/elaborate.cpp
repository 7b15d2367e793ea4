#include "hfl/elaborate.hpp"

#include "hfl/encodings.hpp"

namespace hfl::elab {

namespace {

using Fs = std::vector<FPtr>;

Sequent replaced(Sequent s, bool left, size_t i, FPtr f) {
  (left ? s.left : s.right).at(i) = std::move(f);
  return s;
}

Arg var_arg(const std::string& y, const TypeP& t) {
  return t->kind == Type::Kind::Nat ? Arg::of(Term::variable(y)) : Arg::of(mk_var(y));
}

std::vector<Arg> var_args(const std::vector<std::string>& ys, const std::vector<TypeP>& tys) {
  if (ys.size() != tys.size()) throw ElaborationError("expected " + std::to_string(tys.size()) + " fresh arguments");
  std::vector<Arg> out;
  for (size_t k = 0; k < ys.size(); ++k) out.push_back(var_arg(ys[k], tys[k]));
  return out;
}

RuleInst at(Rule tag, long i) {
  RuleInst r;
  r.tag = tag;
  r.at = i;
  return r;
}

size_t position(const RuleInst& r, const Fs& side, bool left) {
  if (side.empty()) throw ElaborationError(rule_name(r.tag) + ": empty side");
  size_t i = r.at < 0 ? (left ? side.size() - 1 : 0) : (size_t)r.at;
  if (i >= side.size()) throw ElaborationError(rule_name(r.tag) + ": position out of range");
  return i;
}

// hole names for Mono are bound, so they are not kept in the environment
std::string hole_name(Builder& b, const TypeP& t) {
  std::string h = b.fresh_var("h", t);
  b.proof().env.erase(h);
  return h;
}

std::vector<std::string> fresh_args(Builder& b, const TypeP& t) {
  std::vector<std::string> ys;
  for (const auto& a : arg_types(t)) ys.push_back(b.fresh_var("y", a));
  return ys;
}

// |- phi ~> a chain closing phi = t \/ ... for phi = s <= s
void close_leq_refl(Builder& b, size_t n) {
  n = b.rule(n, Rule::MuR, 0);
  n = b.rule(n, Rule::LamR, 0);
  n = b.rule(n, Rule::LamR, 0);
  n = b.rule(n, Rule::OrR, 0);
  n = b.rule(n, Rule::WkR, 1);
  b.apply(n, at(Rule::EqR, 0));
}

// |- Z <= t at n, by instantiating the lemma at a fresh variable
void leq_zero_at(Builder& b, size_t n, const Term& t) {
  std::string w = b.fresh_var("w", nat_type());
  Sequent s{{}, {enc::leq(Term::zero(), Term::variable(w))}};
  leq_zero_proof(b, b.subst(n, {{w, Arg::of(t)}}, s));
}

std::vector<size_t> exists_left_n(Builder& b, size_t n, size_t i, const std::string& y) {
  Sequent c = b.seq(n);
  FPtr e = spine(c.left[i]).head;
  Sequent star = replaced(c, true, i, mk_app(e, Term::variable(y)));
  size_t s = b.subst(n, {{y, Arg::of(Term::zero())}}, star);
  size_t u = b.rule(s, Rule::MuL, (long)i);
  u = b.rule(u, Rule::LamL, (long)i);
  auto br = b.apply(u, at(Rule::OrL, (long)i));
  b.back(b.subst(br[1], {{y, Arg::of(Term::variable(y, 1))}}, star), s);
  return {br[0]};
}

std::vector<size_t> forall_right_n(Builder& b, size_t n, size_t i, const std::string& y) {
  Sequent c = b.seq(n);
  FPtr a = spine(c.right[i]).head;
  Sequent star = replaced(c, false, i, mk_app(a, Term::variable(y)));
  size_t s = b.subst(n, {{y, Arg::of(Term::zero())}}, star);
  size_t u = b.rule(s, Rule::NuR, (long)i);
  u = b.rule(u, Rule::LamR, (long)i);
  auto br = b.apply(u, at(Rule::AndR, (long)i));
  b.back(b.subst(br[1], {{y, Arg::of(Term::variable(y, 1))}}, star), s);
  return {br[0]};
}

std::vector<size_t> exists_right_n(Builder& b, size_t n, size_t i, const Term& t) {
  Sequent c = b.seq(n);
  FPtr e = spine(c.right[i]).head;
  auto [p0, p1] = b.cut(n, enc::leq(Term::zero(), t));
  leq_zero_at(b, b.keep_only(p0, {}, {0}), t);

  std::string z = b.fresh_var("z", nat_type());
  Sequent star = b.seq(p1);
  star.left.back() = enc::leq(Term::variable(z), t);
  star.right[i] = mk_app(e, Term::variable(z));
  size_t s = b.subst(p1, {{z, Arg::of(Term::zero())}}, star);
  long last = (long)star.left.size() - 1;
  size_t u = b.rule(s, Rule::MuL, last);
  u = b.rule(u, Rule::LamL, last);
  u = b.rule(u, Rule::LamL, last);
  auto br = b.apply(u, at(Rule::OrL, last));

  // z = t: unfold E at t and keep the body
  size_t l = b.rule(br[0], Rule::EqL, last);
  l = b.rule(l, Rule::MuR, (long)i);
  l = b.rule(l, Rule::LamR, (long)i);
  l = b.rule(l, Rule::OrR, (long)i);
  l = b.rule(l, Rule::WkR, (long)i + 1);

  // S z <= t: move on to E (S z)
  size_t r = b.rule(br[1], Rule::MuR, (long)i);
  r = b.rule(r, Rule::LamR, (long)i);
  r = b.rule(r, Rule::OrR, (long)i);
  r = b.rule(r, Rule::WkR, (long)i);
  b.back(b.subst(r, {{z, Arg::of(Term::variable(z, 1))}}, star), s);
  return {l};
}

std::vector<size_t> forall_left_n(Builder& b, size_t n, size_t i, const Term& t) {
  Sequent c = b.seq(n);
  FPtr a = spine(c.left[i]).head;
  auto [p0, p1] = b.cut(n, enc::leq(Term::zero(), t));
  leq_zero_at(b, b.keep_only(p0, {}, {0}), t);

  std::string z = b.fresh_var("z", nat_type());
  Sequent star = b.seq(p1);
  star.left.back() = enc::leq(Term::variable(z), t);
  star.left[i] = mk_app(a, Term::variable(z));
  size_t s = b.subst(p1, {{z, Arg::of(Term::zero())}}, star);
  long last = (long)star.left.size() - 1;
  size_t u = b.rule(s, Rule::MuL, last);
  u = b.rule(u, Rule::LamL, last);
  u = b.rule(u, Rule::LamL, last);
  auto br = b.apply(u, at(Rule::OrL, last));

  size_t l = b.rule(br[0], Rule::EqL, last);
  l = b.rule(l, Rule::NuL, (long)i);
  l = b.rule(l, Rule::LamL, (long)i);
  l = b.rule(l, Rule::AndL, (long)i);
  l = b.rule(l, Rule::WkL, (long)i + 1);

  size_t r = b.rule(br[1], Rule::NuL, (long)i);
  r = b.rule(r, Rule::LamL, (long)i);
  r = b.rule(r, Rule::AndL, (long)i);
  r = b.rule(r, Rule::WkL, (long)i);
  b.back(b.subst(r, {{z, Arg::of(Term::variable(z, 1))}}, star), s);
  return {l};
}

std::vector<size_t> exists_left_t(Builder& b, size_t n, size_t i, const enc::Quant& q, const std::string& y) {
  Sequent prem = replaced(b.seq(n), true, i, substitute(q.body, q.var, var_arg(y, q.type)));
  size_t u = b.rule(n, Rule::LamL, (long)i);
  return {b.subst(u, {{y, Arg::of(enc::top_t(q.type))}}, prem)};
}

std::vector<size_t> forall_right_t(Builder& b, size_t n, size_t i, const enc::Quant& q, const std::string& y) {
  Sequent prem = replaced(b.seq(n), false, i, substitute(q.body, q.var, var_arg(y, q.type)));
  size_t u = b.rule(n, Rule::LamR, (long)i);
  return {b.subst(u, {{y, Arg::of(enc::bot_t(q.type))}}, prem)};
}

RuleInst mono(Builder& b, const enc::Quant& q, FPtr psi, FPtr chi, long li, long ri) {
  RuleInst m = at(Rule::Mono, li);
  m.rat = ri;
  m.var = hole_name(b, q.type);
  m.var_type = q.type;
  m.formula = substitute(q.body, q.var, Arg::of(mk_var(m.var)));
  m.psi = std::move(psi);
  m.chi = std::move(chi);
  m.ys = fresh_args(b, q.type);
  return m;
}

std::vector<size_t> exists_right_t(Builder& b, size_t n, size_t i, const enc::Quant& q, const FPtr& w) {
  size_t u = b.rule(n, Rule::LamR, (long)i);
  auto [p0, p1] = b.cut(u, substitute(q.body, q.var, Arg::of(w)));
  size_t l = b.rule(p0, Rule::WkR, (long)i + 1);
  l = b.move(l, false, 0, i);
  long last = (long)b.seq(p1).left.size() - 1;
  for (size_t p : b.apply(p1, mono(b, q, w, enc::top_t(q.type), last, (long)i)))
    b.back(b.rule(p, Rule::NuR, (long)i), p);
  return {l};
}

std::vector<size_t> forall_left_t(Builder& b, size_t n, size_t i, const enc::Quant& q, const FPtr& w) {
  size_t u = b.rule(n, Rule::LamL, (long)i);
  auto [p0, p1] = b.cut(u, substitute(q.body, q.var, Arg::of(w)));
  for (size_t p : b.apply(p0, mono(b, q, enc::bot_t(q.type), w, (long)i, 0)))
    b.back(b.rule(p, Rule::MuL, (long)i), p);
  size_t l = b.rule(p1, Rule::WkL, (long)i);
  l = b.move(l, true, b.seq(l).left.size() - 1, i);
  return {l};
}

std::vector<size_t> park(Builder& b, size_t n, const RuleInst& r, bool pre) {
  const Sequent c = b.seq(n);
  const Fs& side = pre ? c.left : c.right;
  size_t i = position(r, side, pre);
  Spine sp = spine(side[i]);
  FPtr fix = sp.head, chi = r.formula;
  if (!chi) throw ElaborationError(rule_name(r.tag) + ": missing invariant");
  auto yargs = var_args(r.ys, arg_types(fix->type));
  Subst inst;
  for (size_t k = 0; k < r.ys.size(); ++k) inst[r.ys[k]] = sp.args.at(k);
  FPtr fix_y = apply_args(fix, yargs), chi_y = apply_args(chi, yargs);
  FPtr body_chi_y = apply_args(substitute(fix->lhs, fix->name, Arg::of(chi)), yargs);
  RuleInst m = at(Rule::Mono, -1);
  m.var = hole_name(b, fix->type);
  m.var_type = fix->type;
  m.formula = apply_args(substitute(fix->lhs, fix->name, Arg::of(mk_var(m.var))), yargs);
  m.ys = r.ys;

  auto [p0, p1] = b.cut(n, apply_args(chi, sp.args));
  if (pre) {
    size_t lb = b.rule(p1, Rule::WkL, (long)i);
    lb = b.move(lb, true, b.seq(lb).left.size() - 1, i);
    Sequent star = b.seq(p0);
    star.left[i] = fix_y;
    star.right[0] = chi_y;
    size_t s = b.subst(p0, inst, star);
    auto [q0, q1] = b.cut(s, body_chi_y);
    size_t la = b.rule(q1, Rule::WkL, (long)i);
    la = b.move(la, true, b.seq(la).left.size() - 1, i);
    size_t u = b.rule(q0, Rule::MuL, (long)i);
    u = b.rule(u, Rule::WkR, 1);
    m.at = (long)i;
    m.rat = 0;
    m.psi = fix;
    m.chi = chi;
    for (size_t p : b.apply(u, m)) b.back(p, s);
    return {la, lb};
  }
  size_t lb = b.rule(p0, Rule::WkR, (long)i + 1);
  lb = b.move(lb, false, 0, i);
  Sequent star = b.seq(p1);
  star.left.back() = chi_y;
  star.right[i] = fix_y;
  size_t s = b.subst(p1, inst, star);
  auto [q0, q1] = b.cut(s, body_chi_y);
  size_t la = b.rule(q0, Rule::WkR, (long)i + 1);
  la = b.move(la, false, 0, i);
  size_t u = b.rule(q1, Rule::NuR, (long)i);
  u = b.rule(u, Rule::WkL, (long)b.seq(u).left.size() - 2);
  m.at = (long)b.seq(u).left.size() - 1;
  m.rat = (long)i;
  m.psi = chi;
  m.chi = fix;
  for (size_t p : b.apply(u, m)) b.back(p, s);
  return {la, lb};
}

std::vector<size_t> quantifier(Builder& b, size_t n, const RuleInst& r) {
  bool left = principal_side(r.tag) == Side::Left;
  const Sequent c = b.seq(n);
  size_t i = position(r, left ? c.left : c.right, left);
  auto q = enc::match_quant((left ? c.left : c.right)[i]);
  if (!q) throw ElaborationError(rule_name(r.tag) + ": principal is not a quantifier");
  bool nat = q->type->kind == Type::Kind::Nat;
  bool eigen = r.tag == Rule::ForallR || r.tag == Rule::ExistsL;
  if (eigen) {
    std::string y = r.var.empty() ? q->var : r.var;
    if (r.tag == Rule::ExistsL) return nat ? exists_left_n(b, n, i, y) : exists_left_t(b, n, i, *q, y);
    return nat ? forall_right_n(b, n, i, y) : forall_right_t(b, n, i, *q, y);
  }
  if (!r.witness) throw ElaborationError(rule_name(r.tag) + ": missing witness");
  if (nat) {
    if (!r.witness->is_term()) throw ElaborationError(rule_name(r.tag) + ": witness must be a term");
    const Term& t = *r.witness->term;
    return r.tag == Rule::ExistsR ? exists_right_n(b, n, i, t) : forall_left_n(b, n, i, t);
  }
  if (r.witness->is_term()) throw ElaborationError(rule_name(r.tag) + ": witness must be a formula");
  const FPtr& w = r.witness->formula;
  return r.tag == Rule::ExistsR ? exists_right_t(b, n, i, *q, w) : forall_left_t(b, n, i, *q, w);
}

bool is_quantifier(Rule r) {
  return r == Rule::ForallL || r == Rule::ForallR || r == Rule::ExistsL || r == Rule::ExistsR;
}

PreProof rewrite(const PreProof& pp, bool quantifiers, bool parks) {
  auto issues = validate_preproof(pp, true);
  if (!issues.empty())
    throw ElaborationError("input does not validate: " + issues[0].node + ": " + issues[0].message);
  PreProof out = pp;
  Builder b(out, "e");
  size_t original = out.nodes.size();
  for (size_t n = 0; n < original; ++n) {
    auto& nd = out.nodes[n];
    if (!nd.rule || !is_extended(nd.rule->tag)) continue;
    bool q = is_quantifier(nd.rule->tag);
    if (q ? !quantifiers : !parks) continue;
    RuleInst r = *nd.rule;
    std::vector<size_t> kids = nd.children;
    std::string id = nd.id;
    nd.rule.reset();
    nd.children.clear();
    try {
      auto leaves = expand_rule(b, n, r);
      if (leaves.size() != kids.size()) throw ElaborationError("premise count changed");
      for (size_t k = 0; k < kids.size(); ++k) b.fuse(leaves[k], kids[k]);
    } catch (const ElaborationError& e) {
      throw ElaborationError(id + ": " + e.what());
    } catch (const std::exception& e) {
      throw ElaborationError(id + ": " + rule_name(r.tag) + ": " + e.what());
    }
  }
  b.finish();
  return out;
}

}  // namespace

std::vector<size_t> expand_rule(Builder& b, size_t n, const RuleInst& r) {
  switch (r.tag) {
    case Rule::ForallL: case Rule::ForallR: case Rule::ExistsL: case Rule::ExistsR: return quantifier(b, n, r);
    case Rule::Pre: return park(b, n, r, true);
    case Rule::Post: return park(b, n, r, false);
    default: throw ElaborationError(rule_name(r.tag) + " is not an extended rule");
  }
}

PreProof eliminate_quantifiers(const PreProof& pp) { return rewrite(pp, true, false); }
PreProof eliminate_park(const PreProof& pp) { return rewrite(pp, false, true); }
PreProof elaborate(const PreProof& pp) { return rewrite(pp, true, true); }

void leq_zero_proof(Builder& b, size_t n) {
  const Sequent& c = b.seq(n);
  if (!c.left.empty() || c.right.size() != 1) throw ElaborationError("leq lemma: expected |- Z <= w");
  Spine sp = spine(c.right[0]);
  if (sp.args.size() != 2 || !sp.args[1].is_term() || sp.args[1].term->succ != 0 || sp.args[1].term->closed() ||
      !alpha_eq(c.right[0], enc::leq(Term::zero(), *sp.args[1].term)))
    throw ElaborationError("leq lemma: expected |- Z <= w, found " + to_string(c));
  std::string w = sp.args[1].term->var;

  RuleInst nat = at(Rule::Nat, -1);
  nat.var = w;
  size_t star = b.apply1(n, nat);
  b.proof().nodes[star].label = "★";
  size_t u = b.rule(star, Rule::MuL, 0);
  u = b.rule(u, Rule::LamL, 0);
  auto br = b.apply(u, at(Rule::OrL, 0));

  close_leq_refl(b, b.rule(br[0], Rule::EqL, 0));

  // w = S v /\ N v
  std::string v = b.fresh_var("v", nat_type());
  RuleInst ex = at(Rule::ExistsL, 0);
  ex.var = v;
  size_t s = expand_rule(b, br[1], ex).at(0);
  s = b.rule(s, Rule::AndL, 0);
  s = b.rule(s, Rule::EqL, 0);
  s = b.rule(s, Rule::MuR, 0);
  s = b.rule(s, Rule::LamR, 0);
  s = b.rule(s, Rule::LamR, 0);
  s = b.rule(s, Rule::OrR, 0);
  s = b.rule(s, Rule::WkR, 0);
  auto [p0, p1] = b.cut(s, enc::leq(Term::zero(), Term::variable(v)));
  b.back(b.subst(b.rule(p0, Rule::WkR, 1), {{w, Arg::of(Term::variable(v))}}, b.seq(star)), star);

  // S u <= S v from u <= v
  std::string uu = b.fresh_var("u", nat_type());
  Sequent dagger{{enc::leq(Term::variable(uu), Term::variable(v))},
                 {enc::leq(Term::variable(uu, 1), Term::variable(v, 1))}};
  size_t d = b.subst(b.rule(p1, Rule::WkL, 0), {{uu, Arg::of(Term::zero())}}, dagger);
  b.proof().nodes[d].label = "†";
  size_t e = b.rule(d, Rule::MuL, 0);
  e = b.rule(e, Rule::LamL, 0);
  e = b.rule(e, Rule::LamL, 0);
  auto db = b.apply(e, at(Rule::OrL, 0));
  close_leq_refl(b, b.rule(db[0], Rule::EqL, 0));
  size_t f = b.rule(db[1], Rule::MuR, 0);
  f = b.rule(f, Rule::LamR, 0);
  f = b.rule(f, Rule::LamR, 0);
  f = b.rule(f, Rule::OrR, 0);
  f = b.rule(f, Rule::WkR, 0);
  b.back(b.subst(f, {{uu, Arg::of(Term::variable(uu, 1))}}, dagger), d);
}

PreProof lemma_b1_proof() {
  PreProof pp;
  pp.env = {{"t", nat_type()}};
  Builder b(pp, "n");
  size_t root = b.node(Sequent{{}, {enc::leq(Term::zero(), Term::variable("t"))}});
  b.set_root(root);
  leq_zero_proof(b, root);
  b.finish();
  return pp;
}

PreProof numeral_case_split(const TypeEnv& env, const Family& family, const Sequent& seq, const std::string& x,
                            unsigned depth) {
  auto it = env.find(x);
  if (it == env.end() || it->second->kind != Type::Kind::Nat) throw ElaborationError(x + " is not an N variable");
  PreProof pp;
  pp.env = env;
  Builder b(pp, "c");
  size_t cur = b.node(seq);
  b.set_root(cur);
  RuleInst nat = at(Rule::Nat, -1);
  nat.var = x;
  cur = b.apply1(cur, nat);
  Sequent shifted = seq;
  for (unsigned i = 0;; ++i) {
    long last = (long)b.seq(cur).left.size() - 1;
    size_t u = b.rule(cur, Rule::MuL, last);
    u = b.rule(u, Rule::LamL, last);
    auto br = b.apply(u, at(Rule::OrL, last));

    size_t zero = b.rule(br[0], Rule::EqL, last);
    PreProof sub = family(i);
    if (!seq_alpha_eq(sub.nodes.at(sub.root).seq, b.seq(zero)))
      throw ElaborationError("family(" + std::to_string(i) + ") proves " + to_string(sub.nodes[sub.root].seq) +
                             ", expected " + to_string(b.seq(zero)));
    for (const auto& [name, t] : sub.env) {
      auto [pos, fresh] = pp.env.emplace(name, t);
      if (!fresh && !type_eq(pos->second, t)) throw ElaborationError("family: conflicting type for " + name);
    }
    std::vector<size_t> map;
    for (const auto& nd : sub.nodes) map.push_back(b.node(nd.seq, nd.label));
    for (size_t k = 0; k < sub.nodes.size(); ++k) {
      pp.nodes[map[k]].rule = sub.nodes[k].rule;
      for (size_t ch : sub.nodes[k].children) pp.nodes[map[k]].children.push_back(map[ch]);
    }
    for (auto [l, t] : sub.back) b.back(map[l], map[t]);
    b.fuse(zero, map[sub.root]);

    std::string xp = b.fresh_var(x, nat_type());
    RuleInst ex = at(Rule::ExistsL, last);
    ex.var = xp;
    size_t s = expand_rule(b, br[1], ex).at(0);
    s = b.rule(s, Rule::AndL, last);
    s = b.rule(s, Rule::EqL, last);
    shifted = substitute(shifted, Subst{{x, Arg::of(Term::variable(x, 1))}});
    Sequent next = shifted;
    next.left.push_back(enc::nat(Term::variable(x)));
    cur = b.subst(s, {{x, Arg::of(Term::variable(xp))}}, next);
    if (i == depth) break;
  }
  b.finish();
  return pp;
}

}  // namespace hfl::elab
