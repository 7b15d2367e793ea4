#include "hfl/kernel.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "hfl/encodings.hpp"

namespace hfl {

namespace {

struct RuleInfo {
  Rule r;
  const char* name;
};

const RuleInfo kRules[] = {
    {Rule::Axiom, "Axiom"}, {Rule::Cut, "Cut"},       {Rule::WkL, "WkL"},         {Rule::WkR, "WkR"},
    {Rule::CtrL, "CtrL"},   {Rule::CtrR, "CtrR"},     {Rule::ExL, "ExL"},         {Rule::ExR, "ExR"},
    {Rule::Subst, "Subst"}, {Rule::Mono, "Mono"},     {Rule::EqL, "EqL"},         {Rule::EqR, "EqR"},
    {Rule::OrL, "OrL"},     {Rule::OrR, "OrR"},       {Rule::AndL, "AndL"},       {Rule::AndR, "AndR"},
    {Rule::LamL, "LamL"},   {Rule::LamR, "LamR"},     {Rule::MuL, "MuL"},         {Rule::MuR, "MuR"},
    {Rule::NuL, "NuL"},     {Rule::NuR, "NuR"},       {Rule::Nat, "Nat"},         {Rule::P1, "P1"},
    {Rule::P2, "P2"},       {Rule::ForallL, "ForallL"}, {Rule::ForallR, "ForallR"}, {Rule::ExistsL, "ExistsL"},
    {Rule::ExistsR, "ExistsR"}, {Rule::Pre, "Pre"},   {Rule::Post, "Post"},
};

std::string str(const FPtr& f) { return to_string(f); }
std::string str(const Sequent& s) { return to_string(s); }

std::vector<FPtr> erase_at(const std::vector<FPtr>& v, size_t i) {
  std::vector<FPtr> r = v;
  r.erase(r.begin() + (long)i);
  return r;
}

// in-place replacement of position i by the given formulas; links record provenance
struct SideBuilder {
  std::vector<FPtr> fs;
  std::vector<OccLink> links;
  static SideBuilder copy_of(const std::vector<FPtr>& v) {
    SideBuilder b;
    b.fs = v;
    for (size_t i = 0; i < v.size(); ++i) b.links.push_back({(long)i, StepKind::Copy});
    return b;
  }
  void replace(size_t i, const std::vector<std::pair<FPtr, OccLink>>& with) {
    fs.erase(fs.begin() + (long)i);
    links.erase(links.begin() + (long)i);
    for (size_t k = 0; k < with.size(); ++k) {
      fs.insert(fs.begin() + (long)(i + k), with[k].first);
      links.insert(links.begin() + (long)(i + k), with[k].second);
    }
  }
  void insert(size_t i, const FPtr& f, OccLink l) {
    fs.insert(fs.begin() + (long)i, f);
    links.insert(links.begin() + (long)i, l);
  }
};

struct PremiseBuilder {
  SideBuilder l, r;
  Sequent seq() const { return {l.fs, r.fs}; }
  PremiseLink link() const { return {l.links, r.links, -1}; }
};

PremiseBuilder copy_of(const Sequent& s) { return {SideBuilder::copy_of(s.left), SideBuilder::copy_of(s.right)}; }

void add(Derivation& d, const PremiseBuilder& p, long mono = -1) {
  d.premises.push_back(p.seq());
  d.links.push_back(p.link());
  d.links.back().mono_occ = mono;
}

size_t pick(const RuleInst& r, const std::vector<FPtr>& side, bool left, const char* what) {
  if (side.empty()) throw RuleError(std::string(what) + ": no formula on the " + (left ? "left" : "right"));
  long i = r.at;
  if (i < 0) i = left ? (long)side.size() - 1 : 0;
  if (i >= (long)side.size())
    throw RuleError(std::string(what) + ": principal position " + std::to_string(i) + " out of range");
  return (size_t)i;
}

void expect_alpha(const FPtr& found, const FPtr& expected, const std::string& what) {
  if (!alpha_eq(found, expected)) throw RuleError(what + ": expected " + str(expected) + ", found " + str(found));
}

FPtr applied_to(const FPtr& f, const std::vector<std::string>& ys, const std::vector<TypeP>& tys) {
  std::vector<Arg> args;
  for (size_t i = 0; i < ys.size(); ++i)
    args.push_back(tys[i]->kind == Type::Kind::Nat ? Arg::of(Term::variable(ys[i])) : Arg::of(mk_var(ys[i])));
  return apply_args(f, args);
}

void check_fresh_args(const TypeEnv& env, const std::vector<std::string>& ys, const TypeP& t,
                      const std::set<std::string>& avoid, const char* what) {
  auto tys = arg_types(t);
  if (ys.size() != tys.size())
    throw SideConditionViolated(std::string(what) + ": expected " + std::to_string(tys.size()) +
                                " fresh arguments for type " + type_str(t) + ", got " + std::to_string(ys.size()));
  std::set<std::string> seen;
  for (size_t i = 0; i < ys.size(); ++i) {
    if (!seen.insert(ys[i]).second) throw SideConditionViolated(std::string(what) + ": repeated argument " + ys[i]);
    if (avoid.count(ys[i]))
      throw SideConditionViolated(std::string(what) + ": argument " + ys[i] + " occurs free in the context");
    auto it = env.find(ys[i]);
    if (it == env.end()) throw UnboundVariable(ys[i]);
    if (!type_eq(it->second, tys[i]))
      throw SideConditionViolated(std::string(what) + ": argument " + ys[i] + " has type " +
                                  type_str(it->second) + ", expected " + type_str(tys[i]));
  }
}

std::set<std::string> fv_all(std::initializer_list<const std::vector<FPtr>*> sides,
                             std::initializer_list<FPtr> extra = {}) {
  std::set<std::string> out;
  for (const auto* s : sides)
    for (const auto& f : *s) {
      auto v = free_vars(f);
      out.insert(v.begin(), v.end());
    }
  for (const auto& f : extra) {
    auto v = free_vars(f);
    out.insert(v.begin(), v.end());
  }
  return out;
}

Term rw(const Term& u, const Term& s, const Term& t) {
  if (u.var == s.var && u.succ >= s.succ) return t.plus(u.succ - s.succ);
  return u;
}

FPtr rewrite_rec(const FPtr& f, const Term& s, const Term& t) {
  switch (f->kind) {
    case FKind::Eq: {
      Term a = rw(f->t1, s, t), b = rw(f->t2, s, t);
      if (a == f->t1 && b == f->t2) return f;
      return mk_eq(a, b);
    }
    case FKind::Var: return f;
    case FKind::Or:
    case FKind::And: {
      FPtr a = rewrite_rec(f->lhs, s, t), b = rewrite_rec(f->rhs, s, t);
      if (a == f->lhs && b == f->rhs) return f;
      return f->kind == FKind::Or ? mk_or(a, b) : mk_and(a, b);
    }
    case FKind::App: {
      FPtr fn = rewrite_rec(f->lhs, s, t);
      if (f->term_arg) {
        Term a = rw(f->t1, s, t);
        if (fn == f->lhs && a == f->t1) return f;
        return mk_app(fn, a);
      }
      FPtr a = rewrite_rec(f->rhs, s, t);
      if (fn == f->lhs && a == f->rhs) return f;
      return mk_app(fn, a);
    }
    default: {
      if (!s.var.empty() && f->name == s.var) return f;  // shadowed
      FPtr body = f->lhs;
      std::string x = f->name;
      if (!t.var.empty() && x == t.var) {
        FPtr probe = rewrite_rec(body, s, Term::zero());
        if (probe == body) return f;  // nothing to rewrite underneath
        x = fresh_name(x);
        body = substitute(body, f->name, Arg::of(Term::variable(x)));
      }
      FPtr nb = rewrite_rec(body, s, t);
      if (nb == f->lhs && x == f->name) return f;
      Formula g = *f;
      g.name = x;
      g.lhs = nb;
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

}  // namespace

std::string rule_name(Rule r) {
  for (const auto& i : kRules)
    if (i.r == r) return i.name;
  return "?";
}

std::optional<Rule> rule_from_name(const std::string& s) {
  for (const auto& i : kRules)
    if (s == i.name) return i.r;
  return std::nullopt;
}

bool is_extended(Rule r) {
  switch (r) {
    case Rule::ForallL: case Rule::ForallR: case Rule::ExistsL: case Rule::ExistsR:
    case Rule::Pre: case Rule::Post: return true;
    default: return false;
  }
}

bool is_logical(Rule r) {
  switch (r) {
    case Rule::EqL: case Rule::EqR: case Rule::OrL: case Rule::OrR: case Rule::AndL: case Rule::AndR:
    case Rule::LamL: case Rule::LamR: case Rule::MuL: case Rule::MuR: case Rule::NuL: case Rule::NuR: return true;
    default: return false;
  }
}

Side principal_side(Rule r) {
  switch (r) {
    case Rule::WkL: case Rule::CtrL: case Rule::ExL: case Rule::EqL: case Rule::OrL: case Rule::AndL:
    case Rule::LamL: case Rule::MuL: case Rule::NuL: case Rule::P2: case Rule::ForallL: case Rule::ExistsL:
    case Rule::Pre: case Rule::Mono: return Side::Left;
    case Rule::WkR: case Rule::CtrR: case Rule::ExR: case Rule::EqR: case Rule::OrR: case Rule::AndR:
    case Rule::LamR: case Rule::MuR: case Rule::NuR: case Rule::ForallR: case Rule::ExistsR:
    case Rule::Post: return Side::Right;
    default: return Side::None;
  }
}

std::string occ_str(const Occ& o) { return std::string(o.right ? "R" : "L") + std::to_string(o.index); }

FPtr rewrite_term(const FPtr& f, const Term& s, const Term& t) { return rewrite_rec(f, s, t); }

Derivation derive(const TypeEnv& env, const Sequent& c, const RuleInst& r, const std::vector<Sequent>& given) {
  Derivation d;
  const auto& L = c.left;
  const auto& R = c.right;
  switch (r.tag) {
    case Rule::Axiom: {
      if (L.size() != 1 || R.size() != 1 || !alpha_eq(L[0], R[0]))
        throw RuleError("Axiom: conclusion must be φ |- φ, found " + str(c));
      return d;
    }
    case Rule::Cut: {
      if (!r.formula) throw RuleError("Cut: missing cut formula");
      check_prop(env, r.formula);
      PremiseBuilder a = copy_of(c), b = copy_of(c);
      a.r.insert(0, r.formula, {-1, StepKind::Copy});
      b.l.insert(b.l.fs.size(), r.formula, {-1, StepKind::Copy});
      add(d, a);
      add(d, b);
      return d;
    }
    case Rule::WkL:
    case Rule::WkR: {
      bool left = r.tag == Rule::WkL;
      size_t i = pick(r, left ? L : R, left, "Wk");
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).replace(i, {});
      add(d, p);
      return d;
    }
    case Rule::CtrL:
    case Rule::CtrR: {
      bool left = r.tag == Rule::CtrL;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, "Ctr");
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).insert(i + 1, side[i], {(long)i, StepKind::Copy});
      add(d, p);
      return d;
    }
    case Rule::ExL:
    case Rule::ExR: {
      bool left = r.tag == Rule::ExL;
      const auto& side = left ? L : R;
      if (side.size() < 2) throw RuleError("Ex: needs two formulas on the side");
      long i = r.at < 0 ? (left ? (long)side.size() - 2 : 0) : r.at;
      if (i + 1 >= (long)side.size()) throw RuleError("Ex: position out of range");
      PremiseBuilder p = copy_of(c);
      auto& sb = left ? p.l : p.r;
      std::swap(sb.fs[i], sb.fs[i + 1]);
      std::swap(sb.links[i], sb.links[i + 1]);
      add(d, p);
      return d;
    }
    case Rule::Subst: {
      if (given.size() != 1) throw RuleError("Subst: needs exactly one premise");
      for (const auto& [x, a] : r.subst) {
        auto it = env.find(x);
        if (it == env.end()) throw UnboundVariable(x);
        TypeP at = infer_arg_type(env, a);
        if (!type_eq(at, it->second)) throw IllTyped("Subst " + x, type_str(it->second), type_str(at));
      }
      const Sequent& p = given[0];
      if (p.left.size() != L.size() || p.right.size() != R.size())
        throw SchemaMismatch(0, "a premise with " + std::to_string(L.size()) + "|" + std::to_string(R.size()) +
                                    " formulas", str(p));
      Sequent img = substitute(p, r.subst);
      for (size_t i = 0; i < L.size(); ++i)
        if (!alpha_eq(img.left[i], L[i]))
          throw RuleError("Subst: left " + std::to_string(i) + " of the premise becomes " + str(img.left[i]) +
                          ", conclusion has " + str(L[i]));
      for (size_t i = 0; i < R.size(); ++i)
        if (!alpha_eq(img.right[i], R[i]))
          throw RuleError("Subst: right " + std::to_string(i) + " of the premise becomes " + str(img.right[i]) +
                          ", conclusion has " + str(R[i]));
      PremiseBuilder b = copy_of(p);
      for (auto& l : b.l.links) l.kind = StepKind::Transfer;
      for (auto& l : b.r.links) l.kind = StepKind::Transfer;
      add(d, b);
      return d;
    }
    case Rule::Mono: {
      if (!r.formula || !r.psi || !r.chi || r.var.empty() || !r.var_type)
        throw RuleError("Mono: needs hole, φ, ψ and χ");
      if (r.var_type->kind == Type::Kind::Nat) throw RuleError("Mono: the hole may not have type N");
      TypeEnv ext = env;
      ext[r.var] = r.var_type;
      check_prop(ext, r.formula);
      for (const auto& f : {r.psi, r.chi}) {
        TypeP t = infer_type(env, f);
        if (!type_eq(t, r.var_type)) throw IllTyped("Mono argument " + str(f), type_str(r.var_type), type_str(t));
      }
      size_t li = pick(r, L, true, "Mono");
      RuleInst rr = r;
      rr.at = r.rat;
      size_t ri = pick(rr, R, false, "Mono");
      expect_alpha(L[li], substitute(r.formula, r.var, Arg::of(r.psi)), "Mono left principal");
      expect_alpha(R[ri], substitute(r.formula, r.var, Arg::of(r.chi)), "Mono right principal");
      auto gl = erase_at(L, li), dr = erase_at(R, ri);
      check_fresh_args(env, r.ys, r.var_type, fv_all({&gl, &dr}, {r.psi, r.chi}), "Mono");
      auto tys = arg_types(r.var_type);
      FPtr py = applied_to(r.psi, r.ys, tys), cy = applied_to(r.chi, r.ys, tys);
      size_t k = hole_count(r.formula, r.var);
      for (size_t j = 0; j < k; ++j) {
        PremiseBuilder p = copy_of(c);
        p.l.replace(li, {{py, {(long)li, StepKind::MonoArg}}});
        p.r.replace(ri, {{cy, {(long)ri, StepKind::MonoArg}}});
        add(d, p, (long)j);
      }
      return d;
    }
    case Rule::EqL: {
      size_t i = pick(r, L, true, "EqL");
      if (L[i]->kind != FKind::Eq) throw RuleError("EqL: principal is not an equation: " + str(L[i]));
      Term s = L[i]->t1, t = L[i]->t2;
      Sequent ctx{erase_at(L, i), R};
      Sequent prem;
      if (r.tmpl) {
        const auto& tp = *r.tmpl;
        TypeEnv ext = env;
        ext[tp.x] = nat_type();
        ext[tp.y] = nat_type();
        check_sequent(ext, tp.ctx);
        Subst conc{{tp.x, Arg::of(s)}, {tp.y, Arg::of(t)}};
        Subst prem_s{{tp.x, Arg::of(t)}, {tp.y, Arg::of(s)}};
        Sequent expect = substitute(tp.ctx, conc);
        if (!seq_alpha_eq(expect, ctx))
          throw RuleError("EqL: template instance " + str(expect) + " differs from the context " + str(ctx));
        prem = substitute(tp.ctx, prem_s);
      } else {
        for (const auto& f : ctx.left) prem.left.push_back(rewrite_term(f, s, t));
        for (const auto& f : ctx.right) prem.right.push_back(rewrite_term(f, s, t));
      }
      PremiseBuilder p;
      p.l.fs = prem.left;
      p.r.fs = prem.right;
      for (size_t k = 0; k < prem.left.size(); ++k)
        p.l.links.push_back({(long)(k < i ? k : k + 1), StepKind::Transfer});
      for (size_t k = 0; k < prem.right.size(); ++k) p.r.links.push_back({(long)k, StepKind::Transfer});
      add(d, p);
      return d;
    }
    case Rule::EqR: {
      size_t i = pick(r, R, false, "EqR");
      if (R[i]->kind != FKind::Eq || R[i]->t1 != R[i]->t2)
        throw RuleError("EqR: principal is not t = t: " + str(R[i]));
      return d;
    }
    case Rule::OrL:
    case Rule::AndL:
    case Rule::OrR:
    case Rule::AndR: {
      bool left = r.tag == Rule::OrL || r.tag == Rule::AndL;
      bool is_or = r.tag == Rule::OrL || r.tag == Rule::OrR;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, rule_name(r.tag).c_str());
      const FPtr& f = side[i];
      if (f->kind != (is_or ? FKind::Or : FKind::And))
        throw RuleError(rule_name(r.tag) + ": principal has the wrong connective: " + str(f));
      OccLink l0{(long)i, StepKind::Operand0}, l1{(long)i, StepKind::Operand1};
      bool split = (left && is_or) || (!left && !is_or);
      if (split) {
        for (int k = 0; k < 2; ++k) {
          PremiseBuilder p = copy_of(c);
          (left ? p.l : p.r).replace(i, {{k ? f->rhs : f->lhs, k ? l1 : l0}});
          add(d, p);
        }
      } else {
        PremiseBuilder p = copy_of(c);
        (left ? p.l : p.r).replace(i, {{f->lhs, l0}, {f->rhs, l1}});
        add(d, p);
      }
      return d;
    }
    case Rule::LamL:
    case Rule::LamR: {
      bool left = r.tag == Rule::LamL;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, "Lam");
      Spine sp = spine(side[i]);
      if (sp.head->kind != FKind::Lam || sp.args.empty())
        throw RuleError(rule_name(r.tag) + ": principal is not a beta-redex: " + str(side[i]));
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).replace(i, {{beta_head(side[i]), {(long)i, StepKind::Beta}}});
      add(d, p);
      return d;
    }
    case Rule::MuL:
    case Rule::MuR:
    case Rule::NuL:
    case Rule::NuR: {
      bool left = r.tag == Rule::MuL || r.tag == Rule::NuL;
      FKind want = (r.tag == Rule::MuL || r.tag == Rule::MuR) ? FKind::Mu : FKind::Nu;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, rule_name(r.tag).c_str());
      Spine sp = spine(side[i]);
      if (sp.head->kind != want)
        throw RuleError(rule_name(r.tag) + ": principal head is not " + (want == FKind::Mu ? "mu" : "nu") +
                        ": " + str(side[i]));
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).replace(i, {{unfold(side[i]), {(long)i, StepKind::Unfold}}});
      add(d, p);
      return d;
    }
    case Rule::Nat: {
      auto it = env.find(r.var);
      if (r.var.empty() || it == env.end()) throw UnboundVariable(r.var.empty() ? "(Nat variable)" : r.var);
      if (it->second->kind != Type::Kind::Nat) throw RuleError("Nat: " + r.var + " is not of type N");
      PremiseBuilder p = copy_of(c);
      p.l.insert(L.size(), enc::nat(Term::variable(r.var)), {-1, StepKind::Copy});
      add(d, p);
      return d;
    }
    case Rule::P1: {
      if (L.size() != 1 || !R.empty() || L[0]->kind != FKind::Eq || L[0]->t1.succ == 0 ||
          L[0]->t2 != Term::zero())
        throw RuleError("P1: conclusion must be S s = Z |-, found " + str(c));
      return d;
    }
    case Rule::P2: {
      size_t i = pick(r, L, true, "P2");
      const FPtr& f = L[i];
      if (f->kind != FKind::Eq || f->t1.succ == 0 || f->t2.succ == 0)
        throw RuleError("P2: principal must be S s = S t: " + str(f));
      PremiseBuilder p = copy_of(c);
      Term a = f->t1, b = f->t2;
      a.succ--;
      b.succ--;
      p.l.replace(i, {{mk_eq(a, b), {(long)i, StepKind::Plain}}});
      add(d, p);
      return d;
    }
    case Rule::ForallL:
    case Rule::ExistsR: {
      bool left = r.tag == Rule::ForallL;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, rule_name(r.tag).c_str());
      auto q = enc::match_quant(side[i]);
      if (!q || q->exists == left) throw RuleError(rule_name(r.tag) + ": principal is not the expected quantifier");
      if (!r.witness) throw RuleError(rule_name(r.tag) + ": missing witness");
      TypeP wt = infer_arg_type(env, *r.witness);
      if (!type_eq(wt, q->type)) throw IllTyped("witness", type_str(q->type), type_str(wt));
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).replace(i, {{substitute(q->body, q->var, *r.witness), {(long)i, StepKind::Plain}}});
      add(d, p);
      return d;
    }
    case Rule::ForallR:
    case Rule::ExistsL: {
      bool left = r.tag == Rule::ExistsL;
      const auto& side = left ? L : R;
      size_t i = pick(r, side, left, rule_name(r.tag).c_str());
      auto q = enc::match_quant(side[i]);
      if (!q || q->exists != left) throw RuleError(rule_name(r.tag) + ": principal is not the expected quantifier");
      std::string y = r.var.empty() ? q->var : r.var;
      auto it = env.find(y);
      if (it == env.end()) throw UnboundVariable(y);
      if (!type_eq(it->second, q->type)) throw IllTyped("eigenvariable " + y, type_str(q->type), type_str(it->second));
      auto ctxl = left ? erase_at(L, i) : L;
      auto ctxr = left ? R : erase_at(R, i);
      if (fv_all({&ctxl, &ctxr}).count(y))
        throw SideConditionViolated(rule_name(r.tag) + ": " + y + " occurs free in the context");
      if (y != q->var && free_vars(side[i]).count(y))
        throw SideConditionViolated(rule_name(r.tag) + ": " + y + " occurs free in the quantified formula");
      Arg ya = q->type->kind == Type::Kind::Nat ? Arg::of(Term::variable(y)) : Arg::of(mk_var(y));
      PremiseBuilder p = copy_of(c);
      (left ? p.l : p.r).replace(i, {{substitute(q->body, q->var, ya), {(long)i, StepKind::Plain}}});
      add(d, p);
      return d;
    }
    case Rule::Pre:
    case Rule::Post: {
      bool pre = r.tag == Rule::Pre;
      const auto& side = pre ? L : R;
      size_t i = pick(r, side, pre, rule_name(r.tag).c_str());
      Spine sp = spine(side[i]);
      if (sp.head->kind != (pre ? FKind::Mu : FKind::Nu))
        throw RuleError(rule_name(r.tag) + ": principal head is not " + (pre ? "mu" : "nu"));
      if (!r.formula) throw RuleError(rule_name(r.tag) + ": missing invariant");
      TypeP t = sp.head->type;
      TypeP ct = infer_type(env, r.formula);
      if (!type_eq(ct, t)) throw IllTyped("invariant", type_str(t), type_str(ct));
      FPtr body_chi = substitute(sp.head->lhs, sp.head->name, Arg::of(r.formula));
      auto ctxl = pre ? erase_at(L, i) : L;
      auto ctxr = pre ? R : erase_at(R, i);
      check_fresh_args(env, r.ys, t, fv_all({&ctxl, &ctxr}, {body_chi}), rule_name(r.tag).c_str());
      auto tys = arg_types(t);
      FPtr by = applied_to(body_chi, r.ys, tys), cy = applied_to(r.formula, r.ys, tys);
      FPtr cpsi = apply_args(r.formula, sp.args);
      OccLink lk{(long)i, StepKind::Plain};
      PremiseBuilder a = copy_of(c), b = copy_of(c);
      if (pre) {
        a.l.replace(i, {{by, lk}});
        a.r.insert(0, cy, {-1, StepKind::Copy});
        b.l.replace(i, {{cpsi, lk}});
      } else {
        a.r.replace(i, {{by, lk}});
        a.l.insert(L.size(), cy, {-1, StepKind::Copy});
        b.r.replace(i, {{cpsi, lk}});
      }
      add(d, a);
      add(d, b);
      return d;
    }
  }
  throw RuleError("unknown rule");
}

Derivation check_rule(const TypeEnv& env, const Sequent& concl, const RuleInst& r,
                      const std::vector<Sequent>& premises) {
  check_sequent(env, concl);
  for (const auto& p : premises) check_sequent(env, p);
  Derivation d = derive(env, concl, r, premises);
  if (d.premises.size() != premises.size())
    throw RuleError(rule_name(r.tag) + ": expected " + std::to_string(d.premises.size()) + " premises, found " +
                    std::to_string(premises.size()));
  for (size_t i = 0; i < premises.size(); ++i)
    if (!seq_alpha_eq(d.premises[i], premises[i]))
      throw SchemaMismatch((long)i, str(d.premises[i]), str(premises[i]));
  return d;
}

std::map<Occ, Occ> relevant_occurrences(const Derivation& d, size_t premise) {
  std::map<Occ, Occ> out;
  const PremiseLink& pl = d.links.at(premise);
  for (size_t i = 0; i < pl.left.size(); ++i)
    if (pl.left[i].src >= 0) out[{false, i}] = {false, (size_t)pl.left[i].src};
  for (size_t i = 0; i < pl.right.size(); ++i)
    if (pl.right[i].src >= 0) out[{true, i}] = {true, (size_t)pl.right[i].src};
  return out;
}

// ---------------------------------------------------------------- pre-proofs

std::optional<size_t> PreProof::find(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

bool uses_extended(const PreProof& pp) {
  for (const auto& n : pp.nodes)
    if (n.rule && is_extended(n.rule->tag)) return true;
  return false;
}

std::vector<Issue> validate_preproof(const PreProof& pp, bool allow_extended) {
  std::vector<Issue> issues;
  const size_t n = pp.nodes.size();
  if (n == 0) return {{"", "empty proof"}};
  if (pp.root >= n) return {{"", "root out of range"}};
  // tree shape
  std::vector<int> parents(n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t c : pp.nodes[i].children) {
      if (c >= n) issues.push_back({pp.nodes[i].id, "child index out of range"});
      else parents[c]++;
    }
  if (!issues.empty()) return issues;
  if (parents[pp.root] != 0) issues.push_back({pp.nodes[pp.root].id, "root has a parent"});
  for (size_t i = 0; i < n; ++i) {
    if (i != pp.root && parents[i] != 1)
      issues.push_back({pp.nodes[i].id, parents[i] == 0 ? "node is not reachable from the root"
                                                        : "node has several parents"});
  }
  {
    std::vector<char> seen(n, 0);
    std::vector<size_t> st{pp.root};
    while (!st.empty()) {
      size_t v = st.back();
      st.pop_back();
      if (seen[v]) {
        issues.push_back({pp.nodes[v].id, "cycle in the tree structure"});
        continue;
      }
      seen[v] = 1;
      for (size_t c : pp.nodes[v].children) st.push_back(c);
    }
  }
  if (!issues.empty()) return issues;
  for (size_t i = 0; i < n; ++i) {
    const Node& nd = pp.nodes[i];
    try {
      check_sequent(pp.env, nd.seq);
    } catch (const std::exception& e) {
      issues.push_back({nd.id, std::string("ill-typed sequent: ") + e.what()});
      continue;
    }
    if (!nd.rule) {
      if (!nd.children.empty()) issues.push_back({nd.id, "open leaf has children"});
      auto it = pp.back.find(i);
      if (it == pp.back.end()) {
        issues.push_back({nd.id, "open leaf without a back-edge"});
        continue;
      }
      size_t tgt = it->second;
      if (tgt >= n) {
        issues.push_back({nd.id, "back-edge target out of range"});
        continue;
      }
      const Node& tn = pp.nodes[tgt];
      if (!tn.rule || tn.children.empty())
        issues.push_back({nd.id, "back-edge target " + tn.id + " is a leaf"});
      else if (!seq_alpha_eq(tn.seq, nd.seq))
        issues.push_back({nd.id, "back-edge target " + tn.id + " has a different sequent: " + to_string(tn.seq) +
                                     " vs " + to_string(nd.seq)});
      continue;
    }
    if (pp.back.count(i)) issues.push_back({nd.id, "back-edge from a node that is not an open leaf"});
    if (is_extended(nd.rule->tag) && !allow_extended) {
      issues.push_back({nd.id, "admissible rule " + rule_name(nd.rule->tag) + " in a core proof"});
      continue;
    }
    std::vector<Sequent> prem;
    bool typed = true;
    for (size_t c : nd.children) {
      prem.push_back(pp.nodes[c].seq);
      try {
        check_sequent(pp.env, pp.nodes[c].seq);
      } catch (const std::exception&) {
        typed = false;
      }
    }
    if (!typed) continue;  // reported at the child
    try {
      check_rule(pp.env, nd.seq, *nd.rule, prem);
    } catch (const std::exception& e) {
      std::string msg = e.what(), tag = rule_name(nd.rule->tag);
      if (msg.rfind(tag, 0) != 0) msg = tag + ": " + msg;
      issues.push_back({nd.id, msg});
    }
  }
  for (const auto& [leaf, tgt] : pp.back)
    if (leaf >= n) issues.push_back({"", "back-edge source out of range"});
  return issues;
}

ProofGraph::ProofGraph(const PreProof& p) : pp(&p), out(p.nodes.size()) {
  for (size_t i = 0; i < p.nodes.size(); ++i) {
    const Node& nd = p.nodes[i];
    if (!nd.rule) {
      auto it = p.back.find(i);
      if (it == p.back.end()) continue;
      PremiseLink id;
      for (size_t k = 0; k < nd.seq.left.size(); ++k) id.left.push_back({(long)k, StepKind::Copy});
      for (size_t k = 0; k < nd.seq.right.size(); ++k) id.right.push_back({(long)k, StepKind::Copy});
      out[i].push_back({it->second, true, std::move(id)});
      continue;
    }
    std::vector<Sequent> prem;
    for (size_t c : nd.children) prem.push_back(p.nodes[c].seq);
    Derivation d = derive(p.env, nd.seq, *nd.rule, prem);
    for (size_t k = 0; k < nd.children.size() && k < d.links.size(); ++k)
      out[i].push_back({nd.children[k], false, d.links[k]});
  }
}

std::vector<size_t> ProofGraph::successors(size_t n) const {
  std::vector<size_t> r;
  for (const auto& e : out[n]) r.push_back(e.to);
  return r;
}

std::vector<size_t> successors(const PreProof& pp, size_t n) {
  const Node& nd = pp.nodes.at(n);
  if (!nd.rule) {
    auto it = pp.back.find(n);
    if (it == pp.back.end()) return {};
    return {it->second};
  }
  return nd.children;
}

// --------------------------------------------------------- occurrence steps

FPtr transfer(const FPtr& a, const FPtr& p) {
  if (p->kind == FKind::Var || a->kind != p->kind) return p;
  switch (p->kind) {
    case FKind::Eq: return p;
    case FKind::Or:
    case FKind::And: {
      FPtr l = transfer(a->lhs, p->lhs), r = transfer(a->rhs, p->rhs);
      if (l == p->lhs && r == p->rhs) return p;
      return p->kind == FKind::Or ? mk_or(l, r) : mk_and(l, r);
    }
    case FKind::App: {
      if (a->term_arg != p->term_arg) return p;
      FPtr fn = transfer(a->lhs, p->lhs);
      if (p->term_arg) return fn == p->lhs ? p : mk_app(fn, p->t1);
      FPtr ar = transfer(a->rhs, p->rhs);
      if (fn == p->lhs && ar == p->rhs) return p;
      return mk_app(fn, ar);
    }
    default: {
      FPtr body = transfer(a->lhs, p->lhs);
      if (body == p->lhs && p->ann == a->ann) return p;
      Formula g = *p;
      g.lhs = body;
      if (is_fix(p->kind)) g.ann = a->ann;
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

FPtr unfold_with(const FPtr& f, const FPtr& copy) {
  Spine sp = spine(f);
  if (!is_fix(sp.head->kind)) throw TypeError("unfold: head is not a fixpoint: " + to_string(f));
  FPtr body = substitute(sp.head->lhs, sp.head->name, Arg::of(copy));
  return apply_args(body, sp.args);
}

namespace {

// pre-order, function before argument, left before right
void holes(const FPtr& phi, const FPtr* ann, const std::string& x, std::vector<FPtr>& out) {
  switch (phi->kind) {
    case FKind::Eq: return;
    case FKind::Var:
      if (phi->name == x) out.push_back(ann ? *ann : phi);
      return;
    case FKind::Or:
    case FKind::And:
      holes(phi->lhs, ann ? &(*ann)->lhs : nullptr, x, out);
      holes(phi->rhs, ann ? &(*ann)->rhs : nullptr, x, out);
      return;
    case FKind::App:
      holes(phi->lhs, ann ? &(*ann)->lhs : nullptr, x, out);
      if (!phi->term_arg) holes(phi->rhs, ann ? &(*ann)->rhs : nullptr, x, out);
      return;
    default:
      if (phi->name == x) return;
      holes(phi->lhs, ann ? &(*ann)->lhs : nullptr, x, out);
      return;
  }
}

}  // namespace

size_t hole_count(const FPtr& phi, const std::string& hole) {
  std::vector<FPtr> out;
  holes(phi, nullptr, hole, out);
  return out.size();
}

FPtr mono_arg(const FPtr& annotated, const FPtr& phi, const std::string& hole, long j) {
  std::vector<FPtr> out;
  holes(phi, &annotated, hole, out);
  if (j < 0 || j >= (long)out.size()) throw RuleError("mono_arg: hole index out of range");
  return out[(size_t)j];
}

}  // namespace hfl
