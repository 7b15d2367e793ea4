#include "hfl/syntax.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <sstream>

namespace hfl {

// ---------------------------------------------------------------- types

TypeP nat_type() {
  static const TypeP t = std::make_shared<Type>(Type{Type::Kind::Nat, nullptr, nullptr});
  return t;
}

TypeP prop_type() {
  static const TypeP t = std::make_shared<Type>(Type{Type::Kind::Prop, nullptr, nullptr});
  return t;
}

TypeP arrow_type(TypeP arg, TypeP res) {
  if (!arg || !res) throw TypeError("arrow_type: null component");
  if (res->kind == Type::Kind::Nat) throw TypeError("arrow result may not be N");
  return std::make_shared<Type>(Type{Type::Kind::Arrow, std::move(arg), std::move(res)});
}

bool type_eq(const TypeP& a, const TypeP& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind != Type::Kind::Arrow) return true;
  return type_eq(a->arg, b->arg) && type_eq(a->res, b->res);
}

std::string type_str(const TypeP& t) {
  if (!t) return "?";
  switch (t->kind) {
    case Type::Kind::Nat: return "N";
    case Type::Kind::Prop: return "O";
    case Type::Kind::Arrow: {
      std::string a = type_str(t->arg);
      if (t->arg->kind == Type::Kind::Arrow) a = "(" + a + ")";
      return a + "->" + type_str(t->res);
    }
  }
  return "?";
}

std::vector<TypeP> arg_types(const TypeP& t) {
  std::vector<TypeP> out;
  for (TypeP c = t; c && c->kind == Type::Kind::Arrow; c = c->res) out.push_back(c->arg);
  return out;
}

// ---------------------------------------------------------------- terms

std::string term_str(const Term& t) {
  if (t.closed()) return std::to_string(t.succ);
  std::string s;
  for (unsigned i = 0; i < t.succ; ++i) s += "S ";
  return s + t.var;
}

// ------------------------------------------------------ constructors

namespace {
FPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
}  // namespace

FPtr mk_eq(Term s, Term t) {
  Formula f{FKind::Eq};
  f.t1 = std::move(s);
  f.t2 = std::move(t);
  return make(std::move(f));
}

FPtr mk_or(FPtr a, FPtr b) {
  Formula f{FKind::Or};
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FPtr mk_and(FPtr a, FPtr b) {
  Formula f{FKind::And};
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return make(std::move(f));
}

FPtr mk_var(std::string x) {
  Formula f{FKind::Var};
  f.name = std::move(x);
  return make(std::move(f));
}

FPtr mk_lam(std::string x, TypeP t, FPtr body) {
  Formula f{FKind::Lam};
  f.name = std::move(x);
  f.type = std::move(t);
  f.lhs = std::move(body);
  return make(std::move(f));
}

FPtr mk_fix(FKind k, std::string x, TypeP t, FPtr body, long ann) {
  Formula f{k};
  f.name = std::move(x);
  f.type = std::move(t);
  f.lhs = std::move(body);
  f.ann = ann;
  return make(std::move(f));
}

FPtr mk_mu(std::string x, TypeP t, FPtr body, long ann) {
  return mk_fix(FKind::Mu, std::move(x), std::move(t), std::move(body), ann);
}

FPtr mk_nu(std::string x, TypeP t, FPtr body, long ann) {
  return mk_fix(FKind::Nu, std::move(x), std::move(t), std::move(body), ann);
}

FPtr mk_app(FPtr fn, FPtr arg) {
  Formula f{FKind::App};
  f.lhs = std::move(fn);
  f.rhs = std::move(arg);
  return make(std::move(f));
}

FPtr mk_app(FPtr fn, Term arg) {
  Formula f{FKind::App};
  f.lhs = std::move(fn);
  f.t1 = std::move(arg);
  f.term_arg = true;
  return make(std::move(f));
}

FPtr with_ann(const FPtr& f, long ann) {
  if (f->ann == ann) return f;
  Formula g = *f;
  g.ann = ann;
  return make(std::move(g));
}

Spine spine(const FPtr& f) {
  Spine s;
  FPtr cur = f;
  while (cur->kind == FKind::App) {
    s.args.push_back(cur->term_arg ? Arg::of(cur->t1) : Arg::of(cur->rhs));
    cur = cur->lhs;
  }
  s.head = cur;
  std::reverse(s.args.begin(), s.args.end());
  return s;
}

FPtr apply_args(FPtr head, const std::vector<Arg>& args) {
  for (const auto& a : args) head = a.is_term() ? mk_app(head, *a.term) : mk_app(head, a.formula);
  return head;
}

// ------------------------------------------------------ free variables

namespace {

void fv_rec(const FPtr& f, std::set<std::string>& bound, std::set<std::string>& out,
            std::vector<std::string>& shadow) {
  auto add = [&](const std::string& v) {
    if (!v.empty() && !bound.count(v)) out.insert(v);
  };
  switch (f->kind) {
    case FKind::Eq: add(f->t1.var); add(f->t2.var); return;
    case FKind::Var: add(f->name); return;
    case FKind::Or:
    case FKind::And:
      fv_rec(f->lhs, bound, out, shadow);
      fv_rec(f->rhs, bound, out, shadow);
      return;
    case FKind::App:
      fv_rec(f->lhs, bound, out, shadow);
      if (f->term_arg) add(f->t1.var);
      else fv_rec(f->rhs, bound, out, shadow);
      return;
    case FKind::Lam:
    case FKind::Mu:
    case FKind::Nu: {
      bool inserted = bound.insert(f->name).second;
      fv_rec(f->lhs, bound, out, shadow);
      if (inserted) bound.erase(f->name);
      return;
    }
  }
}

size_t count_rec(const FPtr& f, const std::string& x) {
  switch (f->kind) {
    case FKind::Eq: return (f->t1.var == x) + (f->t2.var == x);
    case FKind::Var: return f->name == x;
    case FKind::Or:
    case FKind::And: return count_rec(f->lhs, x) + count_rec(f->rhs, x);
    case FKind::App:
      return count_rec(f->lhs, x) + (f->term_arg ? (f->t1.var == x) : count_rec(f->rhs, x));
    default: return f->name == x ? 0 : count_rec(f->lhs, x);
  }
}

}  // namespace

std::set<std::string> free_vars(const FPtr& f) {
  std::set<std::string> bound, out;
  std::vector<std::string> shadow;
  fv_rec(f, bound, out, shadow);
  return out;
}

std::set<std::string> free_vars(const Term& t) {
  if (t.var.empty()) return {};
  return {t.var};
}

bool occurs_free(const FPtr& f, const std::string& x) { return count_rec(f, x) > 0; }
size_t count_free(const FPtr& f, const std::string& x) { return count_rec(f, x); }

// ------------------------------------------------------- substitution

std::string fresh_name(const std::string& base) {
  static std::atomic<unsigned long> counter{0};
  std::string stem = base;
  auto us = stem.rfind('_');
  if (us != std::string::npos && us + 1 < stem.size() &&
      std::all_of(stem.begin() + us + 1, stem.end(), [](char c) { return std::isdigit((unsigned char)c); }))
    stem = stem.substr(0, us);
  if (stem.empty()) stem = "v";
  return stem + "_" + std::to_string(++counter);
}

Term subst_term(const Term& t, const Subst& s) {
  if (t.var.empty()) return t;
  auto it = s.find(t.var);
  if (it == s.end()) return t;
  const Arg& a = it->second;
  if (a.is_term()) return a.term->plus(t.succ);
  if (a.formula && a.formula->kind == FKind::Var) return Term{a.formula->name, t.succ};
  throw TypeError("substituting a formula for term variable " + t.var);
}

namespace {

std::set<std::string> arg_fv(const Arg& a) {
  return a.is_term() ? free_vars(*a.term) : free_vars(a.formula);
}

FPtr subst_rec(const FPtr& f, const Subst& s) {
  switch (f->kind) {
    case FKind::Eq: {
      Term a = subst_term(f->t1, s), b = subst_term(f->t2, s);
      if (a == f->t1 && b == f->t2) return f;
      return mk_eq(a, b);
    }
    case FKind::Var: {
      auto it = s.find(f->name);
      if (it == s.end()) return f;
      if (it->second.is_term()) throw TypeError("substituting a term for formula variable " + f->name);
      return it->second.formula;
    }
    case FKind::Or:
    case FKind::And: {
      FPtr a = subst_rec(f->lhs, s), b = subst_rec(f->rhs, s);
      if (a == f->lhs && b == f->rhs) return f;
      return f->kind == FKind::Or ? mk_or(a, b) : mk_and(a, b);
    }
    case FKind::App: {
      FPtr fn = subst_rec(f->lhs, s);
      if (f->term_arg) {
        Term t = subst_term(f->t1, s);
        if (fn == f->lhs && t == f->t1) return f;
        return mk_app(fn, t);
      }
      FPtr a = subst_rec(f->rhs, s);
      if (fn == f->lhs && a == f->rhs) return f;
      return mk_app(fn, a);
    }
    default: {
      // binder: drop shadowed keys, keep only keys that actually occur
      Subst inner;
      for (const auto& [k, v] : s)
        if (k != f->name && occurs_free(f->lhs, k)) inner.emplace(k, v);
      if (inner.empty()) return f;
      bool capture = false;
      for (const auto& [k, v] : inner)
        if (arg_fv(v).count(f->name)) { capture = true; break; }
      std::string x = f->name;
      if (capture) {
        x = fresh_name(f->name);
        bool is_nat = f->type && f->type->kind == Type::Kind::Nat;
        inner.emplace(f->name, is_nat ? Arg::of(Term::variable(x)) : Arg::of(mk_var(x)));
      }
      FPtr body = subst_rec(f->lhs, inner);
      Formula g = *f;
      g.name = x;
      g.lhs = body;
      return make(std::move(g));
    }
  }
}

}  // namespace

FPtr substitute(const FPtr& f, const Subst& s) {
  if (s.empty()) return f;
  return subst_rec(f, s);
}

FPtr substitute(const FPtr& f, const std::string& x, const Arg& a) {
  Subst s;
  s.emplace(x, a);
  return subst_rec(f, s);
}

FPtr substitute_checked(const TypeEnv& env, const FPtr& f, const std::string& x, const Arg& a) {
  auto it = env.find(x);
  if (it == env.end()) throw UnboundVariable(x);
  TypeP at = infer_arg_type(env, a);
  if (!type_eq(at, it->second))
    throw IllTyped("substitution for " + x, type_str(it->second), type_str(at));
  return substitute(f, x, a);
}

FPtr unfold(const FPtr& f) {
  Spine sp = spine(f);
  if (!is_fix(sp.head->kind)) throw TypeError("unfold: head is not a fixpoint: " + to_string(f));
  FPtr body = substitute(sp.head->lhs, sp.head->name, Arg::of(sp.head));
  return apply_args(body, sp.args);
}

FPtr beta_head(const FPtr& f) {
  Spine sp = spine(f);
  if (sp.head->kind != FKind::Lam || sp.args.empty())
    throw TypeError("beta_head: not a redex: " + to_string(f));
  FPtr body = substitute(sp.head->lhs, sp.head->name, sp.args[0]);
  std::vector<Arg> rest(sp.args.begin() + 1, sp.args.end());
  return apply_args(body, rest);
}

// ---------------------------------------------------- alpha-equivalence

namespace {

// index from the innermost binder, or -1 when free
int lookup(const std::vector<const std::string*>& stack, const std::string& x) {
  for (int i = (int)stack.size() - 1; i >= 0; --i)
    if (*stack[i] == x) return (int)stack.size() - 1 - i;
  return -1;
}

bool term_alpha(const Term& a, const Term& b, const std::vector<const std::string*>& sa,
                const std::vector<const std::string*>& sb) {
  if (a.succ != b.succ) return false;
  if (a.var.empty() || b.var.empty()) return a.var.empty() && b.var.empty();
  int ia = lookup(sa, a.var), ib = lookup(sb, b.var);
  if (ia != ib) return false;
  return ia >= 0 || a.var == b.var;
}

bool alpha_rec(const FPtr& a, const FPtr& b, std::vector<const std::string*>& sa,
               std::vector<const std::string*>& sb, bool ann) {
  if (a == b && sa.size() == 0) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::Eq: return term_alpha(a->t1, b->t1, sa, sb) && term_alpha(a->t2, b->t2, sa, sb);
    case FKind::Var: {
      int ia = lookup(sa, a->name), ib = lookup(sb, b->name);
      if (ia != ib) return false;
      return ia >= 0 || a->name == b->name;
    }
    case FKind::Or:
    case FKind::And: return alpha_rec(a->lhs, b->lhs, sa, sb, ann) && alpha_rec(a->rhs, b->rhs, sa, sb, ann);
    case FKind::App:
      if (a->term_arg != b->term_arg) return false;
      if (!alpha_rec(a->lhs, b->lhs, sa, sb, ann)) return false;
      return a->term_arg ? term_alpha(a->t1, b->t1, sa, sb) : alpha_rec(a->rhs, b->rhs, sa, sb, ann);
    default: {
      if (!type_eq(a->type, b->type)) return false;
      if (ann && a->ann != b->ann) return false;
      sa.push_back(&a->name);
      sb.push_back(&b->name);
      bool r = alpha_rec(a->lhs, b->lhs, sa, sb, ann);
      sa.pop_back();
      sb.pop_back();
      return r;
    }
  }
}

void canon_term(const Term& t, const std::vector<const std::string*>& st, std::string& out) {
  out += "S" + std::to_string(t.succ);
  if (t.var.empty()) { out += "Z"; return; }
  int i = lookup(st, t.var);
  if (i >= 0) out += "#" + std::to_string(i);
  else out += "$" + t.var + ";";
}

void canon_rec(const FPtr& f, std::vector<const std::string*>& st, std::string& out, bool ann) {
  switch (f->kind) {
    case FKind::Eq:
      out += "=(";
      canon_term(f->t1, st, out);
      out += ",";
      canon_term(f->t2, st, out);
      out += ")";
      return;
    case FKind::Var: {
      int i = lookup(st, f->name);
      if (i >= 0) out += "#" + std::to_string(i);
      else out += "$" + f->name + ";";
      return;
    }
    case FKind::Or:
    case FKind::And:
      out += f->kind == FKind::Or ? "|(" : "&(";
      canon_rec(f->lhs, st, out, ann);
      out += ",";
      canon_rec(f->rhs, st, out, ann);
      out += ")";
      return;
    case FKind::App:
      out += "@(";
      canon_rec(f->lhs, st, out, ann);
      out += ",";
      if (f->term_arg) canon_term(f->t1, st, out);
      else canon_rec(f->rhs, st, out, ann);
      out += ")";
      return;
    default:
      out += f->kind == FKind::Lam ? "L" : f->kind == FKind::Mu ? "M" : "V";
      out += "[" + type_str(f->type);
      if (ann && f->ann) out += "^" + std::to_string(f->ann);
      out += "](";
      st.push_back(&f->name);
      canon_rec(f->lhs, st, out, ann);
      st.pop_back();
      out += ")";
  }
}

}  // namespace

bool alpha_eq(const FPtr& a, const FPtr& b, bool with_ann) {
  std::vector<const std::string*> sa, sb;
  if (a == b && !with_ann) return true;
  return alpha_rec(a, b, sa, sb, with_ann);
}

std::string canon(const FPtr& f, bool with_ann) {
  std::vector<const std::string*> st;
  std::string out;
  canon_rec(f, st, out, with_ann);
  return out;
}

size_t size(const FPtr& f) {
  switch (f->kind) {
    case FKind::Eq:
    case FKind::Var: return 1;
    case FKind::Or:
    case FKind::And: return 1 + size(f->lhs) + size(f->rhs);
    case FKind::App: return 1 + size(f->lhs) + (f->term_arg ? 1 : size(f->rhs));
    default: return 1 + size(f->lhs);
  }
}

size_t count_fix(const FPtr& f) {
  switch (f->kind) {
    case FKind::Eq:
    case FKind::Var: return 0;
    case FKind::Or:
    case FKind::And: return count_fix(f->lhs) + count_fix(f->rhs);
    case FKind::App: return count_fix(f->lhs) + (f->term_arg ? 0 : count_fix(f->rhs));
    default: return (is_fix(f->kind) ? 1 : 0) + count_fix(f->lhs);
  }
}

// -------------------------------------------------------------- typing

namespace {

void check_term(const TypeEnv& env, const Term& t) {
  if (t.var.empty()) return;
  auto it = env.find(t.var);
  if (it == env.end()) throw UnboundVariable(t.var);
  if (it->second->kind != Type::Kind::Nat) throw IllTyped(t.var, "N", type_str(it->second));
}

TypeP infer_rec(TypeEnv& env, const FPtr& f) {
  switch (f->kind) {
    case FKind::Eq:
      check_term(env, f->t1);
      check_term(env, f->t2);
      return prop_type();
    case FKind::Var: {
      auto it = env.find(f->name);
      if (it == env.end()) throw UnboundVariable(f->name);
      if (it->second->kind == Type::Kind::Nat)
        throw IllTyped(f->name, "formula", "N");
      return it->second;
    }
    case FKind::Or:
    case FKind::And: {
      for (const FPtr& c : {f->lhs, f->rhs}) {
        TypeP t = infer_rec(env, c);
        if (t->kind != Type::Kind::Prop) throw IllTyped(to_string(c), "O", type_str(t));
      }
      return prop_type();
    }
    case FKind::App: {
      TypeP ft = infer_rec(env, f->lhs);
      if (ft->kind != Type::Kind::Arrow) throw IllTyped(to_string(f->lhs), "function", type_str(ft));
      if (f->term_arg) {
        if (ft->arg->kind != Type::Kind::Nat) throw IllTyped(to_string(f), type_str(ft->arg), "N");
        check_term(env, f->t1);
      } else {
        TypeP at = infer_rec(env, f->rhs);
        if (!type_eq(at, ft->arg)) throw IllTyped(to_string(f->rhs), type_str(ft->arg), type_str(at));
      }
      return ft->res;
    }
    default: {
      if (!f->type) throw TypeError("binder without type: " + f->name);
      if (is_fix(f->kind) && f->type->kind == Type::Kind::Nat)
        throw IllTyped(to_string(f), "fixpoint type T", "N");
      auto saved = env.find(f->name);
      std::optional<TypeP> old;
      if (saved != env.end()) old = saved->second;
      env[f->name] = f->type;
      TypeP bt;
      try {
        bt = infer_rec(env, f->lhs);
      } catch (...) {
        if (old) env[f->name] = *old; else env.erase(f->name);
        throw;
      }
      if (old) env[f->name] = *old; else env.erase(f->name);
      if (f->kind == FKind::Lam) return arrow_type(f->type, bt);
      if (!type_eq(bt, f->type)) throw IllTyped(to_string(f), type_str(f->type), type_str(bt));
      return f->type;
    }
  }
}

}  // namespace

TypeP infer_type(const TypeEnv& env, const FPtr& f) {
  TypeEnv e = env;
  return infer_rec(e, f);
}

void check_prop(const TypeEnv& env, const FPtr& f) {
  TypeP t = infer_type(env, f);
  if (t->kind != Type::Kind::Prop) throw IllTyped(to_string(f), "O", type_str(t));
}

TypeP infer_arg_type(const TypeEnv& env, const Arg& a) {
  if (a.is_term()) {
    check_term(env, *a.term);
    return nat_type();
  }
  return infer_type(env, a.formula);
}

// ------------------------------------------------------------ sequents

bool seq_alpha_eq(const Sequent& a, const Sequent& b, bool with_ann) {
  if (a.left.size() != b.left.size() || a.right.size() != b.right.size()) return false;
  for (size_t i = 0; i < a.left.size(); ++i)
    if (!alpha_eq(a.left[i], b.left[i], with_ann)) return false;
  for (size_t i = 0; i < a.right.size(); ++i)
    if (!alpha_eq(a.right[i], b.right[i], with_ann)) return false;
  return true;
}

std::set<std::string> free_vars(const Sequent& s) {
  std::set<std::string> out;
  for (const auto* side : {&s.left, &s.right})
    for (const auto& f : *side) {
      auto fv = free_vars(f);
      out.insert(fv.begin(), fv.end());
    }
  return out;
}

Sequent substitute(const Sequent& s, const Subst& sub) {
  Sequent r;
  for (const auto& f : s.left) r.left.push_back(substitute(f, sub));
  for (const auto& f : s.right) r.right.push_back(substitute(f, sub));
  return r;
}

void check_sequent(const TypeEnv& env, const Sequent& s) {
  for (const auto* side : {&s.left, &s.right})
    for (const auto& f : *side) check_prop(env, f);
}

// ------------------------------------------------------------- printing

namespace {

struct Printer {
  const DefTable* defs;
  std::string out;
  const AnnLabel* label = nullptr;

  const std::string* def_name(const FPtr& f) {
    if (!defs) return nullptr;
    for (const auto& [name, d] : *defs)
      if (d->kind == f->kind && alpha_eq(d, f)) return &name;
    return nullptr;
  }

  void term(const Term& t, bool atom) {
    bool paren = atom && t.succ > 0 && !t.closed();
    if (paren) out += "(";
    out += term_str(t);
    if (paren) out += ")";
  }

  // prec: 0 top, 1 or-right, 2 and-right, 3 app-fun, 4 app-arg
  void go(const FPtr& f, int prec, bool tail) {
    if (const std::string* n = def_name(f)) { out += *n; return; }
    switch (f->kind) {
      case FKind::Var: out += f->name; return;
      case FKind::Eq: {
        bool p = prec > 2;
        if (p) out += "(";
        term(f->t1, false);
        out += " = ";
        term(f->t2, false);
        if (p) out += ")";
        return;
      }
      case FKind::Or:
      case FKind::And: {
        int level = f->kind == FKind::Or ? 0 : 1;
        bool p = prec > level;
        if (p) { out += "("; tail = true; }
        go(f->lhs, level, false);
        out += f->kind == FKind::Or ? " \\/ " : " /\\ ";
        go(f->rhs, level + 1, tail);
        if (p) out += ")";
        return;
      }
      case FKind::App: {
        bool p = prec > 3;
        if (p) out += "(";
        go(f->lhs, 3, false);
        out += " ";
        if (f->term_arg) term(f->t1, true);
        else go(f->rhs, 4, p || tail);
        if (p) out += ")";
        return;
      }
      default: {
        bool p = prec > 0 || !tail;
        if (p) out += "(";
        out += f->kind == FKind::Lam ? "\\" : f->kind == FKind::Mu ? "mu " : "nu ";
        if (label && is_fix(f->kind)) out.back() = '_', out += (*label)(f->ann) + " ";
        else if (f->ann && is_fix(f->kind)) out.back() = '{', out += std::to_string(f->ann) + "} ";
        out += f->name + ":" + type_str(f->type) + ". ";
        go(f->lhs, 0, true);
        if (p) out += ")";
      }
    }
  }
};

}  // namespace

std::string to_string(const FPtr& f, const DefTable* defs) {
  Printer p{defs, {}};
  p.go(f, 0, true);
  return p.out;
}

std::string to_string_annotated(const FPtr& f, const AnnLabel& label) {
  Printer p{nullptr, {}, &label};
  p.go(f, 0, true);
  return p.out;
}

std::string to_string(const Arg& a, const DefTable* defs) {
  if (a.is_term()) return term_str(*a.term);
  return to_string(a.formula, defs);
}

std::string to_string(const Sequent& s, const DefTable* defs) {
  std::string out;
  for (size_t i = 0; i < s.left.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.left[i], defs);
  }
  out += s.left.empty() ? "|-" : " |-";
  for (size_t i = 0; i < s.right.size(); ++i) {
    out += i ? ", " : " ";
    out += to_string(s.right[i], defs);
  }
  return out;
}

FPtr strip(const FPtr& f) {
  switch (f->kind) {
    case FKind::Eq:
    case FKind::Var: return f;
    case FKind::Or:
    case FKind::And: {
      FPtr a = strip(f->lhs), b = strip(f->rhs);
      if (a == f->lhs && b == f->rhs) return f;
      return f->kind == FKind::Or ? mk_or(a, b) : mk_and(a, b);
    }
    case FKind::App: {
      FPtr fn = strip(f->lhs);
      if (f->term_arg) return fn == f->lhs ? f : mk_app(fn, f->t1);
      FPtr a = strip(f->rhs);
      return (fn == f->lhs && a == f->rhs) ? f : mk_app(fn, a);
    }
    default: {
      FPtr b = strip(f->lhs);
      if (b == f->lhs && f->ann == 0) return f;
      Formula g = *f;
      g.lhs = b;
      g.ann = 0;
      return make(std::move(g));
    }
  }
}

}  // namespace hfl
