#include "hfl/semantics.hpp"

#include <algorithm>

namespace hfl::sem {

V bool_val(bool b) {
  static const V t = std::make_shared<Value>(Value{Value::Kind::Bool, true, 0, nullptr});
  static const V f = std::make_shared<Value>(Value{Value::Kind::Bool, false, 0, nullptr});
  return b ? t : f;
}

V nat_val(unsigned n) { return std::make_shared<Value>(Value{Value::Kind::Nat, false, n, nullptr}); }

namespace {

V fun_val(std::shared_ptr<const FunImpl> fn) {
  return std::make_shared<Value>(Value{Value::Kind::Fun, false, 0, std::move(fn)});
}

EnvP extend(const EnvP& env, const std::string& name, V val) {
  return std::make_shared<const EvalEnv>(EvalEnv{name, std::move(val), env});
}

// Collapses to the same truth value at every arity; stands for ⊥_T / ⊤_T when T is not tracked.
struct ConstFun : FunImpl {
  V self_val;
  ConstFun() : FunImpl(nullptr) {}
  V apply(const V&, Evaluator&) const override { return self_val; }
};

V make_extreme(bool upper) {
  auto c = std::make_shared<ConstFun>();
  auto v = std::make_shared<Value>(Value{Value::Kind::Fun, upper, 0, c});
  c->self_val = v;  // deliberate cycle; two such values live for the whole process
  return v;
}

V any_extreme(bool upper) {
  static const V lo = make_extreme(false), hi = make_extreme(true);
  return upper ? hi : lo;
}

// --------------------------------------------------------------- tables

struct TableFun : FunImpl {
  std::vector<V> table;
  Domains* dom;
  TableFun(TypeP t, std::vector<V> tab, Domains* d) : FunImpl(std::move(t)), table(std::move(tab)), dom(d) {}
  V apply(const V& arg, Evaluator& ev) const override { return table.at(dom->index_of(arg, type->arg, ev)); }
};

// --------------------------------------------------------------- closures

struct Closure : FunImpl {
  std::string param;
  FPtr body;
  EnvP env;
  Closure(TypeP t, std::string p, FPtr b, EnvP e)
      : FunImpl(std::move(t)), param(std::move(p)), body(std::move(b)), env(std::move(e)) {}
  V apply(const V& arg, Evaluator& ev) const override { return ev.eval(body, extend(env, param, arg)); }
};

// A function of n curried arguments given by its value at full argument tuples.
struct PointFn {
  virtual ~PointFn() = default;
  virtual V at(const std::vector<V>& args, Evaluator& ev) = 0;
};

struct Curried : FunImpl {
  std::shared_ptr<PointFn> target;
  std::vector<V> args;
  size_t arity;
  Curried(TypeP t, std::shared_ptr<PointFn> tg, std::vector<V> a, size_t n)
      : FunImpl(std::move(t)), target(std::move(tg)), args(std::move(a)), arity(n) {}
  V apply(const V& arg, Evaluator& ev) const override {
    std::vector<V> next = args;
    next.push_back(arg);
    if (next.size() == arity) return target->at(next, ev);
    return fun_val(std::make_shared<Curried>(type->res, target, std::move(next), arity));
  }
};

V make_curried(const TypeP& t, std::shared_ptr<PointFn> fn, Evaluator& ev) {
  size_t n = arg_types(t).size();
  if (n == 0) return fn->at({}, ev);
  return fun_val(std::make_shared<Curried>(t, std::move(fn), std::vector<V>{}, n));
}

// ------------------------------------------------------ local fixpoints

struct FixPoint : PointFn, std::enable_shared_from_this<FixPoint> {
  bool greatest;
  std::string name;
  TypeP type;
  FPtr body;
  EnvP env;
  std::vector<TypeP> argtys;
  std::map<std::string, bool> solved;

  struct Work {
    std::map<std::string, std::pair<std::vector<V>, bool>> table;
    std::vector<std::string> order;
    bool added = false;
  };

  struct Probe : PointFn {
    std::shared_ptr<Work> work;
    FixPoint* fix;
    V at(const std::vector<V>& args, Evaluator& ev) override {
      std::string k = fix->key_of(args, ev);
      if (auto it = fix->solved.find(k); it != fix->solved.end()) return bool_val(it->second);
      if (auto it = work->table.find(k); it != work->table.end()) return bool_val(it->second.second);
      work->table.emplace(k, std::make_pair(args, fix->greatest));
      work->order.push_back(k);
      work->added = true;
      return bool_val(fix->greatest);
    }
  };

  std::string key_of(const std::vector<V>& args, Evaluator& ev) {
    std::string k;
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) k += '|';
      k += ev.dom.key(args[i], argtys[i], ev);
    }
    return k;
  }

  V at(const std::vector<V>& args, Evaluator& ev) override {
    std::string k = key_of(args, ev);
    if (auto it = solved.find(k); it != solved.end()) return bool_val(it->second);
    auto work = std::make_shared<Work>();
    work->table.emplace(k, std::make_pair(args, greatest));
    work->order.push_back(k);
    auto probe = std::make_shared<Probe>();
    probe->work = work;
    probe->fix = this;
    V probe_val = make_curried(type, probe, ev);
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < work->order.size(); ++i) {
        auto& entry = work->table.at(work->order[i]);
        std::vector<V> point = entry.first;
        V v = ev.eval(body, extend(env, name, probe_val));
        for (const V& a : point) v = ev.apply(v, a);
        auto& slot = work->table.at(work->order[i]).second;
        if (v->b != slot) {
          slot = v->b;
          changed = true;
        }
      }
      if (work->added) {
        work->added = false;
        changed = true;
      }
    }
    for (const auto& [kk, e] : work->table) solved.emplace(kk, e.second);
    return bool_val(work->table.at(k).second);
  }
};

V join_meet(const V& a, const V& b, const TypeP& t, bool join, Domains& d) {
  if (t->kind == Type::Kind::Prop) return bool_val(join ? (a->b || b->b) : (a->b && b->b));
  auto ta = std::dynamic_pointer_cast<const TableFun>(a->fn);
  auto tb = std::dynamic_pointer_cast<const TableFun>(b->fn);
  std::vector<V> out(ta->table.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = join_meet(ta->table[i], tb->table[i], t->res, join, d);
  return d.make_table(t, std::move(out));
}

}  // namespace

std::string truth_str(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    default: return "unknown";
  }
}

std::string verdict_str(Oracle::Validity::Verdict v) {
  switch (v) {
    case Oracle::Validity::Verdict::Valid: return "Valid";
    case Oracle::Validity::Verdict::Invalid: return "Invalid";
    default: return "Unknown";
  }
}

// --------------------------------------------------------------- domains

V Domains::make_table(const TypeP& arrow, std::vector<V> table) {
  return fun_val(std::make_shared<TableFun>(arrow, std::move(table), this));
}

const std::vector<V>& Domains::elements(const TypeP& t) {
  std::string ts = type_str(t);
  if (auto it = elems_.find(ts); it != elems_.end()) return it->second;
  std::vector<V> out;
  if (t->kind == Type::Kind::Nat) {
    for (unsigned i = 0; i <= cfg_.K; ++i) out.push_back(nat_val(i));
  } else if (t->kind == Type::Kind::Prop) {
    out = {bool_val(false), bool_val(true)};
  } else {
    const auto& as = elements(t->arg);
    const auto& rs = elements(t->res);
    size_t m = as.size(), r = rs.size();
    Evaluator ev(*this, false);
    // order matrices
    std::vector<std::vector<char>> ale(m, std::vector<char>(m)), rle(r, std::vector<char>(r));
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) ale[i][j] = leq(as[i], as[j], t->arg, ev);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < r; ++j) rle[i][j] = leq(rs[i], rs[j], t->res, ev);
    std::vector<size_t> pick(m);
    std::vector<std::vector<size_t>> tables;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == m) {
        tables.push_back(pick);
        if (tables.size() > cfg_.max_domain) throw DomainTooLarge("domain of " + type_str(t) + " too large");
        return;
      }
      for (size_t v = 0; v < r; ++v) {
        bool ok = true;
        for (size_t j = 0; j < i && ok; ++j) {
          if (ale[j][i] && !rle[pick[j]][v]) ok = false;
          if (ale[i][j] && !rle[v][pick[j]]) ok = false;
        }
        if (!ok) continue;
        pick[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
    for (const auto& tab : tables) {
      std::vector<V> vals;
      for (size_t idx : tab) vals.push_back(rs[idx]);
      out.push_back(make_table(t, std::move(vals)));
    }
    auto& idx = index_[ts];
    for (size_t i = 0; i < out.size(); ++i) idx[key(out[i], t, ev)] = i;
  }
  return elems_.emplace(ts, std::move(out)).first->second;
}

size_t Domains::index_of(const V& v, const TypeP& t, Evaluator& ev) {
  if (t->kind == Type::Kind::Nat) return v->n;
  if (t->kind == Type::Kind::Prop) return v->b ? 1 : 0;
  elements(t);
  auto& idx = index_.at(type_str(t));
  auto it = idx.find(key(v, t, ev));
  if (it == idx.end()) throw std::logic_error("non-monotone function value of type " + type_str(t));
  return it->second;
}

std::string Domains::key(const V& v, const TypeP& t, Evaluator& ev) {
  if (t->kind == Type::Kind::Nat) return std::to_string(v->n);
  if (t->kind == Type::Kind::Prop) return v->b ? "1" : "0";
  const auto& as = elements(t->arg);
  std::string k = "[";
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) k += ',';
    V r = v->fn->apply(as[i], ev);
    k += key(r, t->res, ev);
  }
  return k + "]";
}

bool Domains::leq(const V& a, const V& b, const TypeP& t, Evaluator& ev) {
  if (t->kind == Type::Kind::Nat) return a->n == b->n;
  if (t->kind == Type::Kind::Prop) return !a->b || b->b;
  for (const V& x : elements(t->arg))
    if (!leq(a->fn->apply(x, ev), b->fn->apply(x, ev), t->res, ev)) return false;
  return true;
}

V Domains::bottom(const TypeP& t) {
  if (t->kind == Type::Kind::Prop) return bool_val(false);
  if (t->kind == Type::Kind::Nat) throw TypeError("N has no bottom");
  std::string ts = type_str(t);
  if (auto it = bottoms_.find(ts); it != bottoms_.end()) return it->second;
  std::vector<V> tab(elements(t->arg).size(), bottom(t->res));
  return bottoms_[ts] = make_table(t, std::move(tab));
}

V Domains::top(const TypeP& t) {
  if (t->kind == Type::Kind::Prop) return bool_val(true);
  if (t->kind == Type::Kind::Nat) throw TypeError("N has no top");
  std::string ts = type_str(t);
  if (auto it = tops_.find(ts); it != tops_.end()) return it->second;
  std::vector<V> tab(elements(t->arg).size(), top(t->res));
  return tops_[ts] = make_table(t, std::move(tab));
}

// ------------------------------------------------------------- evaluator

void Evaluator::tick() {
  if (++steps > dom.config().max_steps) throw BudgetExceeded("evaluation budget exceeded");
}

unsigned Evaluator::eval_term(const Term& t, const EnvP& env) {
  unsigned base = 0;
  if (!t.var.empty()) {
    const EvalEnv* e = env.get();
    while (e && e->name != t.var) e = e->next.get();
    if (!e) throw UnboundVariable(t.var);
    base = e->val->n;
  }
  if (base == kOverflow) return kOverflow;
  unsigned long v = (unsigned long)base + t.succ;
  if (v > dom.config().K) return kOverflow;
  return (unsigned)v;
}

V Evaluator::apply(const V& fn, const V& arg) {
  tick();
  if (arg->kind == Value::Kind::Nat && arg->n == kOverflow) {
    overflow_seen = true;
    return any_extreme(upper);
  }
  return fn->fn->apply(arg, *this);
}

V Evaluator::eval(const FPtr& f, const Valuation& rho) {
  EnvP env;
  for (const auto& [k, v] : rho) env = extend(env, k, v);
  return eval(f, env);
}

V Evaluator::eval(const FPtr& f, const EnvP& env) {
  tick();
  switch (f->kind) {
    case FKind::Eq: {
      unsigned a = eval_term(f->t1, env), b = eval_term(f->t2, env);
      if (a == kOverflow || b == kOverflow) {
        overflow_seen = true;
        return bool_val(upper);
      }
      return bool_val(a == b);
    }
    case FKind::Or: {
      V l = eval(f->lhs, env);
      if (l->b) return l;
      return eval(f->rhs, env);
    }
    case FKind::And: {
      V l = eval(f->lhs, env);
      if (!l->b) return l;
      return eval(f->rhs, env);
    }
    case FKind::Var: {
      const EvalEnv* e = env.get();
      while (e && e->name != f->name) e = e->next.get();
      if (!e) throw UnboundVariable(f->name);
      return e->val;
    }
    case FKind::Lam: {
      // the body type is not needed for closures; keep the arrow for extreme()
      return fun_val(std::make_shared<Closure>(nullptr, f->name, f->lhs, env));
    }
    case FKind::App: {
      V fn = eval(f->lhs, env);
      V arg = f->term_arg ? nat_val(eval_term(f->t1, env)) : eval(f->rhs, env);
      return apply(fn, arg);
    }
    case FKind::Mu:
    case FKind::Nu: {
      if (approximants && f->ann > 0) return eval_approx_fix(f, env);
      auto fp = std::make_shared<FixPoint>();
      fp->greatest = f->kind == FKind::Nu;
      fp->name = f->name;
      fp->type = f->type;
      fp->body = f->lhs;
      fp->env = env;
      fp->argtys = arg_types(f->type);
      return make_curried(f->type, fp, *this);
    }
  }
  throw std::logic_error("eval: bad formula");
}

V Evaluator::tabulate(const V& v, const TypeP& t) {
  if (t->kind != Type::Kind::Arrow) return v;
  if (auto tf = std::dynamic_pointer_cast<const TableFun>(v->fn); tf && type_eq(tf->type, t)) return v;
  const auto& as = dom.elements(t->arg);
  std::vector<V> tab;
  tab.reserve(as.size());
  for (const V& a : as) tab.push_back(tabulate(apply(v, a), t->res));
  return dom.make_table(t, std::move(tab));
}

V Evaluator::eval_approx_fix(const FPtr& f, const EnvP& env) {
  long alpha = f->ann - 1;
  bool greatest = f->kind == FKind::Nu;
  const TypeP& t = f->type;
  auto step = [&](const V& x) { return tabulate(eval(f->lhs, extend(env, f->name, x)), t); };
  V start = greatest ? dom.top(t) : dom.bottom(t);
  if (alpha == 0) return start;
  // iterates I_0 .. I_alpha; I_a = join_{b<a} step(I_b), or step(I_{a-1}) on chains
  V cur = start;
  V acc;
  for (long a = 1; a <= alpha; ++a) {
    V s = step(cur);
    if (chain_shortcut) {
      cur = s;
    } else {
      acc = acc ? join_meet(acc, s, t, !greatest, dom) : s;
      cur = acc;
    }
  }
  return cur;
}

// ---------------------------------------------------------------- oracle

bool Oracle::eval_mode(const FPtr& phi, const Valuation& rho, bool upper, bool* overflow) {
  Evaluator ev(dom_, upper);
  bool r = ev.eval(phi, rho)->b;
  if (overflow) *overflow = ev.overflow_seen;
  return r;
}

Truth Oracle::eval(const FPtr& phi, const Valuation& rho) {
  try {
    bool lo = eval_mode(phi, rho, false);
    if (lo) return Truth::True;
    bool hi = eval_mode(phi, rho, true);
    return hi ? Truth::Unknown : Truth::False;
  } catch (const DomainTooLarge&) {
    return Truth::Unknown;
  } catch (const BudgetExceeded&) {
    return Truth::Unknown;
  }
}

Truth Oracle::eval_approx(const FPtr& phi, const Valuation& rho, bool chain_shortcut) {
  try {
    Evaluator lo(dom_, false, true), hi(dom_, true, true);
    lo.chain_shortcut = hi.chain_shortcut = chain_shortcut;
    bool a = lo.eval(phi, rho)->b;
    if (a) return Truth::True;
    bool b = hi.eval(phi, rho)->b;
    return b ? Truth::Unknown : Truth::False;
  } catch (const DomainTooLarge&) {
    return Truth::Unknown;
  } catch (const BudgetExceeded&) {
    return Truth::Unknown;
  }
}

Oracle::Validity Oracle::check_validity(const TypeEnv& env, const Sequent& seq) {
  check_sequent(env, seq);
  std::vector<std::pair<std::string, TypeP>> vars;
  for (const auto& x : free_vars(seq)) {
    auto it = env.find(x);
    if (it == env.end()) throw UnboundVariable(x);
    vars.emplace_back(x, it->second);
  }
  std::vector<const std::vector<V>*> doms;
  size_t total = 1;
  try {
    for (const auto& [x, t] : vars) {
      doms.push_back(&dom_.elements(t));
      total *= doms.back()->size();
      if (total > config().max_valuations) return {Validity::Verdict::Unknown, {}, "too many valuations"};
    }
  } catch (const DomainTooLarge& e) {
    return {Validity::Verdict::Unknown, {}, e.what()};
  }
  bool unknown = false;
  std::string why;
  std::vector<size_t> idx(vars.size(), 0);
  for (size_t n = 0; n < total; ++n) {
    Valuation rho;
    for (size_t i = 0; i < vars.size(); ++i) rho[vars[i].first] = (*doms[i])[idx[i]];
    try {
      bool holds = false;
      for (const auto& r : seq.right)
        if (eval_mode(r, rho, false)) { holds = true; break; }
      if (!holds)
        for (const auto& l : seq.left)
          if (!eval_mode(l, rho, true)) { holds = true; break; }
      if (!holds) {
        bool refuted = true;
        for (const auto& l : seq.left)
          if (!eval_mode(l, rho, false)) { refuted = false; break; }
        if (refuted)
          for (const auto& r : seq.right)
            if (eval_mode(r, rho, true)) { refuted = false; break; }
        if (refuted) return {Validity::Verdict::Invalid, rho, "counter-valuation"};
        unknown = true;
        why = "truncation at K=" + std::to_string(config().K) + " leaves the verdict open";
      }
    } catch (const DomainTooLarge& e) {
      unknown = true;
      why = e.what();
    } catch (const BudgetExceeded& e) {
      unknown = true;
      why = e.what();
    }
    for (size_t i = 0; i < idx.size(); ++i) {
      if (++idx[i] < doms[i]->size()) break;
      idx[i] = 0;
    }
  }
  if (unknown) return {Validity::Verdict::Unknown, {}, why};
  return {Validity::Verdict::Valid, {}, ""};
}

std::string value_str(const V& v, const TypeP& t, Domains& d) {
  if (t->kind == Type::Kind::Nat) return std::to_string(v->n);
  if (t->kind == Type::Kind::Prop) return v->b ? "true" : "false";
  Evaluator ev(d, false);
  std::string s = "{";
  const auto& as = d.elements(t->arg);
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) s += ", ";
    s += value_str(as[i], t->arg, d) + "->" + value_str(v->fn->apply(as[i], ev), t->res, d);
  }
  return s + "}";
}

}  // namespace hfl::sem
