#include "hfl/search.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "hfl/trace.hpp"

namespace hfl::search {

bool is_schedule_element(const FPtr& f) {
  Spine sp = spine(f);
  switch (sp.head->kind) {
    case FKind::Or: case FKind::And: case FKind::Mu: case FKind::Nu: return true;
    case FKind::Lam: return !sp.args.empty();
    default: return false;
  }
}

std::string step_str(FragmentKind k) {
  switch (k) {
    case FragmentKind::Axiom: return "axiom";
    case FragmentKind::Contradiction: return "contradiction";
    case FragmentKind::Reflexivity: return "reflexivity";
    case FragmentKind::Expand: return "expand";
    case FragmentKind::NoOp: return "noop";
  }
  return "?";
}

namespace {

bool numeral(const Term& t) { return t.closed(); }

struct Closure {
  FragmentKind kind;
  long left = -1, right = -1;
};

std::optional<Closure> find_closure(const Sequent& s) {
  for (size_t i = 0; i < s.left.size(); ++i)
    for (size_t j = 0; j < s.right.size(); ++j)
      if (alpha_eq(s.left[i], s.right[j])) return Closure{FragmentKind::Axiom, (long)i, (long)j};
  for (size_t i = 0; i < s.left.size(); ++i) {
    const FPtr& f = s.left[i];
    if (f->kind == FKind::Eq && numeral(f->t1) && numeral(f->t2) && f->t1.succ != f->t2.succ)
      return Closure{FragmentKind::Contradiction, (long)i, -1};
  }
  for (size_t j = 0; j < s.right.size(); ++j) {
    const FPtr& f = s.right[j];
    if (f->kind == FKind::Eq && f->t1 == f->t2) return Closure{FragmentKind::Reflexivity, -1, (long)j};
  }
  return std::nullopt;
}

// S^n Z = S^m Z |-   with n != m
void close_contradiction(Builder& b, size_t n) {
  const FPtr eq = b.seq(n).left[0];
  unsigned k = std::min(eq->t1.succ, eq->t2.succ);
  for (unsigned i = 0; i < k; ++i) n = b.rule(n, Rule::P2, 0);
  if (eq->t1.succ > eq->t2.succ) {
    b.close(n, Rule::P1);
    return;
  }
  // Z = S^d Z |-  : flip it with a cut on S^d Z = Z
  unsigned d = eq->t2.succ - eq->t1.succ;
  FPtr flipped = mk_eq(Term::numeral(d), Term::zero());
  auto [r, l] = b.cut(n, flipped);
  size_t p1 = b.rule(l, Rule::WkL, 0);
  b.close(p1, Rule::P1);
  RuleInst eql;
  eql.tag = Rule::EqL;
  eql.at = 0;
  EqTemplate t;
  t.x = "x";
  t.y = "y";
  t.ctx.right = {mk_eq(Term::numeral(d), Term::variable("x"))};
  eql.tmpl = t;
  size_t refl = b.apply1(r, eql);
  b.close(refl, Rule::EqR, 0);
}

std::optional<Occ> locate(const Sequent& s, const Element& e) {
  const auto& side = e.right ? s.right : s.left;
  for (size_t i = 0; i < side.size(); ++i)
    if (alpha_eq(side[i], e.formula)) return Occ{e.right, i};
  return std::nullopt;
}

Rule rule_for(const FPtr& f, bool right) {
  switch (spine(f).head->kind) {
    case FKind::Or: return right ? Rule::OrR : Rule::OrL;
    case FKind::And: return right ? Rule::AndR : Rule::AndL;
    case FKind::Mu: return right ? Rule::MuR : Rule::MuL;
    case FKind::Nu: return right ? Rule::NuR : Rule::NuL;
    default: return right ? Rule::LamR : Rule::LamL;
  }
}

std::string element_key(const Element& e) { return (e.right ? "R " : "L ") + canon(e.formula); }

}  // namespace

std::optional<FragmentKind> closure_kind(const Sequent& s) {
  auto c = find_closure(s);
  if (!c) return std::nullopt;
  return c->kind;
}

Fragment expand_leaf(Builder& b, size_t n, const std::optional<Element>& e) {
  Fragment fr;
  const Sequent s = b.seq(n);
  if (auto c = find_closure(s)) {
    fr.kind = c->kind;
    std::vector<size_t> l, r;
    if (c->left >= 0) l.push_back((size_t)c->left);
    if (c->right >= 0) r.push_back((size_t)c->right);
    size_t m = b.keep_only(n, l, r);
    switch (c->kind) {
      case FragmentKind::Axiom: b.close(m, Rule::Axiom); break;
      case FragmentKind::Reflexivity: b.close(m, Rule::EqR, 0); break;
      default: close_contradiction(b, m); break;
    }
    return fr;
  }
  std::optional<Occ> at;
  if (e && is_schedule_element(e->formula)) at = locate(s, *e);
  if (!at) {
    fr.kind = FragmentKind::NoOp;
    fr.leaves = {n};
    return fr;
  }
  fr.kind = FragmentKind::Expand;
  size_t copy = b.rule(n, at->right ? Rule::CtrR : Rule::CtrL, (long)at->index);
  size_t before = at->right ? b.seq(copy).right.size() : b.seq(copy).left.size();
  fr.principal = Occ{at->right, at->index + 1};
  RuleInst r;
  r.tag = rule_for(e->formula, at->right);
  r.at = (long)at->index + 1;
  fr.leaves = b.apply(copy, r);
  for (size_t c : fr.leaves) {
    size_t after = at->right ? b.seq(c).right.size() : b.seq(c).left.size();
    fr.produced = std::max(fr.produced, after + 1 - before);
  }
  return fr;
}

bool saturated(const TypeEnv& env, const Sequent& s, const Element& e) {
  auto at = locate(s, e);
  if (!at) return true;
  RuleInst r;
  r.tag = rule_for(e.formula, at->right);
  r.at = (long)at->index;
  Derivation d = derive(env, s, r, {});
  auto within = [](const std::vector<FPtr>& xs, const std::vector<FPtr>& ys) {
    return std::all_of(xs.begin(), xs.end(), [&](const FPtr& x) {
      return std::any_of(ys.begin(), ys.end(), [&](const FPtr& y) { return alpha_eq(x, y); });
    });
  };
  for (const auto& p : d.premises)
    if (within(p.left, s.left) && within(p.right, s.right)) return true;
  return false;
}

// ------------------------------------------------------------------ scheduler

std::vector<Element> Scheduler::elements(const Sequent& s) {
  std::vector<Element> out;
  for (const auto& f : s.left)
    if (is_schedule_element(f)) out.push_back({f, false});
  for (const auto& f : s.right)
    if (is_schedule_element(f)) out.push_back({f, true});
  return out;
}

std::optional<Element> Scheduler::pick(const Sequent& s, long round, uint64_t seed,
                                       const std::function<bool(const Element&)>& saturated) {
  std::vector<Element> es = elements(s);
  std::vector<Entry> next;
  std::vector<std::pair<Element, size_t>> distinct;  // element, index into next
  for (const auto& e : es) {
    std::string k = element_key(e);
    if (std::any_of(next.begin(), next.end(), [&](const Entry& x) { return x.key == k; })) continue;
    auto old = std::find_if(entries.begin(), entries.end(), [&](const Entry& x) { return x.key == k; });
    next.push_back(old != entries.end() ? *old : Entry{k, round, false});
    distinct.push_back({e, next.size() - 1});
  }
  entries = std::move(next);
  if (saturated)
    distinct.erase(std::remove_if(distinct.begin(), distinct.end(),
                                  [&](const auto& d) { return entries[d.second].expanded && saturated(d.first); }),
                   distinct.end());
  if (distinct.empty()) return std::nullopt;
  std::vector<size_t> order(distinct.size());
  std::iota(order.begin(), order.end(), 0);
  if (seed != 0) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + (uint64_t)round);
    std::shuffle(order.begin(), order.end(), rng);
  }
  auto rank = [&](size_t i) {
    const Entry& en = entries[distinct[i].second];
    return std::make_pair(en.touched, en.expanded ? 1 : 0);
  };
  size_t best = order[0];
  for (size_t i : order)
    if (rank(i) < rank(best)) best = i;
  return distinct[best].first;
}

void Scheduler::expanded(const Element& e, long round) {
  std::string k = element_key(e);
  for (auto& en : entries)
    if (en.key == k) {
      en.touched = round;
      en.expanded = true;
    }
}

// ---------------------------------------------------------------------- build

namespace {

void check_precondition(const TypeEnv& env, const Sequent& seq) {
  check_sequent(env, seq);
  for (const auto& x : free_vars(seq)) {
    const TypeP& t = env.at(x);
    if (t->kind == Type::Kind::Nat) continue;
    for (const auto& a : arg_types(t))
      if (a->kind != Type::Kind::Nat)
        throw PreconditionError("free variable " + x + " : " + type_str(t) + " is higher-order");
  }
}

// For each formula of target, in order, a distinct alpha-equivalent position in s.
std::optional<std::vector<size_t>> embed(const std::vector<FPtr>& target, const std::vector<FPtr>& s) {
  std::vector<size_t> pos;
  std::vector<char> used(s.size(), 0);
  for (const auto& f : target) {
    size_t i = 0;
    while (i < s.size() && (used[i] || !alpha_eq(f, s[i]))) ++i;
    if (i == s.size()) return std::nullopt;
    used[i] = 1;
    pos.push_back(i);
  }
  return pos;
}

struct Candidate {
  size_t target;
  std::vector<size_t> left, right;  // kept positions, in target order
  bool exact;
  bool filtered = false;
};

struct Leaf {
  size_t node;
  std::vector<size_t> path;  // round-start ancestors, root first
  Scheduler sched;
  std::vector<Candidate> cands;
  size_t next = 0;  // first candidate not yet rejected
  bool stuck = false;
};

// Weaken away duplicate formulas, keeping the copy a rule just produced when there is one.
size_t dedup(Builder& b, size_t n, const std::optional<std::pair<Occ, size_t>>& fresh) {
  for (bool left : {true, false}) {
    const auto side = left ? b.seq(n).left : b.seq(n).right;
    std::vector<char> drop(side.size(), 0);
    auto is_fresh = [&](size_t i) {
      return fresh && fresh->first.right == !left && i >= fresh->first.index &&
             i < fresh->first.index + fresh->second;
    };
    for (size_t i = 0; i < side.size(); ++i) {
      if (drop[i]) continue;
      std::vector<size_t> group{i};
      for (size_t j = i + 1; j < side.size(); ++j)
        if (!drop[j] && alpha_eq(side[i], side[j])) group.push_back(j);
      if (group.size() == 1) continue;
      size_t keep = group[0];
      for (size_t g : group)
        if (is_fresh(g)) {
          keep = g;
          break;
        }
      for (size_t g : group)
        if (g != keep) drop[g] = 1;
    }
    for (long i = (long)side.size() - 1; i >= 0; --i)
      if (drop[(size_t)i]) n = b.rule(n, left ? Rule::WkL : Rule::WkR, i);
  }
  return n;
}

class Search {
 public:
  Search(const TypeEnv& env, const Sequent& seq, const Options& o) : o_(o), b_(pp_, "n") {
    pp_.env = env;
    size_t r = b_.node(seq);
    b_.set_root(r);
    Leaf l;
    l.node = r;
    leaves_.push_back(std::move(l));
    prepare(leaves_.back());
  }

  Result run() {
    std::string reason = "depth exhausted";
    for (unsigned round = 0;; ++round) {
      // hand candidates to the checker while every leaf is closed or matched
      while (all_matched()) {
        if (checks_ >= o_.max_checks) return out(round, "check budget exhausted");
        std::map<size_t, size_t> back_of;  // closed copy leaf -> leaves_ index
        PreProof cand = close_candidates(back_of);
        if (drop_bad_cycles(cand, back_of)) continue;
        ++checks_;
        gtc::Verdict v = gtc::check_cyclic_proof(cand, o_.gtc);
        if (v.status == gtc::Status::Accepted) return Accepted{std::move(cand), round, checks_};
        last_ = Rejection{cand, v.witness, v.stage};
        bool bumped = false;
        if (v.witness)
          for (size_t x : v.witness->cycle)
            if (auto it = back_of.find(x); it != back_of.end()) {
              leaves_[it->second].next++;
              rejected_++;
              bumped = true;
            }
        if (!bumped)
          for (auto& l : leaves_)
            if (l.next < l.cands.size()) l.next++, rejected_++;
      }
      if (round >= o_.depth) break;
      if (std::any_of(leaves_.begin(), leaves_.end(), [](const Leaf& l) { return l.stuck; })) {
        reason = "open leaf with nothing to expand";
        break;
      }
      if (pp_.nodes.size() > o_.max_nodes) {
        reason = "node budget exhausted";
        break;
      }
      expand_round(round);
    }
    return out(std::min<unsigned>(o_.depth, rounds_), reason);
  }

 private:
  PreProof pp_;
  Options o_;
  Builder b_;
  std::vector<Leaf> leaves_;  // open frontier
  size_t checks_ = 0, rejected_ = 0;
  unsigned rounds_ = 0;
  std::optional<Rejection> last_;

  bool all_matched() const {
    return std::all_of(leaves_.begin(), leaves_.end(), [](const Leaf& l) { return l.next < l.cands.size(); });
  }

  void prepare(Leaf& l) {
    const Sequent& s = b_.seq(l.node);
    std::vector<Candidate> sub;
    for (auto it = l.path.rbegin(); it != l.path.rend(); ++it) {
      const Sequent& a = b_.seq(*it);
      if (seq_alpha_eq(a, s)) {
        l.cands.push_back({*it, {}, {}, true});
        continue;
      }
      if (!o_.subsumption) continue;
      auto el = embed(a.left, s.left);
      auto er = embed(a.right, s.right);
      if (el && er) sub.push_back({*it, *el, *er, false});
    }
    l.cands.insert(l.cands.end(), sub.begin(), sub.end());
  }

  void expand_round(unsigned round) {
    std::vector<Leaf> next;
    auto keep = [&](Leaf& l) { next.push_back(std::move(l)); };
    for (auto& l : leaves_) {
      if (l.next < l.cands.size()) {
        keep(l);
        continue;
      }
      const Sequent& s = b_.seq(l.node);
      auto e = l.sched.pick(s, (long)round, o_.seed,
                            [&](const Element& x) { return saturated(pp_.env, s, x); });
      Fragment fr = expand_leaf(b_, l.node, e);
      if (fr.kind == FragmentKind::NoOp) {
        l.stuck = true;
        keep(l);
        continue;
      }
      if (fr.kind != FragmentKind::Expand) continue;
      l.sched.expanded(*e, (long)round);
      std::vector<size_t> path = l.path;
      path.push_back(l.node);
      for (size_t c : fr.leaves) {
        Leaf child;
        child.node = dedup(b_, c, std::make_pair(fr.principal, fr.produced));
        child.path = path;
        child.sched = l.sched;
        if (find_closure(b_.seq(child.node))) {
          expand_leaf(b_, child.node, std::nullopt);
          continue;
        }
        prepare(child);
        next.push_back(std::move(child));
      }
    }
    leaves_ = std::move(next);
    rounds_ = round + 1;
  }

  // The cycle a single back-edge closes is itself an infinite path; reject candidates
  // whose own cycle has no good trace without running the full check.
  bool drop_bad_cycles(const PreProof& cand, const std::map<size_t, size_t>& back_of) {
    ProofGraph g(cand);
    std::vector<long> parent(cand.nodes.size(), -1);
    for (size_t i = 0; i < cand.nodes.size(); ++i)
      for (size_t c : cand.nodes[i].children) parent[c] = (long)i;
    bool dropped = false;
    for (auto [leaf, i] : back_of) {
      Leaf& l = leaves_[i];
      if (l.cands[l.next].filtered) continue;
      l.cands[l.next].filtered = true;
      trace::Lasso cyc;
      size_t target = cand.back.at(leaf);
      for (long x = (long)leaf; x >= 0; x = parent[(size_t)x]) {
        cyc.cycle.push_back((size_t)x);
        if ((size_t)x == target) break;
      }
      std::reverse(cyc.cycle.begin(), cyc.cycle.end());
      if (!trace::analyze_lasso(g, cyc).good) {
        l.next++;
        rejected_++;
        last_ = Rejection{cand, cyc, "cycle"};
        dropped = true;
      }
    }
    return dropped;
  }

  PreProof close_candidates(std::map<size_t, size_t>& back_of) {
    PreProof cp = pp_;
    Builder cb(cp, "n");
    for (size_t i = 0; i < leaves_.size(); ++i) {
      const Leaf& l = leaves_[i];
      const Candidate& c = l.cands[l.next];
      size_t n = l.node;
      if (!c.exact) {
        std::vector<size_t> kl(c.left.begin(), c.left.end()), kr(c.right.begin(), c.right.end());
        n = cb.keep_only(n, kl, kr);
        // kept formulas are now in ascending original order; permute into target order
        for (bool left : {true, false}) {
          std::vector<size_t> want = left ? c.left : c.right;
          std::vector<size_t> cur = want;
          std::sort(cur.begin(), cur.end());
          for (size_t pos = 0; pos < want.size(); ++pos) {
            size_t from = (size_t)(std::find(cur.begin(), cur.end(), want[pos]) - cur.begin());
            if (from != pos) {
              n = cb.move(n, left, from, pos);
              size_t v = cur[from];
              cur.erase(cur.begin() + (long)from);
              cur.insert(cur.begin() + (long)pos, v);
            }
          }
        }
      }
      cb.back(n, c.target);
      back_of[n] = i;
    }
    return cp;
  }

  Result out(unsigned rounds, std::string reason) {
    OutOfBudget r;
    r.partial = pp_;
    for (const auto& l : leaves_) r.frontier.push_back(l.node);
    r.rounds = rounds;
    r.checks = checks_;
    r.reason = std::move(reason);
    r.rejected = rejected_;
    r.last = last_;
    return r;
  }
};

}  // namespace

Result build(const TypeEnv& env, const Sequent& seq, const Options& o) {
  check_precondition(env, seq);
  Search s(env, seq, o);
  return s.run();
}

}  // namespace hfl::search
