#include "hfl/trace.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace hfl::trace {

Labels::Labels() : parent_{-1}, number_{-1}, depth_{0} {}

long Labels::extend(long p) {
  parent_.push_back(p);
  number_.push_back(next_++);
  depth_.push_back(depth_.at((size_t)p) + 1);
  return (long)parent_.size() - 1;
}

bool Labels::prefix_eq(long a, long b) const {
  while (depth_.at((size_t)b) > depth_.at((size_t)a)) b = parent_[(size_t)b];
  return a == b;
}

size_t Labels::length(long a) const { return depth_.at((size_t)a); }

std::string Labels::str(long a) const {
  if (a == 0) return "ε";
  std::vector<long> ns;
  for (long x = a; x > 0; x = parent_[(size_t)x]) ns.push_back(number_[(size_t)x]);
  std::string s;
  for (auto it = ns.rbegin(); it != ns.rend(); ++it) {
    if (!s.empty()) s += ".";
    s += std::to_string(*it);
  }
  return s;
}

namespace {

const FPtr& occ_formula(const Sequent& s, const Occ& o) { return (o.right ? s.right : s.left).at(o.index); }

const OccLink& occ_link(const PremiseLink& pl, const Occ& o) { return (o.right ? pl.right : pl.left).at(o.index); }

// premise occurrences that descend from `from`
std::vector<Occ> images(const Edge& e, const Occ& from) {
  std::vector<Occ> out;
  const auto& side = from.right ? e.link.right : e.link.left;
  for (size_t k = 0; k < side.size(); ++k)
    if (side[k].src == (long)from.index) out.push_back({from.right, k});
  return out;
}

const Edge* edge_to(const ProofGraph& g, size_t a, size_t b) {
  for (const auto& e : g.out[a])
    if (e.to == b) return &e;
  return nullptr;
}

void collect_ids(const FPtr& f, std::vector<long>& ids, std::vector<FKind>& kinds) {
  if (is_fix(f->kind) && std::find(ids.begin(), ids.end(), f->ann) == ids.end()) {
    ids.push_back(f->ann);
    kinds.push_back(f->kind);
  }
  if (f->lhs) collect_ids(f->lhs, ids, kinds);
  if (f->rhs) collect_ids(f->rhs, ids, kinds);
}

FPtr relabel(const FPtr& f, const std::map<long, long>& m) {
  switch (f->kind) {
    case FKind::Eq:
    case FKind::Var: return f;
    case FKind::Or: return mk_or(relabel(f->lhs, m), relabel(f->rhs, m));
    case FKind::And: return mk_and(relabel(f->lhs, m), relabel(f->rhs, m));
    case FKind::App:
      if (f->term_arg) return mk_app(relabel(f->lhs, m), f->t1);
      return mk_app(relabel(f->lhs, m), relabel(f->rhs, m));
    default: {
      Formula g = *f;
      g.lhs = relabel(f->lhs, m);
      if (is_fix(f->kind)) g.ann = m.at(f->ann);
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

struct Snapshot {
  std::string key;
  std::vector<long> ids;
  std::vector<FKind> kinds;
};

Snapshot snapshot(const FPtr& f, const Labels& L) {
  Snapshot s;
  collect_ids(f, s.ids, s.kinds);
  std::map<long, long> m;
  for (size_t i = 0; i < s.ids.size(); ++i) m[s.ids[i]] = (long)i + 1;
  s.key = canon(relabel(f, m), true) + "|";
  for (size_t i = 0; i < s.ids.size(); ++i)
    for (size_t j = 0; j < s.ids.size(); ++j) s.key += L.prefix_eq(s.ids[i], s.ids[j]) ? '1' : '0';
  return s;
}

// one step-sequence of a periodic trace
struct Step {
  size_t node;
  const Edge* edge;
  Occ to;
};

// Simulate the periodic trace until the abstraction repeats, then read off growth.
void classify_walk(const ProofGraph& g, const std::vector<Step>& steps, const FPtr& start, const Options& o,
                   bool& mu, bool& nu) {
  Labels L;
  FPtr cur = strip(start);
  std::vector<Snapshot> snaps;
  std::map<std::string, size_t> seen;
  for (size_t period = 0; period <= o.sim_periods; ++period) {
    Snapshot s = snapshot(cur, L);
    auto it = seen.find(s.key);
    if (it != seen.end()) {
      const Snapshot& a = snaps[it->second];
      size_t n = a.ids.size();
      // edge i -> j when the id at position i before is a prefix of the one at j after
      std::vector<std::vector<int>> rel(n, std::vector<int>(n, 0));  // 0 none, 1 equal, 2 strict
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (L.prefix_eq(a.ids[i], s.ids[j])) rel[i][j] = a.ids[i] == s.ids[j] ? 1 : 2;
      // reachability closure
      std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) reach[i][j] = rel[i][j] != 0;
      for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i)
          if (reach[i][k])
            for (size_t j = 0; j < n; ++j)
              if (reach[k][j]) reach[i][j] = 1;
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (rel[i][j] == 2 && reach[j][i]) {
            if (s.kinds[j] == FKind::Mu) mu = true;
            else nu = true;
          }
      return;
    }
    seen[s.key] = snaps.size();
    snaps.push_back(std::move(s));
    for (const auto& st : steps) cur = annotate_step(g, st.node, *st.edge, cur, st.to, L);
  }
  throw ExplosionGuard("annotation abstraction did not repeat within the simulation bound");
}

}  // namespace

FPtr annotate_step(const ProofGraph& g, size_t node, const Edge& e, const FPtr& ann, const Occ& to, Labels& L) {
  const PreProof& pp = *g.pp;
  const FPtr& plain = occ_formula(pp.nodes[e.to].seq, to);
  const OccLink& lk = occ_link(e.link, to);
  switch (lk.kind) {
    case StepKind::Copy: return ann;
    case StepKind::Transfer: return transfer(ann, plain);
    case StepKind::Beta: return beta_head(ann);
    case StepKind::Unfold: {
      FPtr head = spine(ann).head;
      return unfold_with(ann, with_ann(head, L.extend(head->ann)));
    }
    case StepKind::MonoArg: {
      const RuleInst& r = *pp.nodes[node].rule;
      FPtr arg = mono_arg(ann, r.formula, r.var, e.link.mono_occ);
      Spine sp = spine(plain);
      size_t k = r.ys.size();
      std::vector<Arg> ys(sp.args.end() - (long)k, sp.args.end());
      return apply_args(arg, ys);
    }
    case StepKind::Operand0: return ann->lhs;
    case StepKind::Operand1: return ann->rhs;
    case StepKind::Plain: return plain;
  }
  return plain;
}

std::string lasso_str(const PreProof& pp, const Lasso& l) {
  std::string s;
  for (size_t n : l.prefix) s += pp.nodes[n].id + " ";
  s += "(";
  for (size_t i = 0; i < l.cycle.size(); ++i) {
    if (i) s += " ";
    s += pp.nodes[l.cycle[i]].id;
  }
  return s + ")^ω";
}

bool is_walk(const ProofGraph& g, const Lasso& l) {
  if (l.cycle.empty()) return false;
  std::vector<size_t> seq = l.prefix;
  seq.insert(seq.end(), l.cycle.begin(), l.cycle.end());
  seq.push_back(l.cycle[0]);
  if (seq[0] != g.pp->root) return false;
  for (size_t i = 0; i + 1 < seq.size(); ++i)
    if (!edge_to(g, seq[i], seq[i + 1])) return false;
  return true;
}

TraceClass classify_lasso_trace(const ProofGraph& g, const Lasso& l, size_t pos, const Occ& start,
                                const Options& o) {
  const PreProof& pp = *g.pp;
  const size_t L = l.cycle.size();
  // rotate so the start sits at position 0
  std::vector<size_t> cyc(L);
  for (size_t i = 0; i < L; ++i) cyc[i] = l.cycle[(pos + i) % L];
  std::vector<const Edge*> edges(L);
  for (size_t i = 0; i < L; ++i) {
    edges[i] = edge_to(g, cyc[i], cyc[(i + 1) % L]);
    if (!edges[i]) throw std::invalid_argument("lasso is not a walk of the pre-proof");
  }
  const Sequent& s0 = pp.nodes[cyc[0]].seq;
  if (start.index >= (start.right ? s0.right : s0.left).size())
    throw std::invalid_argument("start occurrence out of range");
  const FPtr& f0 = occ_formula(s0, start);

  TraceClass best;
  best.right = start.right;
  bool have = false;
  size_t walks = 0;
  std::vector<Occ> walk{start};
  std::vector<Step> steps;
  // depth-first over closed walks of the occurrence graph
  std::function<bool(size_t, const Occ&)> dfs = [&](size_t depth, const Occ& cur) -> bool {
    size_t i = depth % L;
    for (const Occ& nx : images(*edges[i], cur)) {
      steps.push_back({cyc[i], edges[i], nx});
      if ((depth + 1) % L == 0 && nx == start) {
        if (++walks > o.walk_cap) throw ExplosionGuard("trace enumeration cap exceeded");
        bool mu = false, nu = false;
        classify_walk(g, steps, f0, o, mu, nu);
        TraceClass tc;
        tc.right = start.right;
        tc.walk = walk;
        tc.both = mu && nu;
        tc.kind = mu ? TraceKind::Mu : nu ? TraceKind::Nu : TraceKind::None;
        if (tc.both) tc.kind = start.right ? TraceKind::Nu : TraceKind::Mu;
        if (tc.good()) {
          best = tc;
          steps.pop_back();
          return true;
        }
        if (!have || (best.kind == TraceKind::None && tc.kind != TraceKind::None) || tc.both) {
          best = tc;
          have = true;
        }
      }
      if (depth + 1 < o.max_periods * L) {
        walk.push_back(nx);
        bool done = dfs(depth + 1, nx);
        walk.pop_back();
        if (done) {
          steps.pop_back();
          return true;
        }
      }
      steps.pop_back();
    }
    return false;
  };
  dfs(0, start);
  return best;
}

LassoVerdict analyze_lasso(const ProofGraph& g, const Lasso& l, const Options& o) {
  LassoVerdict v;
  const Sequent& s = g.pp->nodes[l.cycle[0]].seq;
  std::vector<Occ> starts;
  for (size_t i = 0; i < s.left.size(); ++i) starts.push_back({false, i});
  for (size_t i = 0; i < s.right.size(); ++i) starts.push_back({true, i});
  for (const Occ& st : starts) {
    TraceClass tc = classify_lasso_trace(g, l, 0, st, o);
    if (tc.both) ++v.violations;
    if (tc.walk.empty()) continue;
    v.traces.push_back(tc);
    if (tc.good() && !v.good) {
      v.good = true;
      v.witness = tc;
    }
  }
  return v;
}

std::vector<Lasso> simple_lassos(const ProofGraph& g, size_t cap) {
  std::vector<Lasso> out;
  std::vector<size_t> path;
  std::vector<long> where(g.size(), -1);
  std::function<void(size_t)> go = [&](size_t n) {
    where[n] = (long)path.size();
    path.push_back(n);
    for (const auto& e : g.out[n]) {
      if (where[e.to] >= 0) {
        Lasso l;
        l.prefix.assign(path.begin(), path.begin() + where[e.to]);
        l.cycle.assign(path.begin() + where[e.to], path.end());
        out.push_back(std::move(l));
        if (out.size() > cap) throw ExplosionGuard("lasso enumeration cap exceeded");
      } else {
        go(e.to);
      }
    }
    path.pop_back();
    where[n] = -1;
  };
  go(g.pp->root);
  return out;
}

BruteResult gtc_bruteforce(const PreProof& pp, const Options& o) {
  ProofGraph g(pp);
  BruteResult r;
  for (const Lasso& l : simple_lassos(g, o.lasso_cap)) {
    ++r.lassos;
    LassoVerdict v = analyze_lasso(g, l, o);
    r.traces += v.traces.size();
    r.violations += v.violations;
    if (!v.good && r.ok) {
      r.ok = false;
      r.counterexample = l;
    }
  }
  return r;
}

std::vector<ReplayStep> replay(const ProofGraph& g, const std::vector<size_t>& path, const Occ& start,
                               const std::vector<Occ>* choices) {
  std::vector<ReplayStep> out;
  if (path.empty()) return out;
  Labels L;
  Occ cur = start;
  FPtr ann = strip(occ_formula(g.pp->nodes[path[0]].seq, start));
  out.push_back({path[0], cur, ann, {}});
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Edge* e = edge_to(g, path[i], path[i + 1]);
    if (!e) break;
    auto im = images(*e, cur);
    if (im.empty()) break;
    Occ nx = im[0];
    if (choices && i + 1 < choices->size() && std::find(im.begin(), im.end(), (*choices)[i + 1]) != im.end())
      nx = (*choices)[i + 1];
    ann = annotate_step(g, path[i], *e, ann, nx, L);
    cur = nx;
    out.push_back({path[i + 1], cur, ann, {}});
  }
  for (auto& s : out) s.text = to_string_annotated(s.annotated, [&](long a) { return L.str(a); });
  return out;
}

std::string replay_text(const PreProof& pp, const std::vector<ReplayStep>& steps) {
  std::string out;
  for (size_t i = 0; i < steps.size(); ++i)
    out += "tau" + std::to_string(i) + " " + pp.nodes[steps[i].node].id + " " + occ_str(steps[i].occ) + ": " +
           steps[i].text + "\n";
  return out;
}

}  // namespace hfl::trace
