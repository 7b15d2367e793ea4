#include "hfl/gtc.hpp"

#include <deque>
#include <map>

namespace hfl::gtc {

namespace {

FPtr remark(const FPtr& f, long& counter, long target) {
  switch (f->kind) {
    case FKind::Eq:
    case FKind::Var: return f;
    case FKind::Or: {
      FPtr l = remark(f->lhs, counter, target);
      return mk_or(l, remark(f->rhs, counter, target));
    }
    case FKind::And: {
      FPtr l = remark(f->lhs, counter, target);
      return mk_and(l, remark(f->rhs, counter, target));
    }
    case FKind::App: {
      FPtr fn = remark(f->lhs, counter, target);
      if (f->term_arg) return mk_app(fn, f->t1);
      return mk_app(fn, remark(f->rhs, counter, target));
    }
    default: {
      Formula g = *f;
      if (is_fix(f->kind)) g.ann = counter++ == target ? 1 : 0;
      g.lhs = remark(f->lhs, counter, target);
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

const FPtr& occ_formula(const Sequent& s, const Occ& o) { return (o.right ? s.right : s.left).at(o.index); }

struct Step {
  size_t to_node;
  Occ to;
  FPtr marked;
  bool acc;
};

// gtc transitions of a tracked state along every edge of its node
std::vector<Step> steps(const ProofGraph& g, size_t node, const Occ& occ, const FPtr& f) {
  std::vector<Step> out;
  trace::Labels unused;
  for (const Edge& e : g.out[node]) {
    const auto& side = occ.right ? e.link.right : e.link.left;
    for (size_t k = 0; k < side.size(); ++k) {
      if (side[k].src != (long)occ.index) continue;
      Occ to{occ.right, k};
      auto push = [&](FPtr m, bool acc) {
        if (mark_count(m) > 0) out.push_back({e.to, to, std::move(m), acc});
      };
      if (side[k].kind != StepKind::Unfold) {
        push(trace::annotate_step(g, node, e, f, to, unused), false);
        continue;
      }
      FPtr head = spine(f).head;
      if (head->ann == 0) {
        push(unfold_with(f, head), false);
        continue;
      }
      // follow the unfolded operator: its copies become the only marks
      bool good = (head->kind == FKind::Mu && !occ.right) || (head->kind == FKind::Nu && occ.right);
      push(unfold_with(strip(f), with_ann(strip(head), 1)), good);
      // or keep following the other marked copies
      push(unfold_with(f, with_ann(head, 0)), false);
    }
  }
  return out;
}

std::vector<Occ> occurrences(const Sequent& s) {
  std::vector<Occ> out;
  for (size_t i = 0; i < s.left.size(); ++i) out.push_back({false, i});
  for (size_t i = 0; i < s.right.size(); ++i) out.push_back({true, i});
  return out;
}

}  // namespace

size_t mark_count(const FPtr& f) {
  if (!f) return 0;
  size_t n = is_fix(f->kind) && f->ann != 0 ? 1 : 0;
  if (f->kind == FKind::App && f->term_arg) return mark_count(f->lhs);
  return n + mark_count(f->lhs) + mark_count(f->rhs);
}

std::vector<FPtr> single_markings(const FPtr& f) {
  std::vector<FPtr> out;
  size_t n = count_fix(f);
  for (size_t i = 0; i < n; ++i) {
    long c = 0;
    out.push_back(remark(f, c, (long)i));
  }
  return out;
}

buchi::Automaton build_path_automaton(const PreProof& pp) {
  ProofGraph g(pp);
  buchi::Automaton a;
  a.alphabet = pp.nodes.size();
  for (const auto& n : pp.nodes) {
    a.add_state(n.id);
    a.symbol_names.push_back(n.id);
  }
  a.initial = {pp.root};
  for (size_t n = 0; n < g.size(); ++n)
    for (size_t m : g.successors(n)) a.add(n, n, m, true);
  return a;
}

size_t state_bound(const PreProof& pp) {
  const size_t cap = (size_t)1 << 40;
  size_t total = 1;
  for (const auto& n : pp.nodes)
    for (const auto* side : {&n.seq.left, &n.seq.right})
      for (const auto& f : *side) {
        size_t k = count_fix(f);
        total += k >= 40 ? cap : (size_t)1 << k;
        if (total >= cap) return cap;
      }
  return total;
}

GtcAutomaton build_gtc_automaton(const PreProof& pp, size_t max_states) {
  ProofGraph g(pp);
  GtcAutomaton r;
  r.aut.alphabet = pp.nodes.size();
  for (const auto& n : pp.nodes) r.aut.symbol_names.push_back(n.id);
  r.aut.add_state("*");
  r.states.push_back(GtcState{});
  r.aut.initial = {0};
  std::map<std::string, buchi::State> index;
  std::deque<buchi::State> work;
  auto intern = [&](size_t node, const Occ& occ, const FPtr& m) {
    std::string key = std::to_string(node) + "|" + occ_str(occ) + "|" + canon(m, true);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (r.states.size() >= max_states) throw buchi::SizeGuard("gtc automaton exceeds the state cap");
    buchi::State s = r.aut.add_state(pp.nodes[node].id + " " + occ_str(occ) + " " +
                                     to_string_annotated(m, [](long a) { return a ? std::string("•") : ""; }));
    r.states.push_back(GtcState{false, node, occ, m});
    index.emplace(std::move(key), s);
    work.push_back(s);
    return s;
  };
  for (size_t n = 0; n < pp.nodes.size(); ++n) {
    r.aut.add(0, n, 0, false);
    for (const Occ& o : occurrences(pp.nodes[n].seq))
      for (const FPtr& m : single_markings(occ_formula(pp.nodes[n].seq, o)))
        for (const Step& st : steps(g, n, o, m)) r.aut.add(0, n, intern(st.to_node, st.to, st.marked), st.acc);
  }
  while (!work.empty()) {
    buchi::State s = work.front();
    work.pop_front();
    GtcState cur = r.states[s];
    for (const Step& st : steps(g, cur.node, cur.occ, cur.marked))
      r.aut.add(s, cur.node, intern(st.to_node, st.to, st.marked), st.acc);
  }
  return r;
}

buchi::LassoWord lasso_word(const trace::Lasso& l) { return {l.prefix, l.cycle}; }
trace::Lasso word_lasso(const buchi::LassoWord& w) { return {w.u, w.v}; }

GtcResult check_gtc(const PreProof& pp, const Options& o) {
  GtcResult r;
  try {
    buchi::Automaton path = build_path_automaton(pp);
    GtcAutomaton gt = build_gtc_automaton(pp, o.max_states);
    r.gtc_states = gt.aut.states;
    buchi::Containment c = o.method == Method::Ramsey ? buchi::contains_ramsey(path, gt.aut, o.max_profiles)
                                                      : buchi::contains(path, gt.aut, o.max_states);
    if (c.holds) return r;
    r.status = GtcStatus::Fails;
    r.counterexample = word_lasso(*c.counterexample);
    r.detail = "infinite path without a left mu-trace or right nu-trace tail";
  } catch (const buchi::SizeGuard& e) {
    r.status = GtcStatus::Unknown;
    r.detail = e.what();
  }
  return r;
}

std::string status_str(Status s) {
  switch (s) {
    case Status::Accepted: return "Accepted";
    case Status::Rejected: return "Rejected";
    case Status::Unknown: return "Unknown";
  }
  return "Unknown";
}

Verdict check_cyclic_proof(const PreProof& pp, const Options& o, bool allow_extended) {
  Verdict v;
  v.issues = validate_preproof(pp, allow_extended);
  if (!v.issues.empty()) {
    v.status = Status::Rejected;
    v.stage = "structure";
    v.detail = v.issues[0].node + ": " + v.issues[0].message;
    return v;
  }
  GtcResult g = check_gtc(pp, o);
  if (g.status == GtcStatus::Holds) return v;
  v.stage = "gtc";
  v.detail = g.detail;
  v.witness = g.counterexample;
  v.status = g.status == GtcStatus::Fails ? Status::Rejected : Status::Unknown;
  return v;
}

}  // namespace hfl::gtc
