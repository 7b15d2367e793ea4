#include "hfl/generate.hpp"

#include <set>
#include <stdexcept>

#include "hfl/encodings.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"

namespace hfl::gen {

namespace {

// S1/S2 are replaced by mu or nu
const char* const kShapes[] = {
    "(S1 f:(O->O)->O. \\g:O->O. g (f g)) (S2 x:O->O. \\c:O. c)",
    "(S1 f:(O->O)->O. \\g:O->O. g (f g)) (S2 x:O->O. \\c:O. x c)",
    "(S1 f:O->O->O. \\g:O. \\h:O. f h g \\/ g) a b",
    "(S1 f:O->O. \\g:O. g /\\ f g) (S2 z:O. z \\/ a)",
    "(S1 f:O->O. \\g:O. f g \\/ g) a",
    "(S1 f:(O->O)->O. \\g:O->O. f g /\\ g a) (\\c:O. S2 z:O. c \\/ z)",
};

struct Gen {
  std::mt19937& rng;
  const Options& o;
  size_t fresh = 0;

  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
  size_t below(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  FPtr atom() { return mk_var(coin(0.5) ? "a" : "b"); }

  FPtr formula(size_t d, std::vector<std::string>& bound) {
    if (d == 0 || coin(0.2)) {
      if (!bound.empty() && coin(0.75)) return mk_var(bound[below(bound.size())]);
      return atom();
    }
    switch (below(3)) {
      case 0: {
        FPtr l = formula(d - 1, bound);
        return mk_or(l, formula(d - 1, bound));
      }
      case 1: {
        FPtr l = formula(d - 1, bound);
        return mk_and(l, formula(d - 1, bound));
      }
      default: return fix(d - 1, bound);
    }
  }

  FPtr fix(size_t d, std::vector<std::string>& bound) {
    std::string x = "x" + std::to_string(fresh++);
    bound.push_back(x);
    FPtr body = formula(d, bound);
    bound.pop_back();
    return mk_fix(coin(0.5) ? FKind::Mu : FKind::Nu, x, prop_type(), body);
  }

  FPtr top_formula() {
    if (coin(0.3)) {
      std::string s = kShapes[below(std::size(kShapes))];
      for (const char* k : {"S1", "S2"}) {
        auto p = s.find(k);
        if (p != std::string::npos) s.replace(p, 2, coin(0.5) ? "mu" : "nu");
      }
      ParseContext ctx;
      ctx.env = {{"a", prop_type()}, {"b", prop_type()}};
      return parse_formula(s, ctx);
    }
    std::vector<std::string> bound;
    return fix(o.formula_depth, bound);
  }

  std::vector<RuleInst> candidates(const Sequent& s) {
    std::vector<RuleInst> out;
    auto add = [&](Rule r, size_t i, size_t weight) {
      RuleInst ri;
      ri.tag = r;
      ri.at = (long)i;
      for (size_t k = 0; k < weight; ++k) out.push_back(ri);
    };
    size_t total = s.left.size() + s.right.size();
    for (bool left : {true, false}) {
      const auto& side = left ? s.left : s.right;
      for (size_t i = 0; i < side.size(); ++i) {
        Spine sp = spine(side[i]);
        switch (sp.head->kind) {
          case FKind::Or: add(left ? Rule::OrL : Rule::OrR, i, 4); break;
          case FKind::And: add(left ? Rule::AndL : Rule::AndR, i, 4); break;
          case FKind::Mu: add(left ? Rule::MuL : Rule::MuR, i, 4); break;
          case FKind::Nu: add(left ? Rule::NuL : Rule::NuR, i, 4); break;
          case FKind::Lam:
            if (!sp.args.empty()) add(left ? Rule::LamL : Rule::LamR, i, 6);
            break;
          default: break;
        }
        if (total > 1) add(left ? Rule::WkL : Rule::WkR, i, sp.head->kind == FKind::Var ? 4 : 1);
        if (total < 3) add(left ? Rule::CtrL : Rule::CtrR, i, 1);
      }
    }
    return out;
  }

  std::optional<PreProof> run() {
    PreProof pp;
    pp.env = {{"a", prop_type()}, {"b", prop_type()}};
    Sequent root;
    FPtr f = top_formula();
    switch (below(4)) {
      case 0: root.right = {f}; break;
      case 1: root.left = {f}; break;
      case 2: root.left = {f}, root.right = {top_formula()}; break;
      default: root.left = {atom()}, root.right = {f}; break;
    }
    auto new_node = [&](const Sequent& s) {
      Node n;
      n.id = "n" + std::to_string(pp.nodes.size());
      n.seq = s;
      pp.nodes.push_back(std::move(n));
      return pp.nodes.size() - 1;
    };
    std::vector<size_t> pending{new_node(root)};
    while (!pending.empty()) {
      size_t n = pending.back();
      pending.pop_back();
      const Sequent s = pp.nodes[n].seq;
      std::vector<size_t> targets;
      for (size_t m = 0; m < pp.nodes.size(); ++m)
        if (m != n && pp.nodes[m].rule && seq_alpha_eq(pp.nodes[m].seq, s)) targets.push_back(m);
      if (!targets.empty() && coin(o.back_prob)) {
        pp.back[n] = targets[below(targets.size())];
        continue;
      }
      if (s.left.size() == 1 && s.right.size() == 1 && alpha_eq(s.left[0], s.right[0])) {
        pp.nodes[n].rule = RuleInst{};
        continue;
      }
      auto cs = candidates(s);
      if (cs.empty()) return std::nullopt;
      RuleInst r = cs[below(cs.size())];
      Derivation d = derive(pp.env, s, r, {});
      if (pp.nodes.size() + d.premises.size() > o.max_nodes) return std::nullopt;
      pp.nodes[n].rule = r;
      for (const Sequent& p : d.premises) {
        size_t c = new_node(p);
        pp.nodes[n].children.push_back(c);
      }
      for (auto it = pp.nodes[n].children.rbegin(); it != pp.nodes[n].children.rend(); ++it)
        pending.push_back(*it);
    }
    // leaves that became open before their target got a rule are fine; unclosed ones are not
    for (size_t n = 0; n < pp.nodes.size(); ++n)
      if (!pp.nodes[n].rule && !pp.back.count(n)) return std::nullopt;
    if (pp.back.empty()) return std::nullopt;
    if (!validate_preproof(pp).empty()) return std::nullopt;
    return pp;
  }
};

}  // namespace

std::optional<PreProof> random_preproof(std::mt19937& rng, const Options& o) {
  Gen g{rng, o};
  return g.run();
}

std::vector<PreProof> random_corpus(uint32_t seed, size_t count, const Options& o) {
  std::mt19937 rng(seed);
  std::vector<PreProof> out;
  std::set<std::string> seen;
  for (size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt > count * 20000) throw std::runtime_error("random_corpus: attempt budget exhausted");
    auto pp = random_preproof(rng, o);
    if (!pp) continue;
    if (seen.insert(write_proof(*pp)).second) out.push_back(std::move(*pp));
  }
  return out;
}

}  // namespace hfl::gen
