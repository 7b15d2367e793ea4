// Writes the derived corpus files:
//   gen_corpus random DIR [COUNT] [SEED]   random pre-proofs, one file each
//   gen_corpus examples DIR                the worked examples and the leq lemma
//   gen_corpus mutants DIR                 broken variants of the examples (reads DIR)
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hfl/builder.hpp"
#include "hfl/elaborate.hpp"
#include "hfl/encodings.hpp"
#include "hfl/generate.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"

using namespace hfl;
namespace fs = std::filesystem;

namespace {

struct Ctx {
  PreProof pp;
  Defs defs = enc::standard_defs();

  void def(const std::string& name, const std::string& text) {
    FPtr f = parse(text);
    defs[name] = f;
    pp.defs.emplace_back(name, f);
  }
  FPtr parse(const std::string& text) {
    ParseContext c;
    c.env = pp.env;
    c.defs = &defs;
    return parse_formula(text, c);
  }
  Sequent seq(const std::string& text) {
    ParseContext c;
    c.env = pp.env;
    c.defs = &defs;
    return parse_sequent(text, c).seq;
  }
};

RuleInst with_var(Rule tag, long at, const std::string& v) {
  RuleInst r;
  r.tag = tag;
  r.at = at;
  r.var = v;
  return r;
}

RuleInst with_witness(Rule tag, long at, Arg w) {
  RuleInst r;
  r.tag = tag;
  r.at = at;
  r.witness = std::move(w);
  return r;
}

size_t chain(Builder& b, size_t n, std::initializer_list<std::pair<Rule, long>> steps) {
  for (auto [r, i] : steps) n = b.rule(n, r, i);
  return n;
}

// well-foundedness of a layered tree given by f : N->N->O; nodes are (depth, index).
// The flags pick the operators of Phi and of the inner quantifier of Psi (mutants).
PreProof tree_example(bool phi_mu = true, bool ypsi_nu = true) {
  Ctx c;
  c.pp.env = parse_decls("f:N->N->O, l:N, m:N, n:N");
  std::string phi = phi_mu ? "mu" : "nu", ypsi = ypsi_nu ? "nu" : "mu";
  c.def("Phi", phi + " w:N->N->O. \\d:N. \\j:N. f d j \\/ (nu Y:N->O. \\i:N. w (S d) i /\\ Y (S i)) Z");
  c.def("Psi", "mu v:N->N->O. \\d:N. \\j:N. f d j \\/ (" + ypsi + " Y:N->O. \\i:N. v (S d) i /\\ Y (S i)) Z");
  c.def("YPhi", "nu Y:N->O. \\i:N. Phi (S l) i /\\ Y (S i)");
  c.def("YPsi", ypsi + " Y:N->O. \\i:N. Psi (S l) i /\\ Y (S i)");
  Builder b(c.pp, "n");
  size_t root = b.node(c.seq("Phi Z Z |- Psi Z Z"));
  b.set_root(root);
  Sequent dagger = c.seq("Phi l m |- Psi l m"), star = c.seq("YPhi n |- YPsi n");
  size_t d = b.subst(root, {{"l", Arg::of(Term::zero())}, {"m", Arg::of(Term::zero())}}, dagger);
  c.pp.nodes[d].label = "†";
  size_t u = chain(b, d, {{phi_mu ? Rule::MuL : Rule::NuL, 0}, {Rule::MuR, 0}, {Rule::LamL, 0}, {Rule::LamL, 0},
                          {Rule::LamR, 0}, {Rule::LamR, 0}});
  auto br = b.apply(u, [] { RuleInst r; r.tag = Rule::OrL; r.at = 0; return r; }());
  b.close(chain(b, br[0], {{Rule::OrR, 0}, {Rule::WkR, 1}}));
  size_t v = chain(b, br[1], {{Rule::OrR, 0}, {Rule::WkR, 0}});
  size_t s = b.subst(v, {{"n", Arg::of(Term::zero())}}, star);
  c.pp.nodes[s].label = "★";
  size_t w = chain(b, s, {{Rule::NuL, 0}, {ypsi_nu ? Rule::NuR : Rule::MuR, 0}, {Rule::LamL, 0}, {Rule::LamR, 0}, {Rule::AndL, 0}});
  RuleInst andr;
  andr.tag = Rule::AndR;
  andr.at = 0;
  auto ps = b.apply(w, andr);
  size_t p0 = b.rule(ps[0], Rule::WkL, 1);
  b.back(b.subst(p0, {{"l", Arg::of(Term::variable("l", 1))}, {"m", Arg::of(Term::variable("n"))}}, dagger), d);
  size_t p1 = b.rule(ps[1], Rule::WkL, 0);
  b.back(b.subst(p1, {{"n", Arg::of(Term::variable("n", 1))}}, star), s);
  b.finish();
  return c.pp;
}

// termination of the repeat program with input 1, using quantifier rules
PreProof repeat_example() {
  Ctx c;
  c.pp.env = parse_decls("n:N, m:N");
  c.def("repeat",
        "mu R:(N->(N->O)->O)->N->O. \\f:N->(N->O)->O. \\x:N. x = Z \\/ "
        "(mu E:N->O. \\x1:N. (x = S x1 /\\ (f x (R f) /\\ R f x1)) \\/ E (S x1)) Z");
  c.def("sub",
        "\\y:N. \\x:N. \\k:N->O. (mu M:N->N->O. \\a:N. \\b:N. (b = Z /\\ k a) \\/ "
        "(mu E:N->O. \\a1:N. (mu F:N->O. \\b1:N. ((a = S a1 /\\ b = S b1) /\\ M a1 b1) \\/ F (S b1)) Z \\/ "
        "E (S a1)) Z) x y");
  c.def("input", "mu I:N->(N->O)->O. \\x:N. \\k:N->O. k x \\/ I (S x) k");
  c.def("g", "\\z:N. \\y:N. repeat (sub y) z");
  Builder b(c.pp, "n");
  size_t root = b.node(c.seq("|- input Z (g n)"));
  b.set_root(root);
  size_t u = chain(b, root, {{Rule::MuR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::OrR, 0}, {Rule::WkR, 0},
                             {Rule::MuR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::OrR, 0}, {Rule::WkR, 1},
                             {Rule::LamR, 0}, {Rule::LamR, 0}});
  RuleInst nat = with_var(Rule::Nat, -1, "n");
  size_t r0 = b.apply1(u, nat);
  c.pp.nodes[r0].label = "★";
  Sequent star = b.seq(r0);
  size_t v = chain(b, r0, {{Rule::MuL, 0}, {Rule::LamL, 0}});
  RuleInst orl;
  orl.tag = Rule::OrL;
  orl.at = 0;
  auto br = b.apply(v, orl);
  // n = Z
  size_t z = chain(b, br[0], {{Rule::EqL, 0}, {Rule::MuR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::OrR, 0},
                              {Rule::WkR, 1}});
  b.close(z, Rule::EqR, 0);
  // n = S m /\ N m
  size_t s = b.apply1(br[1], with_var(Rule::ExistsL, 0, "m"));
  s = chain(b, s, {{Rule::AndL, 0}, {Rule::EqL, 0}, {Rule::MuR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0},
                   {Rule::OrR, 0}, {Rule::WkR, 0}});
  s = b.apply1(s, with_witness(Rule::ExistsR, 0, Arg::of(Term::variable("m"))));
  RuleInst andr;
  andr.tag = Rule::AndR;
  andr.at = 0;
  auto cs = b.apply(s, andr);
  b.close(b.rule(cs[0], Rule::WkL, 0), Rule::EqR, 0);
  auto ds = b.apply(cs[1], andr);
  // the step f x (R f) with f = sub 1 lands back at N m |- repeat (sub 1) m
  size_t e = chain(b, ds[0], {{Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::MuR, 0}, {Rule::LamR, 0},
                              {Rule::LamR, 0}, {Rule::OrR, 0}, {Rule::WkR, 0}});
  e = b.apply1(e, with_witness(Rule::ExistsR, 0, Arg::of(Term::variable("m"))));
  e = b.apply1(e, with_witness(Rule::ExistsR, 0, Arg::of(Term::zero())));
  auto es = b.apply(e, andr);
  auto eqs = b.apply(es[0], andr);
  for (size_t q : eqs) b.close(b.rule(q, Rule::WkL, 0), Rule::EqR, 0);
  size_t f = chain(b, es[1], {{Rule::MuR, 0}, {Rule::LamR, 0}, {Rule::LamR, 0}, {Rule::OrR, 0}, {Rule::WkR, 1}});
  auto fs2 = b.apply(f, andr);
  b.close(b.rule(fs2[0], Rule::WkL, 0), Rule::EqR, 0);
  b.back(b.subst(fs2[1], {{"n", Arg::of(Term::variable("m"))}}, star), r0);
  b.back(b.subst(ds[1], {{"n", Arg::of(Term::variable("m"))}}, star), r0);
  b.finish();
  return c.pp;
}

FPtr flip(const FPtr& f) {
  if (!f) return f;
  auto g = std::make_shared<Formula>(*f);
  if (f->kind == FKind::Mu) g->kind = FKind::Nu;
  else if (f->kind == FKind::Nu) g->kind = FKind::Mu;
  g->lhs = flip(f->lhs);
  g->rhs = flip(f->rhs);
  return g;
}

// every mu becomes nu and back, rules included
PreProof flip_all(PreProof pp) {
  auto fl = [](std::vector<FPtr>& v) {
    for (auto& f : v) f = flip(f);
  };
  for (auto& n : pp.nodes) {
    fl(n.seq.left);
    fl(n.seq.right);
    if (!n.rule) continue;
    auto& r = *n.rule;
    switch (r.tag) {
      case Rule::MuL: r.tag = Rule::NuL; break;
      case Rule::NuL: r.tag = Rule::MuL; break;
      case Rule::MuR: r.tag = Rule::NuR; break;
      case Rule::NuR: r.tag = Rule::MuR; break;
      default: break;
    }
    for (FPtr* f : {&r.formula, &r.psi, &r.chi}) *f = flip(*f);
  }
  pp.defs.clear();
  return pp;
}

size_t id(const PreProof& pp, const std::string& s) {
  auto i = pp.find(s);
  if (!i) throw std::runtime_error("no node " + s);
  return *i;
}

void write(const fs::path& p, const std::string& header, const PreProof& pp) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << header << write_proof(pp);
  std::cout << p.string() << ": " << pp.nodes.size() << " nodes\n";
}

int usage() {
  std::cerr << "usage: gen_corpus random DIR [COUNT] [SEED] | gen_corpus examples|mutants DIR\n";
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) return usage();
  std::string mode = argv[1];
  fs::path dir = argv[2];
  try {
    if (mode == "random") {
      size_t count = argc > 3 ? std::stoul(argv[3]) : 250;
      uint32_t seed = argc > 4 ? (uint32_t)std::stoul(argv[4]) : 20261014;
      auto corpus = gen::random_corpus(seed, count);
      for (size_t i = 0; i < corpus.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "g%04zu.hflp", i);
        write(dir / name, "# generated, seed " + std::to_string(seed) + "\n", corpus[i]);
      }
      return 0;
    }
    if (mode == "examples") {
      write(dir / "lemma_b1.hflp", "# |- Z <= t, with the inner existential elaborated\n", elab::lemma_b1_proof());
      write(dir / "example_3_8.hflp", "# well-foundedness of a layered tree: Phi Z Z |- Psi Z Z\n", tree_example());
      PreProof rep = repeat_example();
      write(dir / "extended" / "example_3_9.hflpx", "# termination of repeat (sub 1) n, with quantifier rules\n",
            rep);
      write(dir / "example_3_9.hflp", "# termination of repeat (sub 1) n, elaborated to core rules\n",
            elab::elaborate(rep));
      return 0;
    }
    if (mode == "mutants") {
      fs::path m = dir / "mutants";
      PreProof ex34 = load_proof((dir / "example_3_4.hflp").string());
      PreProof lemma = load_proof((dir / "lemma_b1.hflp").string());

      PreProof a = ex34;
      a.back.erase(id(a, "n4"));
      write(m / "example_3_4_noback.hflp", "# back-edge of n4 removed\n", a);
      a = ex34;
      a.back[id(a, "n4")] = id(a, "n2");
      write(m / "example_3_4_retarget.hflp", "# n4 points at a node with a different sequent\n", a);
      write(m / "example_3_4_flip.hflp", "# every mu/nu swapped\n", flip_all(ex34));

      write(m / "example_3_8_phi_nu.hflp", "# Phi as a greatest fixpoint\n", tree_example(false, true));
      write(m / "example_3_8_ypsi_mu.hflp", "# the quantifier inside Psi as a least fixpoint\n",
            tree_example(true, false));
      PreProof t = tree_example();
      for (auto it = t.back.begin(); it != t.back.end(); ++it)
        if (t.nodes[it->second].label == "★") {
          t.back.erase(it);
          break;
        }
      write(m / "example_3_8_noback.hflp", "# the back-edge to the ★ companion removed\n", t);
      t = tree_example();
      for (auto& n : t.nodes)
        if (n.rule && n.rule->tag == Rule::Subst && n.rule->subst.count("l") &&
            n.rule->subst.at("l").is_term() && n.rule->subst.at("l").term->succ == 1)
          n.rule->subst["l"] = Arg::of(Term::variable("l"));
      write(m / "example_3_8_bad_subst.hflp", "# Subst that forgets the successor\n", t);

      PreProof l = lemma;
      for (auto& [leaf, target] : l.back)
        if (l.nodes[target].label == "†") target = id(l, "n1");
      write(m / "lemma_b1_retarget.hflp", "# the † loop closed against ★\n", l);
      write(m / "lemma_b1_flip.hflp", "# every mu/nu swapped; Nat no longer matches\n", flip_all(lemma));
      return 0;
    }
    return usage();
  } catch (const std::exception& e) {
    std::cerr << "gen_corpus: " << e.what() << "\n";
    return 1;
  }
}
