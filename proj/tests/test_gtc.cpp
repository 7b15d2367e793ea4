#include "doctest.h"
#include "hfl/encodings.hpp"
#include "hfl/gtc.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"

using namespace hfl;
using namespace hfl::gtc;

namespace {

PreProof corpus(const std::string& name) { return load_proof(std::string(HFL_CORPUS_DIR) + "/" + name); }

// accepts_lasso(A_gtc) against the brute-force classification, on every simple lasso
void bridge(const PreProof& pp) {
  ProofGraph g(pp);
  GtcAutomaton a = build_gtc_automaton(pp);
  CHECK(a.aut.states <= state_bound(pp));
  for (const auto& l : trace::simple_lassos(g)) {
    INFO(trace::lasso_str(pp, l));
    CHECK(buchi::accepts_lasso(a.aut, lasso_word(l)) == trace::analyze_lasso(g, l).good);
  }
}

}  // namespace

TEST_CASE("single markings") {
  Defs d = enc::standard_defs();
  ParseContext ctx;
  ctx.defs = &d;
  FPtr f = parse_formula("(nu f:O->O. \\g:O. g) (mu x:O. x)", ctx);
  auto ms = single_markings(f);
  REQUIRE(ms.size() == 2);
  for (const auto& m : ms) CHECK(mark_count(m) == 1);
  CHECK(alpha_eq(strip(ms[0]), f));
  CHECK(spine(ms[0]).head->ann == 1);
  CHECK(spine(ms[1]).head->ann == 0);
}

TEST_CASE("path automaton accepts exactly the walks") {
  PreProof pp = corpus("example_3_4.hflp");
  auto a = build_path_automaton(pp);
  CHECK(a.states == 5);
  CHECK(a.trans.size() == 5);
  size_t n0 = *pp.find("n0"), n1 = *pp.find("n1");
  trace::Lasso good{{}, {}};
  for (const char* id : {"n0", "n1", "n2", "n3", "n4"}) good.cycle.push_back(*pp.find(id));
  CHECK(buchi::accepts_lasso(a, lasso_word(good)));
  CHECK_FALSE(buchi::accepts_lasso(a, {{}, {n0, n1}}));
  CHECK_FALSE(buchi::accepts_lasso(a, {{n1}, good.cycle}));
}

TEST_CASE("acyclic pre-proof: empty path language, holds vacuously") {
  PreProof pp = parse_proof(R"((vars "x:O")
(node a (seq "x |- x") (rule Axiom))
)");
  CHECK(buchi::is_empty(build_path_automaton(pp)).empty);
  CHECK(check_gtc(pp).status == GtcStatus::Holds);
}

TEST_CASE("single-loop proof accepted, flipped operator rejected with a witness") {
  PreProof pp = corpus("example_3_4.hflp");
  CHECK(check_gtc(pp).status == GtcStatus::Holds);
  CHECK(check_gtc(pp, {Method::Rank}).status == GtcStatus::Holds);
  bridge(pp);
  auto v = check_cyclic_proof(pp);
  CHECK(v.status == Status::Accepted);

  PreProof mu = corpus("mutants/example_3_4_mu.hflp");
  auto r = check_gtc(mu);
  REQUIRE(r.status == GtcStatus::Fails);
  REQUIRE(r.counterexample);
  ProofGraph g(mu);
  CHECK(trace::is_walk(g, *r.counterexample));
  CHECK_FALSE(trace::analyze_lasso(g, *r.counterexample).good);
  CHECK(check_gtc(mu, {Method::Rank}).status == GtcStatus::Fails);
  bridge(mu);
  auto w = check_cyclic_proof(mu);
  CHECK(w.status == Status::Rejected);
  CHECK(w.stage == "gtc");
}

TEST_CASE("cycle without unfolding is rejected") {
  PreProof pp = parse_proof(R"((vars "x:O")
(node a (seq "|- x") (rule CtrR) (children b))
(node b (seq "|- x, x") (rule WkR) (children c))
(node c (seq "|- x") (open))
(back c a)
)");
  auto v = check_cyclic_proof(pp);
  CHECK(v.status == Status::Rejected);
  CHECK(v.stage == "gtc");
  REQUIRE(v.witness);
}

TEST_CASE("structural problems stop before the trace check") {
  PreProof pp = corpus("example_3_4.hflp");
  pp.back.clear();
  auto v = check_cyclic_proof(pp);
  CHECK(v.status == Status::Rejected);
  CHECK(v.stage == "structure");
  CHECK(v.detail.find("n4") != std::string::npos);
}

TEST_CASE("state cap yields Unknown") {
  PreProof pp = corpus("example_3_4.hflp");
  Options o;
  o.max_states = 3;
  auto r = check_gtc(pp, o);
  CHECK(r.status == GtcStatus::Unknown);
  CHECK(check_cyclic_proof(pp, o).status == Status::Unknown);
}
