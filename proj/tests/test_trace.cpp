#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hfl/proof_io.hpp"
#include "hfl/trace.hpp"

using namespace hfl;
using namespace hfl::trace;

namespace {

PreProof corpus(const std::string& name) { return load_proof(std::string(HFL_CORPUS_DIR) + "/" + name); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("labels trie") {
  Labels L;
  long a = L.extend(0), b = L.extend(a), c = L.extend(0);
  CHECK(L.str(0) == "ε");
  CHECK(L.str(b) == "0.1");
  CHECK(L.str(c) == "2");
  CHECK(L.prefix_eq(0, b));
  CHECK(L.prefix_eq(a, b));
  CHECK(L.prefix_eq(b, b));
  CHECK_FALSE(L.prefix_eq(b, a));
  CHECK_FALSE(L.prefix_eq(c, b));
  CHECK(L.length(b) == 2);
}

TEST_CASE("single-loop replay matches the frozen annotation trace") {
  PreProof pp = corpus("example_3_4.hflp");
  ProofGraph g(pp);
  std::vector<size_t> path;
  for (const char* id : {"n0", "n1", "n2", "n3", "n4", "n0", "n1"}) path.push_back(*pp.find(id));
  auto steps = replay(g, path, Occ{true, 0});
  CHECK(replay_text(pp, steps) == slurp(std::string(HFL_GOLDEN_DIR) + "/example_3_4_trace.txt"));
}

TEST_CASE("single-loop proof has a right nu-trace") {
  PreProof pp = corpus("example_3_4.hflp");
  ProofGraph g(pp);
  auto ls = simple_lassos(g);
  REQUIRE(ls.size() == 1);
  CHECK(lasso_str(pp, ls[0]) == "(n0 n1 n2 n3 n4)^ω");
  CHECK(is_walk(g, ls[0]));
  TraceClass tc = classify_lasso_trace(g, ls[0], 0, Occ{true, 0});
  CHECK(tc.kind == TraceKind::Nu);
  CHECK(tc.right);
  CHECK_FALSE(tc.both);
  CHECK(tc.good());
  // starting mid-cycle gives the same class
  CHECK(classify_lasso_trace(g, ls[0], 3, Occ{true, 0}).kind == TraceKind::Nu);
  auto r = gtc_bruteforce(pp);
  CHECK(r.ok);
  CHECK(r.violations == 0);
}

TEST_CASE("flipping the outer operator leaves only a right mu-trace") {
  PreProof pp = corpus("mutants/example_3_4_mu.hflp");
  ProofGraph g(pp);
  auto ls = simple_lassos(g);
  REQUIRE(ls.size() == 1);
  TraceClass tc = classify_lasso_trace(g, ls[0], 0, Occ{true, 0});
  CHECK(tc.kind == TraceKind::Mu);
  CHECK_FALSE(tc.good());
  auto r = gtc_bruteforce(pp);
  CHECK_FALSE(r.ok);
  REQUIRE(r.counterexample);
  CHECK_FALSE(analyze_lasso(g, *r.counterexample).good);
}

TEST_CASE("no infinite path, vacuous condition") {
  PreProof pp = parse_proof(R"((vars "")
(node a (seq "nu x:O. x |- nu x:O. x") (rule Axiom))
)");
  ProofGraph g(pp);
  CHECK(simple_lassos(g).empty());
  CHECK(gtc_bruteforce(pp).ok);
}

TEST_CASE("a cycle without unfolding has no growing trace") {
  // |- x \/ x with an OrR-free loop through Ctr/Wk
  PreProof pp = parse_proof(R"((vars "x:O")
(node a (seq "|- x") (rule CtrR) (children b))
(node b (seq "|- x, x") (rule WkR) (children c))
(node c (seq "|- x") (open))
(back c a)
)");
  REQUIRE(validate_preproof(pp).empty());
  ProofGraph g(pp);
  auto ls = simple_lassos(g);
  REQUIRE(ls.size() == 1);
  auto v = analyze_lasso(g, ls[0]);
  CHECK_FALSE(v.good);
  for (const auto& tc : v.traces) CHECK(tc.kind == TraceKind::None);
}
