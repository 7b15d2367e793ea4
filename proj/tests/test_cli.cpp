#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hfl/cli.hpp"
#include "hfl/gtc.hpp"
#include "hfl/proof_io.hpp"

using namespace hfl;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run hfl_run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

std::string corpus(const std::string& name) { return std::string(HFL_CORPUS_DIR) + "/" + name; }

bool has_line(const std::string& out, const std::string& line) {
  std::istringstream in(out);
  for (std::string l; std::getline(in, l);)
    if (l == line) return true;
  return false;
}

std::string proof_part(const std::string& out) {
  auto p = out.find("proof:\n");
  REQUIRE(p != std::string::npos);
  return out.substr(p + 7);
}

}  // namespace

TEST_CASE("cli check: accepted example") {
  Run r = hfl_run({"check", corpus("example_3_4.hflp")});
  CHECK(r.code == cli::kAccepted);
  CHECK(has_line(r.out, "status: Accepted"));
  CHECK(has_line(r.out, "stage: gtc"));
}

TEST_CASE("cli check: mutant rejected with a lasso witness") {
  Run r = hfl_run({"check", corpus("mutants/example_3_4_mu.hflp"), "--trace-replay"});
  CHECK(r.code == cli::kRejected);
  CHECK(has_line(r.out, "status: Rejected"));
  CHECK(has_line(r.out, "stage: gtc"));
  CHECK(has_line(r.out, "witness: (n0 n1 n2 n3 n4)^ω"));
  CHECK(r.out.find("replay: tau0 n0 R0:") != std::string::npos);
}

TEST_CASE("cli check: structural mutant names its node") {
  Run r = hfl_run({"check", corpus("mutants/example_3_4_noback.hflp")});
  CHECK(r.code == cli::kRejected);
  CHECK(has_line(r.out, "stage: structure"));
  CHECK(r.out.find("issue: n4") != std::string::npos);
}

TEST_CASE("cli check: missing file and bad usage") {
  CHECK(hfl_run({"check", corpus("nonexistent.hflp")}).code == cli::kUsage);
  CHECK(hfl_run({}).code == cli::kUsage);
  CHECK(hfl_run({"frobnicate"}).code == cli::kUsage);
  CHECK(hfl_run({"check", corpus("example_3_4.hflp"), "--depth", "x"}).code == cli::kUsage);
}

TEST_CASE("cli check: parse and type errors carry their stage") {
  auto dir = std::filesystem::temp_directory_path();
  auto bad = (dir / "hfl_cli_bad.hflp").string();
  {
    std::ofstream o(bad);
    o << "(vars \"x:O\")\n(node a (seq \"x |- \") (rule Axiom)\n";
  }
  Run r = hfl_run({"check", bad});
  CHECK(r.code == cli::kRejected);
  CHECK(has_line(r.out, "stage: parse"));
  auto ill = (dir / "hfl_cli_ill.hflp").string();
  {
    std::ofstream o(ill);
    o << "(vars \"f:N->O\")\n(node a (seq \"f f |- f f\") (rule Axiom))\n";
  }
  Run t = hfl_run({"check", ill});
  CHECK(t.code == cli::kRejected);
  CHECK(has_line(t.out, "stage: types"));
  CHECK(t.out.find("detail: a: ") != std::string::npos);
}

TEST_CASE("cli check: reports are deterministic") {
  for (const char* f : {"example_3_8.hflp", "mutants/example_3_8_phi_nu.hflp", "park_example.hflpx"}) {
    Run a = hfl_run({"check", corpus(f), "--dump-automata"});
    Run b = hfl_run({"check", corpus(f), "--dump-automata"});
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
  }
}

TEST_CASE("cli check: oracle cross-check") {
  Run r = hfl_run({"check", corpus("lemma_b1.hflp"), "--oracle", "5"});
  CHECK(r.code == cli::kAccepted);
  CHECK(has_line(r.out, "stage: oracle"));
  CHECK(has_line(r.out, "oracle: Valid"));
}

TEST_CASE("cli check: extended files are elaborated first") {
  Run r = hfl_run({"check", corpus("park_example.hflpx")});
  CHECK(r.code == cli::kAccepted);
  CHECK(r.out.find("elaborated: ") != std::string::npos);
}

TEST_CASE("cli elaborate: the core file checks Accepted") {
  Run r = hfl_run({"elaborate", corpus("park_example.hflpx")});
  REQUIRE(r.code == cli::kAccepted);
  PreProof core = parse_proof(proof_part(r.out));
  CHECK_FALSE(uses_extended(core));
  CHECK(gtc::check_cyclic_proof(core).status == gtc::Status::Accepted);
  auto out = (std::filesystem::temp_directory_path() / "hfl_cli_park.hflp").string();
  Run w = hfl_run({"elaborate", corpus("park_example.hflpx"), "-o", out});
  CHECK(w.code == cli::kAccepted);
  Run c = hfl_run({"check", out});
  CHECK(c.code == cli::kAccepted);
}

TEST_CASE("cli search: nu loop") {
  Run r = hfl_run({"search", "|- nu x:O. x", "--depth", "5"});
  REQUIRE(r.code == cli::kAccepted);
  CHECK(has_line(r.out, "status: Accepted"));
  PreProof pp = parse_proof(proof_part(r.out));
  CHECK(gtc::check_cyclic_proof(pp).status == gtc::Status::Accepted);
}

TEST_CASE("cli search: out of budget and refused goals") {
  Run r = hfl_run({"search", "|- mu x:O. x", "--depth", "10"});
  CHECK(r.code == cli::kUnknown);
  CHECK(has_line(r.out, "outcome: OutOfBudget"));
  Run h = hfl_run({"search", "f:O->O | |- f (nu x:O. x)"});
  CHECK(h.code == cli::kRejected);
  CHECK(has_line(h.out, "stage: types"));
}

TEST_CASE("cli eval") {
  Run r = hfl_run({"eval", "|- leq Z (S Z)", "--K", "6"});
  CHECK(r.code == cli::kAccepted);
  CHECK(has_line(r.out, "verdict: Valid"));
  Run n = hfl_run({"eval", "a:O | |- a /\\ (nu x:O. x)", "--K", "6"});
  CHECK(n.code == cli::kRejected);
  CHECK(has_line(n.out, "verdict: Invalid"));
  CHECK(has_line(n.out, "counter_valuation: a = false"));
  // climbs past the cut-off, so the two readings disagree
  CHECK(hfl_run({"eval", "|- leq (S Z) Z", "--K", "6"}).code == cli::kUnknown);
  Run c = hfl_run({"eval", "a:O | a |- a /\\ a"});
  CHECK(c.code == cli::kAccepted);
}

TEST_CASE("cli dump") {
  Run r = hfl_run({"dump", corpus("example_3_4.hflp")});
  CHECK(r.code == cli::kAccepted);
  CHECK(has_line(r.out, "simple_lassos: 1"));
  CHECK(has_line(r.out, "lasso: (n0 n1 n2 n3 n4)^ω"));
  PreProof a = parse_proof(proof_part(r.out));
  CHECK(write_proof(a) == write_proof(load_proof(corpus("example_3_4.hflp"))));
}
