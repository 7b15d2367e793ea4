// One line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "hfl/buchi.hpp"
#include "hfl/elaborate.hpp"
#include "hfl/encodings.hpp"
#include "hfl/gtc.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"
#include "hfl/search.hpp"
#include "hfl/semantics.hpp"
#include "hfl/trace.hpp"
#include "lasso_oracle.hpp"

using namespace hfl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string corpus(const std::string& rel) { return std::string(HFL_CORPUS_DIR) + "/" + rel; }

std::vector<std::string> files(const std::string& dir, const std::string& ext, bool recursive = false) {
  std::vector<std::string> out;
  if (recursive) {
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.path().extension() == ext) out.push_back(e.path().string());
  } else {
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ext) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fixed(double x, int digits = 2) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << x;
  return o.str();
}

// uniqueness violations seen by any trace classification in criteria 2 and 3
size_t g_traces = 0, g_violations = 0;

void count(const trace::LassoVerdict& v) {
  g_traces += v.traces.size();
  g_violations += v.violations;
  for (const auto& t : v.traces)
    if (t.both) ++g_violations;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// ------------------------------------------------------------------------- 1

Outcome golden() {
  double worst = 0;
  std::string bad;
  for (const char* f : {"example_3_4.hflp", "example_3_8.hflp", "example_3_9.hflp", "lemma_b1.hflp"}) {
    auto t = Clock::now();
    PreProof pp = load_proof(corpus(f));
    auto v = gtc::check_cyclic_proof(pp);
    double s = since(t);
    worst = std::max(worst, s);
    if (v.status != gtc::Status::Accepted) bad += std::string(" ") + f + "=" + gtc::status_str(v.status);
    if (s >= 5.0) bad += std::string(" ") + f + " took " + fixed(s) + "s";
  }
  return {bad.empty(), "4 proofs, slowest " + fixed(worst, 3) + " s" + (bad.empty() ? "" : ";" + bad)};
}

// ------------------------------------------------------------------------- 2

Outcome mutants() {
  size_t rejected = 0, total = 0, gtc_count = 0;
  std::string bad;
  for (const auto& f : files(corpus("mutants"), ".hflp")) {
    ++total;
    std::string name = fs::path(f).filename().string();
    PreProof pp = load_proof(f);
    auto v = gtc::check_cyclic_proof(pp);
    if (v.status != gtc::Status::Rejected) {
      bad += " " + name + " not rejected";
      continue;
    }
    if (v.stage == "structure") {
      bool located = !v.issues.empty() && pp.find(v.issues[0].node).has_value();
      if (!located) bad += " " + name + " has no node";
      else ++rejected;
      continue;
    }
    if (!v.witness) {
      bad += " " + name + " has no witness";
      continue;
    }
    ProofGraph g(pp);
    if (!trace::is_walk(g, *v.witness)) {
      bad += " " + name + " witness is not a path";
      continue;
    }
    // no occurrence at the cycle start begins a good trace
    bool confirmed = true;
    const Sequent& s = pp.nodes[v.witness->cycle[0]].seq;
    for (bool right : {false, true})
      for (size_t i = 0; i < (right ? s.right.size() : s.left.size()); ++i) {
        auto tc = trace::classify_lasso_trace(g, *v.witness, 0, Occ{right, i});
        ++g_traces;
        if (tc.both) ++g_violations;
        if (tc.good()) confirmed = false;
      }
    count(trace::analyze_lasso(g, *v.witness));
    if (!confirmed) {
      bad += " " + name + " witness has a good trace";
      continue;
    }
    ++gtc_count;
    ++rejected;
  }
  bool pass = rejected == total && total >= 10;
  return {pass, std::to_string(rejected) + "/" + std::to_string(total) + " rejected (" + std::to_string(gtc_count) +
                    " with confirmed lasso witnesses)" + bad};
}

// ------------------------------------------------------------------------- 3

Outcome bridge() {
  auto t = Clock::now();
  size_t proofs = 0, lassos = 0, agree = 0, verdicts = 0;
  std::string bad;
  for (const auto& f : files(corpus("generated"), ".hflp")) {
    PreProof pp = load_proof(f);
    if (pp.nodes.size() > 12) continue;
    ++proofs;
    ProofGraph g(pp);
    auto a = gtc::build_gtc_automaton(pp);
    for (const auto& l : trace::simple_lassos(g)) {
      ++lassos;
      auto v = trace::analyze_lasso(g, l);
      count(v);
      if (buchi::accepts_lasso(a.aut, gtc::lasso_word(l)) == v.good) ++agree;
      else if (bad.size() < 200) bad += " " + fs::path(f).filename().string() + ":" + trace::lasso_str(pp, l);
    }
    // whole-proof verdicts too
    bool holds = gtc::check_gtc(pp).status == gtc::GtcStatus::Holds;
    bool brute = trace::gtc_bruteforce(pp).ok;
    if (holds == brute) ++verdicts;
    else if (bad.size() < 200) bad += " verdict:" + fs::path(f).filename().string();
  }
  double s = since(t);
  bool pass = proofs >= 200 && agree == lassos && verdicts == proofs && s < 300;
  return {pass, std::to_string(proofs) + " pre-proofs, " + std::to_string(agree) + "/" + std::to_string(lassos) +
                    " lassos agree, " + std::to_string(verdicts) + " proof verdicts agree, " + fixed(s) + " s" + bad};
}

// ------------------------------------------------------------------------- 4

Outcome buchi_oracle() {
  auto t = Clock::now();
  std::mt19937 rng(20261014);
  size_t automata = 0, disagreements = 0, checks = 0, skipped = 0;
  std::map<size_t, std::pair<std::vector<std::vector<buchi::Symbol>>, std::vector<std::vector<buchi::Symbol>>>> words;
  for (size_t alpha = 1; alpha <= 3; ++alpha)
    words[alpha] = {oracle::words_upto(alpha, 6, false), oracle::words_upto(alpha, 6, true)};
  // member(a, v, u) for a verdict table
  for (int k = 0; k < 1000; ++k) {
    size_t alpha = 1 + rng() % 3;
    auto a = oracle::random_automaton(rng, 4, alpha);
    auto b = oracle::random_automaton(rng, 4, alpha);
    ++automata;
    const auto& [us, vs] = words[alpha];
    auto va = oracle::all_verdicts(a, us, vs), vb = oracle::all_verdicts(b, us, vs);
    buchi::Automaton ca;
    try {
      ca = buchi::complement(a);
    } catch (const buchi::SizeGuard&) {
      ++skipped;
      continue;
    }
    auto vc = oracle::all_verdicts(ca, us, vs);
    auto vi = oracle::all_verdicts(buchi::intersect(a, b), us, vs);
    bool lasso_in_diff = false;
    for (size_t j = 0; j < vs.size(); ++j)
      for (size_t i = 0; i < us.size(); ++i) {
        checks += 2;
        if (vc[j][i] == va[j][i]) ++disagreements;
        if ((bool)vi[j][i] != (va[j][i] && vb[j][i])) ++disagreements;
        if (va[j][i] && !vb[j][i]) lasso_in_diff = true;
      }
    for (bool ramsey : {false, true}) {
      auto c = ramsey ? buchi::contains_ramsey(a, b) : buchi::contains(a, b);
      ++checks;
      if (c.holds) {
        if (lasso_in_diff) ++disagreements;
      } else {
        // the counterexample must be a genuine lasso of a outside b
        if (!c.counterexample || !buchi::accepts_lasso(a, *c.counterexample) ||
            buchi::accepts_lasso(b, *c.counterexample) || oracle::good_for_cycle(a, c.counterexample->v).empty())
          ++disagreements;
        // and the bounded oracle must agree whenever the counterexample is within bounds
        else if (c.counterexample->u.size() <= 6 && c.counterexample->v.size() <= 6 && !lasso_in_diff)
          ++disagreements;
      }
    }
  }
  double s = since(t);
  bool pass = disagreements == 0 && skipped == 0 && automata >= 1000;
  return {pass, std::to_string(automata) + " automaton pairs, " + std::to_string(checks) + " comparisons, " +
                    std::to_string(disagreements) + " disagreements" +
                    (skipped ? ", " + std::to_string(skipped) + " complements over the size guard" : "") + ", " +
                    fixed(s) + " s"};
}

// ------------------------------------------------------------------------- 5

Outcome soundness() {
  struct Entry {
    std::string name;
    PreProof pp;
  };
  std::vector<Entry> all;
  for (const auto& f : files(HFL_CORPUS_DIR, ".hflp", true)) all.push_back({f, load_proof(f)});
  for (const auto& f : files(HFL_CORPUS_DIR, ".hflpx", true)) all.push_back({f, elab::elaborate(load_proof(f))});
  sem::Config c;
  c.K = 8;
  sem::Oracle o(c);
  size_t accepted = 0, evaluated = 0, valid = 0, invalid = 0;
  std::string bad;
  std::vector<std::pair<TypeEnv, Sequent>> refuted, proved;
  for (auto& e : all) {
    bool acc = gtc::check_cyclic_proof(e.pp).status == gtc::Status::Accepted;
    const Sequent& root = e.pp.nodes[e.pp.root].seq;
    sem::Oracle::Validity v;
    try {
      v = o.check_validity(e.pp.env, root);
    } catch (const std::exception&) {
      continue;
    }
    if (v.verdict == sem::Oracle::Validity::Verdict::Invalid) refuted.push_back({e.pp.env, root});
    if (!acc) continue;
    ++accepted;
    proved.push_back({e.pp.env, root});
    if (v.verdict == sem::Oracle::Validity::Verdict::Unknown) continue;
    ++evaluated;
    if (v.verdict == sem::Oracle::Validity::Verdict::Valid) ++valid;
    else {
      ++invalid;
      bad += " " + fs::path(e.name).filename().string();
    }
  }
  size_t clashes = 0;
  for (const auto& r : refuted)
    for (const auto& p : proved)
      if (seq_alpha_eq(r.second, p.second)) ++clashes;
  bool pass = invalid == 0 && clashes == 0 && evaluated > 0;
  return {pass, std::to_string(accepted) + " accepted proofs, " + std::to_string(evaluated) + " bounded-evaluable: " +
                    std::to_string(valid) + " Valid, " + std::to_string(invalid) + " Invalid; " +
                    std::to_string(refuted.size()) + " refuted roots, " + std::to_string(clashes) +
                    " with an accepted proof" + bad};
}

// ------------------------------------------------------------------------- 6

Outcome elaboration() {
  std::vector<std::string> fs_ = files(corpus("extended"), ".hflpx");
  fs_.push_back(corpus("park_example.hflpx"));
  size_t ok = 0;
  double worst = 0;
  std::string bad;
  for (const auto& f : fs_) {
    auto t = Clock::now();
    PreProof pp = load_proof(f);
    PreProof core = elab::elaborate(pp);
    // round trip through the printed file
    PreProof back = parse_proof(write_proof(core));
    auto v = gtc::check_cyclic_proof(back);
    double s = since(t);
    worst = std::max(worst, s);
    std::string name = fs::path(f).filename().string();
    if (uses_extended(back)) bad += " " + name + " still extended";
    else if (!seq_alpha_eq(back.nodes[back.root].seq, pp.nodes[pp.root].seq)) bad += " " + name + " root changed";
    else if (v.status != gtc::Status::Accepted) bad += " " + name + " " + gtc::status_str(v.status);
    else if (s >= 10.0) bad += " " + name + " took " + fixed(s) + " s";
    else ++ok;
  }
  return {ok == fs_.size() && !fs_.empty(), std::to_string(ok) + "/" + std::to_string(fs_.size()) +
                                              " extended files elaborate to accepted core proofs, slowest " +
                                              fixed(worst, 3) + " s" + bad};
}

// ------------------------------------------------------------------------- 7

Outcome uniqueness() {
  return {g_violations == 0 && g_traces > 0,
          std::to_string(g_traces) + " traces classified, " + std::to_string(g_violations) + " both mu and nu"};
}

// ------------------------------------------------------------------------- 8

Outcome approximants() {
  sem::Config c;
  c.K = 8;
  sem::Oracle o(c);
  std::string got;
  bool pass = true;
  for (unsigned m = 0; m <= 5; ++m) {
    FPtr nm = enc::nat(Term::numeral(m));
    Spine sp = spine(nm);
    long least = -1;
    for (long a = 0; a <= 10 && least < 0; ++a)
      if (o.eval_approx(apply_args(with_ann(sp.head, a + 1), sp.args)) == sem::Truth::True) least = a;
    got += (m ? "," : "") + std::to_string(least);
    pass &= least == long(m) + 1;
  }
  return {pass, "least alpha for m=0..5: " + got};
}

// ------------------------------------------------------------------------- 9

Outcome search_sanity() {
  static const Defs defs = enc::standard_defs();
  ParseContext ctx;
  ctx.defs = &defs;
  auto nu = parse_sequent("|- nu x:O. x", ctx), mu = parse_sequent("|- mu x:O. x", ctx);
  search::Options o;
  o.depth = 5;
  auto r = search::build(nu.env, nu.seq, o);
  auto* a = std::get_if<search::Accepted>(&r);
  bool nu_ok = a && gtc::check_cyclic_proof(parse_proof(write_proof(a->proof))).status == gtc::Status::Accepted;
  size_t mu_accepted = 0;
  for (unsigned d = 0; d <= 50; ++d) {
    o.depth = d;
    if (std::holds_alternative<search::Accepted>(search::build(mu.env, mu.seq, o))) ++mu_accepted;
  }
  return {nu_ok && mu_accepted == 0, std::string("nu loop ") + (nu_ok ? "accepted" : "not accepted") +
                                         " within depth 5 (rounds " + (a ? std::to_string(a->rounds) : "-") +
                                         "); mu loop accepted at " + std::to_string(mu_accepted) + " of depths 0..50"};
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> cs = {
      {1, golden}, {2, mutants}, {3, bridge}, {4, buchi_oracle}, {5, soundness},
      {6, elaboration}, {7, uniqueness}, {8, approximants}, {9, search_sanity},
  };
  bool all = true;
  for (auto& [n, f] : cs) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  }
  return all ? 0 : 1;
}
