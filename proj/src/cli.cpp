#include "hfl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "hfl/elaborate.hpp"
#include "hfl/encodings.hpp"
#include "hfl/gtc.hpp"
#include "hfl/parser.hpp"
#include "hfl/proof_io.hpp"
#include "hfl/search.hpp"
#include "hfl/semantics.hpp"
#include "hfl/trace.hpp"

namespace hfl::cli {

namespace {

struct Flags {
  std::string path, goal, out_path;
  long oracle = -1;
  unsigned K = 8;
  unsigned depth = 10;
  uint64_t seed = 0;
  size_t max_states = 100000;
  bool dump_automata = false, trace_replay = false;
};

struct Report {
  std::ostream& out;
  void kv(const std::string& k, const std::string& v) {
    // values stay on one line
    std::string s = v;
    std::replace(s.begin(), s.end(), '\n', ' ');
    out << k << ": " << s << "\n";
  }
  void block(const std::string& k, const std::string& text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out << k << ": " << line << "\n";
  }
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot read " + path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw IoError("cannot write " + path);
  o << text;
}

gtc::Options gtc_options(const Flags& f) {
  gtc::Options o;
  o.max_states = f.max_states;
  return o;
}

int exit_of(gtc::Status s) {
  switch (s) {
    case gtc::Status::Accepted: return kAccepted;
    case gtc::Status::Rejected: return kRejected;
    default: return kUnknown;
  }
}

ParsedSequent parse_goal(const std::string& text) {
  static const Defs defs = enc::standard_defs();
  ParseContext ctx;
  ctx.defs = &defs;
  return parse_sequent(text, ctx);
}

void print_replay(Report& r, const PreProof& pp, const trace::Lasso& l) {
  ProofGraph g(pp);
  auto v = trace::analyze_lasso(g, l);
  const trace::TraceClass* tc = v.witness ? &*v.witness : (v.traces.empty() ? nullptr : &v.traces[0]);
  std::vector<size_t> path = l.prefix;
  for (int k = 0; k < 2; ++k) path.insert(path.end(), l.cycle.begin(), l.cycle.end());
  path.push_back(l.cycle[0]);
  if (!tc || tc->walk.empty()) {
    r.kv("replay", "no trace on this lasso");
    return;
  }
  // replay the chosen trace over two periods of the cycle
  std::vector<size_t> cyc_path(path.begin() + (long)l.prefix.size(), path.end());
  std::vector<Occ> choices;
  for (size_t i = 0; i < cyc_path.size(); ++i) choices.push_back(tc->walk[i % tc->walk.size()]);
  auto steps = trace::replay(g, cyc_path, tc->walk[0], &choices);
  r.kv("replay_lasso", trace::lasso_str(pp, l));
  r.block("replay", trace::replay_text(pp, steps));
}

void print_automata(Report& r, const PreProof& pp, const Flags& f) {
  r.block("path_automaton", buchi::dump(gtc::build_path_automaton(pp)));
  try {
    auto a = gtc::build_gtc_automaton(pp, f.max_states);
    r.block("gtc_automaton", buchi::dump(a.aut));
  } catch (const std::exception& e) {
    r.kv("gtc_automaton", std::string("not built: ") + e.what());
  }
}

int cmd_check(const Flags& f, Report& r) {
  r.kv("command", "check");
  r.kv("file", f.path);
  std::string text = slurp(f.path);
  PreProof pp;
  try {
    pp = parse_proof(text);
  } catch (const TypeError& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "types");
    r.kv("detail", e.what());
    return kRejected;
  } catch (const std::exception& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "parse");
    r.kv("detail", e.what());
    return kRejected;
  }
  r.kv("root", to_string(pp.nodes[pp.root].seq, &pp.defs));
  for (const auto& n : pp.nodes) {
    try {
      check_sequent(pp.env, n.seq);
    } catch (const TypeError& e) {
      r.kv("status", "Rejected");
      r.kv("stage", "types");
      r.kv("detail", n.id + ": " + e.what());
      return kRejected;
    }
  }
  if (uses_extended(pp)) {
    try {
      PreProof core = elab::elaborate(pp);
      r.kv("elaborated", std::to_string(pp.nodes.size()) + " -> " + std::to_string(core.nodes.size()) + " nodes");
      pp = std::move(core);
    } catch (const elab::ElaborationError& e) {
      r.kv("status", "Rejected");
      r.kv("stage", "structure");
      r.kv("detail", e.what());
      return kRejected;
    }
  }
  r.kv("nodes", std::to_string(pp.nodes.size()));
  r.kv("back_edges", std::to_string(pp.back.size()));
  gtc::Verdict v = gtc::check_cyclic_proof(pp, gtc_options(f));
  std::string stage = v.status == gtc::Status::Accepted ? "gtc" : v.stage;
  int code = exit_of(v.status);
  std::optional<sem::Oracle::Validity> val;
  sem::Config oc;
  if (f.oracle >= 0) oc.K = (unsigned)f.oracle;
  sem::Oracle oracle(oc);
  if (f.oracle >= 0 && v.status == gtc::Status::Accepted) {
    val = oracle.check_validity(pp.env, pp.nodes[pp.root].seq);
    stage = "oracle";
    // an accepted proof of an invalid sequent means something upstream is broken
    if (val->verdict == sem::Oracle::Validity::Verdict::Invalid) code = kRejected;
  }
  r.kv("status", code == kAccepted ? "Accepted" : code == kRejected ? "Rejected" : "Unknown");
  r.kv("stage", stage);
  if (!v.detail.empty()) r.kv("detail", v.detail);
  for (const auto& i : v.issues) r.kv("issue", i.node + ": " + i.message);
  if (v.witness) r.kv("witness", trace::lasso_str(pp, *v.witness));
  if (val) {
    r.kv("oracle_K", std::to_string(f.oracle));
    r.kv("oracle", sem::verdict_str(val->verdict));
    if (!val->reason.empty()) r.kv("oracle_reason", val->reason);
    for (const auto& [x, w] : val->witness)
      r.kv("counter_valuation", x + " = " + sem::value_str(w, pp.env.at(x), oracle.domains()));
  }
  bool valid = v.issues.empty();
  if (valid && f.dump_automata) print_automata(r, pp, f);
  if (valid && f.trace_replay) {
    if (v.witness) {
      print_replay(r, pp, *v.witness);
    } else {
      ProofGraph g(pp);
      auto ls = trace::simple_lassos(g, 1);
      if (ls.empty()) r.kv("replay", "no infinite path");
      else print_replay(r, pp, ls[0]);
    }
  }
  return code;
}

int cmd_elaborate(const Flags& f, Report& r) {
  r.kv("command", "elaborate");
  r.kv("file", f.path);
  PreProof pp = parse_proof(slurp(f.path));
  PreProof core;
  try {
    core = elab::elaborate(pp);
  } catch (const elab::ElaborationError& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "structure");
    r.kv("detail", e.what());
    return kRejected;
  }
  gtc::Verdict v = gtc::check_cyclic_proof(core, gtc_options(f));
  r.kv("nodes", std::to_string(pp.nodes.size()) + " -> " + std::to_string(core.nodes.size()));
  r.kv("root", to_string(core.nodes[core.root].seq, &core.defs));
  r.kv("status", gtc::status_str(v.status));
  r.kv("stage", v.status == gtc::Status::Accepted ? "gtc" : v.stage);
  if (!v.detail.empty()) r.kv("detail", v.detail);
  std::string text = write_proof(core);
  if (!f.out_path.empty()) {
    write_file(f.out_path, text);
    r.kv("output", f.out_path);
  } else {
    r.out << "proof:\n" << text;
  }
  return exit_of(v.status);
}

int cmd_search(const Flags& f, Report& r) {
  r.kv("command", "search");
  ParsedSequent g;
  try {
    g = parse_goal(f.goal);
  } catch (const TypeError& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "types");
    r.kv("detail", e.what());
    return kRejected;
  } catch (const SyntaxError& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "parse");
    r.kv("detail", e.what());
    return kRejected;
  }
  r.kv("goal", to_string(g.seq));
  search::Options o;
  o.depth = f.depth;
  o.seed = f.seed;
  o.gtc = gtc_options(f);
  r.kv("depth", std::to_string(f.depth));
  r.kv("seed", std::to_string(f.seed));
  search::Result res;
  try {
    res = search::build(g.env, g.seq, o);
  } catch (const search::PreconditionError& e) {
    r.kv("status", "Rejected");
    r.kv("stage", "types");
    r.kv("detail", e.what());
    return kRejected;
  }
  if (auto* a = std::get_if<search::Accepted>(&res)) {
    // re-check the printed artifact, not the in-memory one
    std::string text = write_proof(a->proof);
    gtc::Verdict v = gtc::check_cyclic_proof(parse_proof(text), gtc_options(f));
    r.kv("status", gtc::status_str(v.status));
    r.kv("stage", v.status == gtc::Status::Accepted ? "gtc" : v.stage);
    r.kv("rounds", std::to_string(a->rounds));
    r.kv("nodes", std::to_string(a->proof.nodes.size()));
    r.kv("back_edges", std::to_string(a->proof.back.size()));
    if (!f.out_path.empty()) {
      write_file(f.out_path, text);
      r.kv("output", f.out_path);
    } else {
      r.out << "proof:\n" << text;
    }
    return exit_of(v.status);
  }
  auto& b = std::get<search::OutOfBudget>(res);
  r.kv("status", "Unknown");
  r.kv("outcome", "OutOfBudget");
  r.kv("detail", b.reason);
  r.kv("rounds", std::to_string(b.rounds));
  r.kv("nodes", std::to_string(b.partial.nodes.size()));
  r.kv("frontier", std::to_string(b.frontier.size()));
  r.kv("candidates_checked", std::to_string(b.checks));
  r.kv("back_edges_rejected", std::to_string(b.rejected));
  if (b.last && b.last->lasso) {
    r.kv("last_rejected_stage", b.last->stage);
    r.kv("last_rejected_witness", trace::lasso_str(b.last->candidate, *b.last->lasso));
  }
  return kUnknown;
}

int cmd_eval(const Flags& f, Report& r) {
  r.kv("command", "eval");
  ParsedSequent g = parse_goal(f.goal);
  r.kv("sequent", to_string(g.seq));
  r.kv("K", std::to_string(f.K));
  sem::Config c;
  c.K = f.K;
  sem::Oracle o(c);
  auto v = o.check_validity(g.env, g.seq);
  r.kv("verdict", sem::verdict_str(v.verdict));
  if (!v.reason.empty()) r.kv("reason", v.reason);
  for (const auto& [x, val] : v.witness) r.kv("counter_valuation", x + " = " + sem::value_str(val, g.env.at(x), o.domains()));
  switch (v.verdict) {
    case sem::Oracle::Validity::Verdict::Valid: return kAccepted;
    case sem::Oracle::Validity::Verdict::Invalid: return kRejected;
    default: return kUnknown;
  }
}

int cmd_dump(const Flags& f, Report& r) {
  r.kv("command", "dump");
  r.kv("file", f.path);
  PreProof pp = parse_proof(slurp(f.path));
  r.kv("nodes", std::to_string(pp.nodes.size()));
  r.kv("back_edges", std::to_string(pp.back.size()));
  r.kv("extended", uses_extended(pp) ? "yes" : "no");
  auto issues = validate_preproof(pp, true);
  r.kv("valid_preproof", issues.empty() ? "yes" : "no");
  for (const auto& i : issues) r.kv("issue", i.node + ": " + i.message);
  if (issues.empty() && !uses_extended(pp)) {
    ProofGraph g(pp);
    auto ls = trace::simple_lassos(g);
    r.kv("simple_lassos", std::to_string(ls.size()));
    for (const auto& l : ls) r.kv("lasso", trace::lasso_str(pp, l));
    if (f.dump_automata) print_automata(r, pp, f);
  }
  r.out << "proof:\n" << write_proof(pp);
  return kAccepted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cyclic proofs for higher-order fixpoint logic", "hfl"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* c) {
    c->add_option("--max-states", f.max_states, "state cap for the trace automata");
  };
  auto* check = app.add_subcommand("check", "check a proof file");
  check->add_option("file", f.path)->required();
  check->add_option("--oracle", f.oracle, "also evaluate the root sequent with naturals cut at K");
  check->add_flag("--dump-automata", f.dump_automata);
  check->add_flag("--trace-replay", f.trace_replay);
  common(check);
  auto* elab = app.add_subcommand("elaborate", "replace extended rules by core derivations");
  elab->add_option("file", f.path)->required();
  elab->add_option("-o,--out", f.out_path);
  common(elab);
  auto* srch = app.add_subcommand("search", "bounded proof search");
  srch->add_option("goal", f.goal)->required();
  srch->add_option("--depth", f.depth);
  srch->add_option("--seed", f.seed);
  srch->add_option("-o,--out", f.out_path);
  common(srch);
  auto* ev = app.add_subcommand("eval", "evaluate a sequent over truncated naturals");
  ev->add_option("sequent", f.goal)->required();
  ev->add_option("--K", f.K);
  auto* dump = app.add_subcommand("dump", "print a proof file and its lassos");
  dump->add_option("file", f.path)->required();
  dump->add_flag("--dump-automata", f.dump_automata);
  common(dump);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kAccepted;
  } catch (const CLI::ParseError& e) {
    err << "hfl: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  Report r{out};
  try {
    if (check->parsed()) return cmd_check(f, r);
    if (elab->parsed()) return cmd_elaborate(f, r);
    if (srch->parsed()) return cmd_search(f, r);
    if (ev->parsed()) return cmd_eval(f, r);
    return cmd_dump(f, r);
  } catch (const IoError& e) {
    err << "hfl: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    // parse errors in elaborate/eval/dump inputs
    r.kv("status", "Rejected");
    r.kv("stage", dynamic_cast<const TypeError*>(&e) ? "types" : "parse");
    r.kv("detail", e.what());
    return kRejected;
  }
}

}  // namespace hfl::cli
