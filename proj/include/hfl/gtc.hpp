#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hfl/buchi.hpp"
#include "hfl/kernel.hpp"
#include "hfl/trace.hpp"

namespace hfl::gtc {

// Marked formula: Formula::ann is 1 on marked fixpoint operators, 0 elsewhere.
size_t mark_count(const FPtr& marked);
// copies of f with exactly one fixpoint operator marked, in pre-order
std::vector<FPtr> single_markings(const FPtr& f);

struct GtcState {
  bool star = true;
  size_t node = 0;  // next symbol this state reads
  Occ occ;
  FPtr marked;
};

struct GtcAutomaton {
  buchi::Automaton aut;          // symbols = node indices, state 0 = Star
  std::vector<GtcState> states;  // parallel to aut states
};

// symbol read on a transition = its source node; states mirror nodes; all transitions accepting
buchi::Automaton build_path_automaton(const PreProof& pp);
// throws buchi::SizeGuard beyond max_states
GtcAutomaton build_gtc_automaton(const PreProof& pp, size_t max_states = 100000);
// per occurrence 2^(fixpoints in its formula), plus Star; saturates
size_t state_bound(const PreProof& pp);

buchi::LassoWord lasso_word(const trace::Lasso& l);
trace::Lasso word_lasso(const buchi::LassoWord& w);

enum class Method { Ramsey, Rank };

struct Options {
  Method method = Method::Ramsey;
  size_t max_states = 100000;    // A_gtc and complement
  size_t max_profiles = 200000;  // Ramsey monoid
};

enum class GtcStatus { Holds, Fails, Unknown };

struct GtcResult {
  GtcStatus status = GtcStatus::Holds;
  std::optional<trace::Lasso> counterexample;  // a path with no good trace tail
  std::string detail;
  size_t gtc_states = 0;
};
// containment of paths in the gtc language. Requires a valid pre-proof.
GtcResult check_gtc(const PreProof& pp, const Options& o = {});

enum class Status { Accepted, Rejected, Unknown };
std::string status_str(Status s);

struct Verdict {
  Status status = Status::Accepted;
  std::string stage;  // "structure" or "gtc" on failure
  std::vector<Issue> issues;
  std::optional<trace::Lasso> witness;
  std::string detail;
};
Verdict check_cyclic_proof(const PreProof& pp, const Options& o = {}, bool allow_extended = false);

}  // namespace hfl::gtc
