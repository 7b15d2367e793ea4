#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfl/kernel.hpp"

namespace hfl::trace {

// Number sequences stored as a trie; Formula::ann holds a node id, 0 = the empty sequence.
class Labels {
 public:
  Labels();
  // p.k for a fresh k drawn from the monotone counter
  long extend(long p);
  bool prefix_eq(long a, long b) const;  // a is a prefix of b (or equal)
  size_t length(long a) const;
  std::string str(long a) const;  // "ε" or "0.2.4"
  long next_number() const { return next_; }

 private:
  std::vector<long> parent_, number_;
  std::vector<size_t> depth_;
  long next_ = 0;
};

struct ExplosionGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One annotation step along a graph edge: `annotated` sits at occurrence `from` of node
// `node`, the result sits at occurrence `to` of the edge's target.
FPtr annotate_step(const ProofGraph& g, size_t node, const Edge& e, const FPtr& annotated, const Occ& to,
                   Labels& labels);

struct Lasso {
  std::vector<size_t> prefix, cycle;  // node indices; cycle is nonempty and closes
};
std::string lasso_str(const PreProof& pp, const Lasso& l);  // "a b (c d)^ω"
// the lasso is a walk from the root
bool is_walk(const ProofGraph& g, const Lasso& l);

enum class TraceKind { None, Mu, Nu };

struct TraceClass {
  TraceKind kind = TraceKind::None;
  bool right = false;
  bool both = false;               // would violate uniqueness
  std::vector<Occ> walk;           // occurrence at each cycle step, one full period of the trace
  bool good() const { return (kind == TraceKind::Mu && !right) || (kind == TraceKind::Nu && right); }
};

struct Options {
  size_t max_periods = 3;      // traces are closed walks through up to this many lasso cycles
  size_t walk_cap = 200000;    // per lasso
  size_t sim_periods = 256;    // repetitions simulated while looking for a repeated abstraction
  size_t lasso_cap = 200000;
};

struct LassoVerdict {
  bool good = false;
  std::optional<TraceClass> witness;  // a good trace when good
  std::vector<TraceClass> traces;     // every periodic trace examined
  size_t violations = 0;
};

// Periodic traces on the lasso's cycle that start at occurrence `start` of cycle[pos].
// Returns the best classification: a good trace if one exists, otherwise the first class found.
TraceClass classify_lasso_trace(const ProofGraph& g, const Lasso& l, size_t pos, const Occ& start,
                                const Options& o = {});
// All starts at cycle[0]; every tail trace passes there.
LassoVerdict analyze_lasso(const ProofGraph& g, const Lasso& l, const Options& o = {});

// simple lassos from the root: a simple path, then the first repeated node closes the cycle
std::vector<Lasso> simple_lassos(const ProofGraph& g, size_t cap = 200000);

struct BruteResult {
  bool ok = true;
  std::optional<Lasso> counterexample;
  size_t lassos = 0;
  size_t traces = 0;
  size_t violations = 0;
};
BruteResult gtc_bruteforce(const PreProof& pp, const Options& o = {});

// Annotated formulas along a node sequence, following the first image at each branch.
struct ReplayStep {
  size_t node;
  Occ occ;
  FPtr annotated;
  std::string text;  // annotated formula with sequence labels
};
std::vector<ReplayStep> replay(const ProofGraph& g, const std::vector<size_t>& path, const Occ& start,
                               const std::vector<Occ>* choices = nullptr);
std::string replay_text(const PreProof& pp, const std::vector<ReplayStep>& steps);

}  // namespace hfl::trace
