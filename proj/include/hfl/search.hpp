#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hfl/builder.hpp"
#include "hfl/gtc.hpp"
#include "hfl/kernel.hpp"
#include "hfl/trace.hpp"

namespace hfl::search {

// Formulas the construction expands: φ∨ψ, φ∧ψ, (λx.φ)ψ ψ⃗ and (σx.φ) ψ⃗.
bool is_schedule_element(const FPtr& f);

struct Element {
  FPtr formula;
  bool right = false;
};

enum class FragmentKind { Axiom, Contradiction, Reflexivity, Expand, NoOp };
std::string step_str(FragmentKind k);

struct Fragment {
  FragmentKind kind = FragmentKind::NoOp;
  std::vector<size_t> leaves;  // new open leaves, left premise first
  Occ principal;               // Expand: the expanded copy (the original stays at principal.index - 1)
  size_t produced = 0;         // Expand: formulas the rule put in place of the copy
};

// One step on the open leaf n. Closures take priority over E; a missing E is a no-op.
Fragment expand_leaf(Builder& b, size_t n, const std::optional<Element>& e);

// Re-expanding e at s adds no formula that s lacks, on some premise.
bool saturated(const TypeEnv& env, const Sequent& s, const Element& e);

// Which closure applies to s, if any (the first three cases of expand_leaf).
std::optional<FragmentKind> closure_kind(const Sequent& s);

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  unsigned depth = 10;      // expansion rounds
  uint64_t seed = 0;        // 0 = leftmost tie-breaking
  size_t max_nodes = 20000;
  size_t max_checks = 5000;  // candidate pre-proofs handed to the checker
  bool subsumption = true;   // also propose back-edges after weakening down to an ancestor
  gtc::Options gtc;
};

struct Accepted {
  PreProof proof;
  unsigned rounds = 0;
  size_t checks = 0;
};

// a closed candidate that failed, with a path that has no good trace
struct Rejection {
  PreProof candidate;
  std::optional<trace::Lasso> lasso;
  std::string stage;  // "cycle" when a single back-edge's own cycle failed, else the checker's stage
};

struct OutOfBudget {
  PreProof partial;             // expansion tree; frontier nodes are open
  std::vector<size_t> frontier;
  unsigned rounds = 0;
  size_t checks = 0;    // full checker runs
  size_t rejected = 0;  // back-edge proposals given up, including ones failing their own cycle
  std::string reason;
  std::optional<Rejection> last;
};

using Result = std::variant<Accepted, OutOfBudget>;

// Free variables must be of type N or N^k -> O; PreconditionError otherwise.
Result build(const TypeEnv& env, const Sequent& seq, const Options& o = {});

// one scheduling decision, exposed for the fairness property
struct Scheduler {
  struct Entry {
    std::string key;
    long touched = -1;  // round of the last expansion, or of first appearance
    bool expanded = false;
  };
  std::vector<Entry> entries;
  // elements of s in position order (left side first)
  static std::vector<Element> elements(const Sequent& s);
  // refresh membership for s at round r, then pick the least recently touched element;
  // on ties never-expanded ones first. Already expanded elements for which `saturated`
  // holds are passed over.
  std::optional<Element> pick(const Sequent& s, long round, uint64_t seed,
                              const std::function<bool(const Element&)>& saturated = {});
  void expanded(const Element& e, long round);
};

}  // namespace hfl::search
