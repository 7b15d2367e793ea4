#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfl::buchi {

using State = size_t;
using Symbol = size_t;

struct Transition {
  State from;
  Symbol sym;
  State to;
  bool acc = false;
};

// Büchi automaton with accepting transitions; symbols are opaque ids < alphabet.
struct Automaton {
  size_t states = 0;
  size_t alphabet = 0;
  std::vector<State> initial;
  std::vector<Transition> trans;
  std::vector<std::string> state_names, symbol_names;  // optional, for dumps

  State add_state(std::string name = {});
  void add(State from, Symbol a, State to, bool acc);
  // transitions by source state
  std::vector<std::vector<size_t>> by_source() const;
  void validate() const;  // throws std::invalid_argument
};

struct LassoWord {
  std::vector<Symbol> u, v;  // u v^ω, v nonempty
};
std::string word_str(const LassoWord& w, const std::vector<std::string>* names = nullptr);

struct SizeGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool accepts_lasso(const Automaton& a, const LassoWord& w);

struct Emptiness {
  bool empty = true;
  std::optional<LassoWord> witness;
};
Emptiness is_empty(const Automaton& a);

// Rank-based complement: a subset phase, then a guessed switch to tight level rankings
// with a breakpoint set. Output states are bounded by 2^n + n! (2n)^n-ish; guarded.
Automaton complement(const Automaton& a, size_t max_states = 200000);
Automaton intersect(const Automaton& a, const Automaton& b);

struct Containment {
  bool holds = true;
  std::optional<LassoWord> counterexample;  // in L(a) \ L(b)
};
// via is_empty(intersect(a, complement(b)))
Containment contains(const Automaton& a, const Automaton& b, size_t max_states = 200000);
// Ramsey-based lasso finding over the transition-profile monoid
Containment contains_ramsey(const Automaton& a, const Automaton& b, size_t max_profiles = 200000);

// State-based acceptance: state (q, last transition accepting?)
struct StateAutomaton {
  size_t states = 0;
  size_t alphabet = 0;
  std::vector<State> initial;
  std::vector<Transition> trans;  // acc ignored
  std::vector<bool> accepting;
};
StateAutomaton to_state_based(const Automaton& a);
bool accepts_lasso(const StateAutomaton& a, const LassoWord& w);

std::string dump(const Automaton& a);    // text format, '*' marks accepting transitions
std::string to_dot(const Automaton& a);  // graph description

}  // namespace hfl::buchi
