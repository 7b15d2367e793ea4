#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfl/builder.hpp"
#include "hfl/kernel.hpp"

namespace hfl::elab {

struct ElaborationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replace every extended-rule node by a core derivation. Each rewritten node keeps its id
// and sequent; the new chains end in the node's original premises. The input must
// validate with extended rules allowed, otherwise ElaborationError.
PreProof eliminate_quantifiers(const PreProof& pp);
PreProof eliminate_park(const PreProof& pp);
PreProof elaborate(const PreProof& pp);

// Expand one extended rule at the fresh leaf n (which must not have a rule yet).
// Returns open leaves whose sequents are the rule's premises, in schema order.
std::vector<size_t> expand_rule(Builder& b, size_t n, const RuleInst& r);

// Core cyclic proof of |- Z <= w at the leaf n, where w is an N variable.
void leq_zero_proof(Builder& b, size_t n);
// Standalone version with root |- Z <= t over t:N.
PreProof lemma_b1_proof();

// Case split on an N variable x of seq: a spine of Nat, then for i = 0..depth a node
// Γ[S^i x/x], N x |- Δ[S^i x/x] unfolded into the x = Z case (closed by family(i), whose
// root must be Γ[S^i Z/x] |- Δ[S^i Z/x]) and the successor case, which continues at i+1.
// The successor leaf after `depth` stays open.
using Family = std::function<PreProof(unsigned)>;
PreProof numeral_case_split(const TypeEnv& env, const Family& family, const Sequent& seq, const std::string& x,
                            unsigned depth);

}  // namespace hfl::elab
