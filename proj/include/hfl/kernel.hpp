#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfl/syntax.hpp"

namespace hfl {

enum class Rule {
  Axiom, Cut, WkL, WkR, CtrL, CtrR, ExL, ExR, Subst, Mono,
  EqL, EqR, OrL, OrR, AndL, AndR, LamL, LamR, MuL, MuR, NuL, NuR,
  Nat, P1, P2,
  // admissible rules, removed by the elaborator
  ForallL, ForallR, ExistsL, ExistsR, Pre, Post
};

std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& s);
bool is_extended(Rule r);
// logical rules in the sense of the rule table (principal occurrences count for traces)
bool is_logical(Rule r);
// which side the principal formula lives on; Cut/Nat/Subst/Axiom have none
enum class Side { Left, Right, None };
Side principal_side(Rule r);

// EqL template: conclusion context is ctx[s/x,t/y], premise ctx[t/x,s/y]
struct EqTemplate {
  std::string x, y;
  Sequent ctx;
};

struct RuleInst {
  Rule tag = Rule::Axiom;
  long at = -1;   // principal position on its side; -1 = schema default
  long rat = -1;  // Mono: principal position on the right
  FPtr formula;   // Cut formula, Mono context φ, Pre/Post invariant χ
  FPtr psi, chi;  // Mono
  std::string var;  // Mono hole, Nat variable, ForallR / ExistsL eigenvariable
  TypeP var_type;   // Mono hole type
  std::vector<std::string> ys;  // Mono / Pre / Post fresh arguments
  Subst subst;
  std::optional<Arg> witness;  // ForallL / ExistsR
  std::optional<EqTemplate> tmpl;
};

struct Occ {
  bool right = false;
  size_t index = 0;
  bool operator==(const Occ& o) const { return right == o.right && index == o.index; }
  bool operator<(const Occ& o) const { return right != o.right ? right < o.right : index < o.index; }
};
std::string occ_str(const Occ& o);

// How a premise occurrence arises from its conclusion occurrence.
enum class StepKind {
  Copy,      // alpha-equivalent formula
  Transfer,  // same shape up to substituted variables / rewritten terms (Subst, EqL)
  Beta,      // principal of LamL/LamR
  Unfold,    // principal of a fixpoint rule
  MonoArg,   // principal of Mono: ψ ỹ or χ ỹ for occurrence j of the hole
  Operand0,  // principal of a connective rule: left operand
  Operand1,  // right operand
  Plain      // annotations start afresh: P2 and the admissible rules
};

struct OccLink {
  long src = -1;  // index on the same side in the conclusion, -1 = fresh
  StepKind kind = StepKind::Copy;
};

struct PremiseLink {
  std::vector<OccLink> left, right;
  long mono_occ = -1;  // Mono: which occurrence of the hole this premise belongs to
};

struct Derivation {
  std::vector<Sequent> premises;
  std::vector<PremiseLink> links;
};

struct RuleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaMismatch : RuleError {
  long premise;
  std::string expected, found;
  SchemaMismatch(long p, std::string e, std::string f)
      : RuleError("premise " + std::to_string(p) + ": expected " + e + ", found " + f),
        premise(p), expected(std::move(e)), found(std::move(f)) {}
};
struct SideConditionViolated : RuleError {
  using RuleError::RuleError;
};

// Premises the schema dictates for this conclusion. Subst reads the premise from `given`
// since it cannot be reconstructed. Throws RuleError (or a subclass) on any failure.
Derivation derive(const TypeEnv& env, const Sequent& concl, const RuleInst& r,
                  const std::vector<Sequent>& given);
// derive, then compare with the given premises up to alpha-equivalence
Derivation check_rule(const TypeEnv& env, const Sequent& concl, const RuleInst& r,
                      const std::vector<Sequent>& premises);
// premise occurrence -> conclusion occurrence; absent keys are fresh occurrences
std::map<Occ, Occ> relevant_occurrences(const Derivation& d, size_t premise);

// EqL default mode: every free term occurrence S^c(b) with c >= a, where s = S^a(b), becomes S^(c-a)(t)
FPtr rewrite_term(const FPtr& f, const Term& s, const Term& t);

// ---------------------------------------------------------------- pre-proofs

struct Node {
  std::string id;
  std::string label;  // optional cycle mark such as "★"
  Sequent seq;
  std::optional<RuleInst> rule;  // nullopt = open leaf
  std::vector<size_t> children;
};

struct PreProof {
  TypeEnv env;
  std::vector<Node> nodes;
  size_t root = 0;
  std::map<size_t, size_t> back;  // open leaf -> companion
  DefTable defs;                  // printing aids
  std::optional<size_t> find(const std::string& id) const;
};

struct Issue {
  std::string node;
  std::string message;
};

// Every problem found; empty means a valid pre-proof.
std::vector<Issue> validate_preproof(const PreProof& pp, bool allow_extended = false);
bool uses_extended(const PreProof& pp);

struct Edge {
  size_t to;
  bool back;
  PremiseLink link;  // identity links on back-edges
};

// Successor structure with occurrence links. Requires a valid pre-proof.
struct ProofGraph {
  const PreProof* pp = nullptr;
  std::vector<std::vector<Edge>> out;
  explicit ProofGraph(const PreProof& p);
  std::vector<size_t> successors(size_t n) const;
  size_t size() const { return out.size(); }
};

// tree children for internal nodes, [R(n)] for open leaves, [] for axioms
std::vector<size_t> successors(const PreProof& pp, size_t n);

// --------------------------------------------------------- occurrence steps

// The formula a premise occurrence carries, computed from an annotated conclusion formula.
// `unfold_copy` is the formula substituted for the bound variable on Unfold steps.
FPtr transfer(const FPtr& annotated, const FPtr& plain);
FPtr unfold_with(const FPtr& f, const FPtr& copy);
// Mono: the annotated argument sitting at occurrence j of the hole inside the annotated φ[ψ/x]
FPtr mono_arg(const FPtr& annotated, const FPtr& phi, const std::string& hole, long j);
// position of the j-th free occurrence of x, in the traversal order used by mono_arg
size_t hole_count(const FPtr& phi, const std::string& hole);

}  // namespace hfl
