#pragma once

#include <set>
#include <string>
#include <vector>

#include "hfl/kernel.hpp"

namespace hfl {

// Bottom-up construction of pre-proofs: every premise comes from kernel::derive.
class Builder {
 public:
  explicit Builder(PreProof& pp, std::string id_prefix = "e");

  size_t node(Sequent s, const std::string& label = {});
  const Sequent& seq(size_t n) const { return pp_.nodes.at(n).seq; }

  // apply r at n; returns the new premise nodes
  std::vector<size_t> apply(size_t n, const RuleInst& r);
  size_t apply1(size_t n, const RuleInst& r);
  // single-premise shorthands
  size_t rule(size_t n, Rule tag, long at = -1);
  // a rule without premises (Axiom, EqR, P1)
  void close(size_t n, Rule tag = Rule::Axiom, long at = -1);
  size_t subst(size_t n, const Subst& s, Sequent premise);
  // Cut: returns {premise with φ on the right, premise with φ on the left}
  std::pair<size_t, size_t> cut(size_t n, const FPtr& phi);
  // a chain of Ex steps moving the formula at `from` to `to` on one side
  size_t move(size_t n, bool left, size_t from, size_t to);
  // weaken away every occurrence not listed (indices into the current sequent)
  size_t keep_only(size_t n, const std::vector<size_t>& left, const std::vector<size_t>& right);

  // n must be a fresh leaf; it is replaced by `existing` in its parent (sequents must agree)
  void fuse(size_t n, size_t existing);
  void back(size_t leaf, size_t target);
  void set_root(size_t n) { pp_.root = n; }

  // names of the form prefix_k not bound in the environment; declared with type t
  std::string fresh_var(const std::string& prefix, const TypeP& t);

  // drop fused nodes and renumber; call once at the end
  void finish();

  PreProof& proof() { return pp_; }

 private:
  PreProof& pp_;
  std::string prefix_;
  size_t next_id_ = 0, next_var_ = 0;
  std::vector<char> dead_;
  std::vector<long> parent_;
  std::set<std::string> ids_;
};

}  // namespace hfl
