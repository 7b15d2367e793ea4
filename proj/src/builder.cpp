#include "hfl/builder.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hfl {

Builder::Builder(PreProof& pp, std::string id_prefix) : pp_(pp), prefix_(std::move(id_prefix)) {
  for (const auto& n : pp_.nodes) ids_.insert(n.id);
  dead_.assign(pp_.nodes.size(), 0);
  parent_.assign(pp_.nodes.size(), -1);
  for (size_t i = 0; i < pp_.nodes.size(); ++i)
    for (size_t c : pp_.nodes[i].children) parent_[c] = (long)i;
}

size_t Builder::node(Sequent s, const std::string& label) {
  std::string id;
  do id = prefix_ + std::to_string(next_id_++);
  while (ids_.count(id));
  ids_.insert(id);
  Node n;
  n.id = id;
  n.label = label;
  n.seq = std::move(s);
  pp_.nodes.push_back(std::move(n));
  dead_.push_back(0);
  parent_.push_back(-1);
  return pp_.nodes.size() - 1;
}

std::vector<size_t> Builder::apply(size_t n, const RuleInst& r) {
  if (pp_.nodes.at(n).rule) throw std::logic_error("builder: node " + pp_.nodes[n].id + " already has a rule");
  Derivation d = derive(pp_.env, pp_.nodes[n].seq, r, {});
  pp_.nodes[n].rule = r;
  std::vector<size_t> out;
  for (const Sequent& p : d.premises) {
    size_t c = node(p);
    parent_[c] = (long)n;
    pp_.nodes[n].children.push_back(c);
    out.push_back(c);
  }
  return out;
}

size_t Builder::apply1(size_t n, const RuleInst& r) {
  auto cs = apply(n, r);
  if (cs.size() != 1) throw std::logic_error("builder: " + rule_name(r.tag) + " did not give one premise");
  return cs[0];
}

size_t Builder::rule(size_t n, Rule tag, long at) {
  RuleInst r;
  r.tag = tag;
  r.at = at;
  return apply1(n, r);
}

void Builder::close(size_t n, Rule tag, long at) {
  RuleInst r;
  r.tag = tag;
  r.at = at;
  if (!apply(n, r).empty()) throw std::logic_error("builder: " + rule_name(tag) + " has premises");
}

size_t Builder::subst(size_t n, const Subst& s, Sequent premise) {
  RuleInst r;
  r.tag = Rule::Subst;
  r.subst = s;
  check_rule(pp_.env, pp_.nodes.at(n).seq, r, {premise});
  pp_.nodes[n].rule = r;
  size_t c = node(premise);
  parent_[c] = (long)n;
  pp_.nodes[n].children.push_back(c);
  return c;
}

std::pair<size_t, size_t> Builder::cut(size_t n, const FPtr& phi) {
  RuleInst r;
  r.tag = Rule::Cut;
  r.formula = phi;
  auto cs = apply(n, r);
  return {cs[0], cs[1]};
}

size_t Builder::move(size_t n, bool left, size_t from, size_t to) {
  Rule ex = left ? Rule::ExL : Rule::ExR;
  while (from < to) n = rule(n, ex, (long)from++);
  while (from > to) n = rule(n, ex, (long)--from);
  return n;
}

size_t Builder::keep_only(size_t n, const std::vector<size_t>& left, const std::vector<size_t>& right) {
  for (long i = (long)seq(n).left.size() - 1; i >= 0; --i)
    if (std::find(left.begin(), left.end(), (size_t)i) == left.end()) n = rule(n, Rule::WkL, i);
  for (long i = (long)seq(n).right.size() - 1; i >= 0; --i)
    if (std::find(right.begin(), right.end(), (size_t)i) == right.end()) n = rule(n, Rule::WkR, i);
  return n;
}

void Builder::fuse(size_t n, size_t existing) {
  if (!seq_alpha_eq(seq(n), seq(existing)))
    throw std::logic_error("builder: cannot fuse " + to_string(seq(n)) + " with " + to_string(seq(existing)));
  if (pp_.nodes[n].rule || parent_[n] < 0) throw std::logic_error("builder: fuse needs a fresh leaf");
  auto& ch = pp_.nodes[(size_t)parent_[n]].children;
  std::replace(ch.begin(), ch.end(), n, existing);
  parent_[existing] = parent_[n];
  dead_[n] = 1;
}

void Builder::back(size_t leaf, size_t target) {
  if (pp_.nodes.at(leaf).rule) throw std::logic_error("builder: back-edge from a node with a rule");
  pp_.back[leaf] = target;
}

std::string Builder::fresh_var(const std::string& prefix, const TypeP& t) {
  std::string x;
  do x = prefix + "_" + std::to_string(next_var_++);
  while (pp_.env.count(x));
  pp_.env[x] = t;
  return x;
}

void Builder::finish() {
  std::vector<long> remap(pp_.nodes.size(), -1);
  std::vector<Node> kept;
  for (size_t i = 0; i < pp_.nodes.size(); ++i)
    if (!dead_[i]) {
      remap[i] = (long)kept.size();
      kept.push_back(std::move(pp_.nodes[i]));
    }
  for (auto& n : kept)
    for (auto& c : n.children) c = (size_t)remap[c];
  std::map<size_t, size_t> back;
  for (auto [l, t] : pp_.back) back[(size_t)remap[l]] = (size_t)remap[t];
  pp_.nodes = std::move(kept);
  pp_.back = std::move(back);
  pp_.root = (size_t)remap[pp_.root];
  dead_.assign(pp_.nodes.size(), 0);
  parent_.assign(pp_.nodes.size(), -1);
  for (size_t i = 0; i < pp_.nodes.size(); ++i)
    for (size_t c : pp_.nodes[i].children) parent_[c] = (long)i;
}

}  // namespace hfl
