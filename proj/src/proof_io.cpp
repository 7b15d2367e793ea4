#include "hfl/proof_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hfl/encodings.hpp"
#include "hfl/parser.hpp"

namespace hfl {

namespace {

struct SExp {
  bool atom = false;
  bool quoted = false;
  std::string text;
  std::vector<SExp> items;
  size_t line = 0;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  std::vector<SExp> all() {
    std::vector<SExp> out;
    for (;;) {
      skip();
      if (i_ >= s_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  const std::string& s_;
  size_t i_ = 0, line_ = 1;

  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (isspace((unsigned char)c)) {
        ++i_;
      } else if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        return;
      }
    }
  }

  SExp read() {
    skip();
    if (i_ >= s_.size()) throw ProofParseError("unexpected end of file", line_);
    SExp e;
    e.line = line_;
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw ProofParseError("unclosed parenthesis", e.line);
        if (s_[i_] == ')') {
          ++i_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == ')') throw ProofParseError("unexpected ')'", line_);
    e.atom = true;
    if (c == '"') {
      e.quoted = true;
      ++i_;
      while (i_ < s_.size() && s_[i_] != '"') {
        if (s_[i_] == '\\' && i_ + 1 < s_.size() && s_[i_ + 1] == '"') ++i_;
        if (s_[i_] == '\n') ++line_;
        e.text += s_[i_++];
      }
      if (i_ >= s_.size()) throw ProofParseError("unterminated string", e.line);
      ++i_;
      return e;
    }
    while (i_ < s_.size() && !isspace((unsigned char)s_[i_]) && s_[i_] != '(' && s_[i_] != ')' &&
           s_[i_] != '"')
      e.text += s_[i_++];
    return e;
  }
};

const std::string& head(const SExp& e) {
  static const std::string none;
  if (e.atom || e.items.empty() || !e.items[0].atom || e.items[0].quoted) return none;
  return e.items[0].text;
}

const SExp& arg(const SExp& e, size_t k, const char* what) {
  if (k >= e.items.size()) throw ProofParseError(std::string("missing ") + what + " in (" + head(e) + ")", e.line);
  return e.items[k];
}

std::string atom(const SExp& e, size_t k, const char* what) {
  const SExp& a = arg(e, k, what);
  if (!a.atom) throw ProofParseError(std::string("expected ") + what, a.line);
  return a.text;
}

long number(const SExp& e, size_t k) {
  std::string s = atom(e, k, "number");
  try {
    size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ProofParseError("expected a non-negative number, found " + s, e.line);
  }
}

template <class F>
auto guarded(size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProofParseError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ProofParseError(ex.what(), line);
  }
}

struct Loader {
  PreProof pp;
  Defs defs = enc::standard_defs();
  std::map<std::string, size_t> ids;
  std::vector<std::vector<std::string>> child_names;
  std::vector<std::pair<std::string, std::string>> backs;
  std::vector<size_t> back_lines;
  bool vars_seen = false;

  ParseContext ctx(const TypeEnv& extra = {}) const {
    ParseContext c;
    c.env = pp.env;
    for (const auto& [k, v] : extra) c.env[k] = v;
    c.defs = &defs;
    return c;
  }

  FPtr formula(const SExp& e, size_t k, const TypeEnv& extra = {}) {
    std::string s = atom(e, k, "formula");
    return guarded(e.line, [&] { return parse_formula(s, ctx(extra)); });
  }

  RuleInst rule(const SExp& e) {
    std::string tag = atom(e, 1, "rule name");
    auto r = rule_from_name(tag);
    if (!r) throw ProofParseError("unknown rule " + tag, e.line);
    RuleInst ri;
    ri.tag = *r;
    // the hole must be known before phi is parsed
    for (size_t k = 2; k < e.items.size(); ++k)
      if (head(e.items[k]) == "hole") {
        ri.var = atom(e.items[k], 1, "hole name");
        std::string t = atom(e.items[k], 2, "hole type");
        ri.var_type = guarded(e.line, [&] { return parse_type(t); });
      }
    for (size_t k = 2; k < e.items.size(); ++k) {
      const SExp& p = e.items[k];
      const std::string& h = head(p);
      if (h == "at") ri.at = number(p, 1);
      else if (h == "rat") ri.rat = number(p, 1);
      else if (h == "formula") ri.formula = formula(p, 1);
      else if (h == "phi") {
        if (!ri.var_type) throw ProofParseError("phi given without a hole", p.line);
        ri.formula = formula(p, 1, {{ri.var, ri.var_type}});
      } else if (h == "psi") ri.psi = formula(p, 1);
      else if (h == "chi") ri.chi = formula(p, 1);
      else if (h == "hole") continue;
      else if (h == "ys") {
        for (size_t j = 1; j < p.items.size(); ++j) ri.ys.push_back(atom(p, j, "argument name"));
      } else if (h == "map") {
        std::string x = atom(p, 1, "variable"), a = atom(p, 2, "argument");
        ri.subst[x] = guarded(p.line, [&] { return parse_expr(a, ctx()); });
      } else if (h == "var") ri.var = atom(p, 1, "variable");
      else if (h == "witness") {
        std::string a = atom(p, 1, "witness");
        ri.witness = guarded(p.line, [&] { return parse_expr(a, ctx()); });
      } else if (h == "tmpl") {
        EqTemplate t;
        t.x = atom(p, 1, "template variable");
        t.y = atom(p, 2, "template variable");
        std::string s = atom(p, 3, "template sequent");
        TypeEnv extra{{t.x, nat_type()}, {t.y, nat_type()}};
        t.ctx = guarded(p.line, [&] { return parse_sequent(s, ctx(extra)).seq; });
        ri.tmpl = std::move(t);
      } else {
        throw ProofParseError("unknown rule parameter (" + h + ")", p.line);
      }
    }
    return ri;
  }

  void node(const SExp& e) {
    Node n;
    n.id = atom(e, 1, "node id");
    if (ids.count(n.id)) throw ProofParseError("duplicate node " + n.id, e.line);
    bool has_seq = false, open = false;
    std::vector<std::string> kids;
    for (size_t k = 2; k < e.items.size(); ++k) {
      const SExp& p = e.items[k];
      const std::string& h = head(p);
      if (h == "label") n.label = atom(p, 1, "label");
      else if (h == "seq") {
        std::string s = atom(p, 1, "sequent");
        auto ps = guarded(p.line, [&] { return parse_sequent(s, ctx()); });
        if (ps.env.size() != pp.env.size())
          throw ProofParseError("declare variables with (vars ...), not inside a node sequent", p.line);
        n.seq = std::move(ps.seq);
        has_seq = true;
      } else if (h == "rule") n.rule = rule(p);
      else if (h == "open") open = true;
      else if (h == "children") {
        for (size_t j = 1; j < p.items.size(); ++j) kids.push_back(atom(p, j, "child id"));
      } else {
        throw ProofParseError("unknown node field (" + h + ")", p.line);
      }
    }
    if (!has_seq) throw ProofParseError("node " + n.id + " has no sequent", e.line);
    if (open && n.rule) throw ProofParseError("node " + n.id + " is both open and has a rule", e.line);
    if (!open && !n.rule) throw ProofParseError("node " + n.id + " has neither a rule nor (open)", e.line);
    if (open && !kids.empty()) throw ProofParseError("open node " + n.id + " has children", e.line);
    ids[n.id] = pp.nodes.size();
    pp.nodes.push_back(std::move(n));
    child_names.push_back(std::move(kids));
  }

  void form(const SExp& e) {
    const std::string& h = head(e);
    if (h == "vars") {
      if (vars_seen || !pp.nodes.empty()) throw ProofParseError("(vars) must come first and only once", e.line);
      std::string s = atom(e, 1, "declarations");
      pp.env = guarded(e.line, [&] { return parse_decls(s); });
      vars_seen = true;
    } else if (h == "def") {
      std::string name = atom(e, 1, "definition name");
      FPtr f = formula(e, 2);
      defs[name] = f;
      pp.defs.emplace_back(name, f);
    } else if (h == "node") {
      node(e);
    } else if (h == "back") {
      backs.emplace_back(atom(e, 1, "leaf id"), atom(e, 2, "target id"));
      back_lines.push_back(e.line);
    } else {
      throw ProofParseError("unknown form (" + h + ")", e.line);
    }
  }

  PreProof finish() {
    if (pp.nodes.empty()) throw ProofParseError("no nodes", 1);
    std::vector<char> is_child(pp.nodes.size(), 0);
    for (size_t i = 0; i < pp.nodes.size(); ++i)
      for (const auto& c : child_names[i]) {
        auto it = ids.find(c);
        if (it == ids.end()) throw ProofParseError("node " + pp.nodes[i].id + ": unknown child " + c, 0);
        pp.nodes[i].children.push_back(it->second);
        is_child[it->second] = 1;
      }
    std::vector<size_t> roots;
    for (size_t i = 0; i < pp.nodes.size(); ++i)
      if (!is_child[i]) roots.push_back(i);
    if (roots.size() != 1)
      throw ProofParseError(roots.empty() ? "no root: every node is a child" : "several roots: " +
                                                                                    pp.nodes[roots[0]].id + ", " +
                                                                                    pp.nodes[roots[1]].id,
                            0);
    pp.root = roots[0];
    for (size_t k = 0; k < backs.size(); ++k) {
      auto a = ids.find(backs[k].first), b = ids.find(backs[k].second);
      if (a == ids.end() || b == ids.end()) throw ProofParseError("back-edge names an unknown node", back_lines[k]);
      if (pp.back.count(a->second)) throw ProofParseError("two back-edges from " + backs[k].first, back_lines[k]);
      pp.back[a->second] = b->second;
    }
    return std::move(pp);
  }
};

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '\\';
    r += c;
  }
  return r + "\"";
}

std::string decls(const TypeEnv& env) {
  std::string s;
  for (const auto& [k, t] : env) {
    if (!s.empty()) s += ", ";
    s += k + ":" + type_str(t);
  }
  return s;
}

}  // namespace

PreProof parse_proof(const std::string& text) {
  Reader rd(text);
  Loader ld;
  for (const auto& e : rd.all()) ld.form(e);
  return ld.finish();
}

PreProof load_proof(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_proof(ss.str());
}

DefTable print_defs(const PreProof& pp) {
  DefTable t;
  for (const auto& [k, v] : enc::standard_defs()) t.emplace_back(k, v);
  for (const auto& d : pp.defs) t.push_back(d);
  return t;
}

std::string write_proof(const PreProof& pp) {
  DefTable all = print_defs(pp);
  std::ostringstream o;
  o << "(vars " << quote(decls(pp.env)) << ")\n";
  DefTable earlier;
  for (const auto& [k, v] : enc::standard_defs()) earlier.emplace_back(k, v);
  for (const auto& [name, f] : pp.defs) {
    o << "(def " << name << " " << quote(to_string(f, &earlier)) << ")\n";
    earlier.emplace_back(name, f);
  }
  auto fm = [&](const FPtr& f) { return quote(to_string(f, &all)); };
  // tree order from the root so the output is stable
  std::vector<size_t> order;
  std::vector<size_t> st{pp.root};
  std::vector<char> seen(pp.nodes.size(), 0);
  while (!st.empty()) {
    size_t v = st.back();
    st.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    order.push_back(v);
    const auto& ch = pp.nodes[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) st.push_back(*it);
  }
  for (size_t i = 0; i < pp.nodes.size(); ++i)
    if (!seen[i]) order.push_back(i);
  for (size_t i : order) {
    const Node& n = pp.nodes[i];
    o << "(node " << n.id;
    if (!n.label.empty()) o << " (label " << quote(n.label) << ")";
    o << " (seq " << quote(to_string(n.seq, &all)) << ")";
    if (!n.rule) {
      o << " (open))\n";
      continue;
    }
    const RuleInst& r = *n.rule;
    o << "\n  (rule " << rule_name(r.tag);
    if (r.at >= 0) o << " (at " << r.at << ")";
    if (r.rat >= 0) o << " (rat " << r.rat << ")";
    if (r.tag == Rule::Mono) {
      if (!r.var.empty() && r.var_type) o << " (hole " << r.var << " " << quote(type_str(r.var_type)) << ")";
      if (r.formula) o << " (phi " << fm(r.formula) << ")";
    } else {
      if (r.formula) o << " (formula " << fm(r.formula) << ")";
      if (!r.var.empty()) o << " (var " << r.var << ")";
    }
    if (r.psi) o << " (psi " << fm(r.psi) << ")";
    if (r.chi) o << " (chi " << fm(r.chi) << ")";
    if (!r.ys.empty()) {
      o << " (ys";
      for (const auto& y : r.ys) o << " " << y;
      o << ")";
    }
    for (const auto& [x, a] : r.subst) o << " (map " << x << " " << quote(to_string(a, &all)) << ")";
    if (r.witness) o << " (witness " << quote(to_string(*r.witness, &all)) << ")";
    if (r.tmpl) o << " (tmpl " << r.tmpl->x << " " << r.tmpl->y << " " << quote(to_string(r.tmpl->ctx, &all)) << ")";
    o << ")";
    if (!n.children.empty()) {
      o << "\n  (children";
      for (size_t c : n.children) o << " " << pp.nodes[c].id;
      o << ")";
    }
    o << ")\n";
  }
  // in printed order, so that reading the file back reproduces it
  for (size_t i : order)
    if (auto it = pp.back.find(i); it != pp.back.end())
      o << "(back " << pp.nodes[i].id << " " << pp.nodes[it->second].id << ")\n";
  return o.str();
}

}  // namespace hfl
