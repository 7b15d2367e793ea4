#include "hfl/buchi.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace hfl::buchi {

State Automaton::add_state(std::string name) {
  state_names.push_back(std::move(name));
  return states++;
}

void Automaton::add(State from, Symbol a, State to, bool acc) { trans.push_back({from, a, to, acc}); }

std::vector<std::vector<size_t>> Automaton::by_source() const {
  std::vector<std::vector<size_t>> out(states);
  for (size_t i = 0; i < trans.size(); ++i) out[trans[i].from].push_back(i);
  return out;
}

void Automaton::validate() const {
  for (State q : initial)
    if (q >= states) throw std::invalid_argument("initial state out of range");
  for (const auto& t : trans)
    if (t.from >= states || t.to >= states || t.sym >= alphabet)
      throw std::invalid_argument("transition out of range");
}

std::string word_str(const LassoWord& w, const std::vector<std::string>* names) {
  auto sym = [&](Symbol s) {
    return names && s < names->size() && !(*names)[s].empty() ? (*names)[s] : std::to_string(s);
  };
  std::string out;
  for (Symbol s : w.u) out += sym(s) + " ";
  out += "(";
  for (size_t i = 0; i < w.v.size(); ++i) out += (i ? " " : "") + sym(w.v[i]);
  return out + ")^ω";
}

namespace {

struct GEdge {
  size_t to;
  Symbol sym;
  bool acc;
};

// Reachable cycle through an accepting edge, as symbol words.
std::optional<LassoWord> accepting_lasso(const std::vector<std::vector<GEdge>>& adj,
                                         const std::vector<size_t>& init) {
  const size_t n = adj.size();
  // reachability with BFS parents
  std::vector<long> par(n, -2);
  std::vector<Symbol> psym(n, 0);
  std::deque<size_t> q;
  for (size_t s : init)
    if (s < n && par[s] == -2) {
      par[s] = -1;
      q.push_back(s);
    }
  while (!q.empty()) {
    size_t v = q.front();
    q.pop_front();
    for (const auto& e : adj[v])
      if (par[e.to] == -2) {
        par[e.to] = (long)v;
        psym[e.to] = e.sym;
        q.push_back(e.to);
      }
  }
  // Tarjan, iterative
  std::vector<long> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<size_t> st;
  std::vector<char> on(n, 0);
  long counter = 0, ncomp = 0;
  for (size_t s = 0; s < n; ++s) {
    if (par[s] == -2 || idx[s] >= 0) continue;
    std::vector<std::pair<size_t, size_t>> call{{s, 0}};
    idx[s] = low[s] = counter++;
    st.push_back(s);
    on[s] = 1;
    while (!call.empty()) {
      auto& [v, k] = call.back();
      if (k < adj[v].size()) {
        size_t w = adj[v][k++].to;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          st.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        if (low[v] == idx[v]) {
          for (;;) {
            size_t w = st.back();
            st.pop_back();
            on[w] = 0;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        size_t done = v;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      }
    }
  }
  for (size_t p = 0; p < n; ++p) {
    if (par[p] == -2) continue;
    for (const auto& e : adj[p]) {
      if (!e.acc || comp[e.to] != comp[p]) continue;
      LassoWord w;
      for (size_t x = p; par[x] >= 0; x = (size_t)par[x]) w.u.push_back(psym[x]);
      std::reverse(w.u.begin(), w.u.end());
      // path e.to -> p inside the component
      std::vector<long> bp(n, -2);
      std::vector<Symbol> bs(n, 0);
      std::deque<size_t> bq{e.to};
      bp[e.to] = -1;
      while (!bq.empty() && bp[p] == -2) {
        size_t v = bq.front();
        bq.pop_front();
        for (const auto& f : adj[v])
          if (comp[f.to] == comp[p] && bp[f.to] == -2) {
            bp[f.to] = (long)v;
            bs[f.to] = f.sym;
            bq.push_back(f.to);
          }
      }
      std::vector<Symbol> back;
      for (size_t x = p; bp[x] >= 0; x = (size_t)bp[x]) back.push_back(bs[x]);
      std::reverse(back.begin(), back.end());
      w.v.push_back(e.sym);
      w.v.insert(w.v.end(), back.begin(), back.end());
      return w;
    }
  }
  return std::nullopt;
}

void check_word(size_t alphabet, const LassoWord& w) {
  if (w.v.empty()) throw std::invalid_argument("lasso word with empty cycle");
  for (Symbol s : w.u)
    if (s >= alphabet) throw std::invalid_argument("symbol not in alphabet");
  for (Symbol s : w.v)
    if (s >= alphabet) throw std::invalid_argument("symbol not in alphabet");
}

// product with the lasso positions
template <class AccFn>
bool lasso_product(size_t states, const std::vector<State>& initial, const std::vector<Transition>& trans,
                   const LassoWord& w, AccFn acc) {
  const size_t L = w.u.size() + w.v.size();
  auto sym_at = [&](size_t i) { return i < w.u.size() ? w.u[i] : w.v[i - w.u.size()]; };
  auto next = [&](size_t i) { return i + 1 < L ? i + 1 : w.u.size(); };
  std::vector<std::vector<std::pair<Symbol, std::pair<State, bool>>>> out(states);
  for (const auto& t : trans) out[t.from].push_back({t.sym, {t.to, acc(t)}});
  std::vector<std::vector<GEdge>> adj(states * L);
  for (State q = 0; q < states; ++q)
    for (size_t i = 0; i < L; ++i)
      for (const auto& [a, tgt] : out[q])
        if (a == sym_at(i)) adj[q * L + i].push_back({tgt.first * L + next(i), a, tgt.second});
  std::vector<size_t> init;
  for (State q : initial) init.push_back(q * L);
  return accepting_lasso(adj, init).has_value();
}

using Ranking = std::vector<int>;  // -1 = not in the set

bool tight(const Ranking& f) {
  int mx = -1;
  for (int r : f) mx = std::max(mx, r);
  if (mx < 0) return true;
  if (mx % 2 == 0) return false;
  for (int odd = 1; odd <= mx; odd += 2)
    if (std::find(f.begin(), f.end(), odd) == f.end()) return false;
  return true;
}

// every tight ranking below the given per-state bounds
void rankings(const Ranking& bound, std::vector<Ranking>& out) {
  Ranking cur(bound.size(), -1);
  size_t present = 0;
  for (int b : bound) present += b >= 0;
  const int cap = (int)(2 * present) - 1;
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == bound.size()) {
      if (tight(cur)) out.push_back(cur);
      return;
    }
    if (bound[i] < 0) {
      cur[i] = -1;
      go(i + 1);
      return;
    }
    for (int r = 0; r <= std::min(bound[i], cap); ++r) {
      cur[i] = r;
      go(i + 1);
    }
  };
  go(0);
}

}  // namespace

bool accepts_lasso(const Automaton& a, const LassoWord& w) {
  check_word(a.alphabet, w);
  return lasso_product(a.states, a.initial, a.trans, w, [](const Transition& t) { return t.acc; });
}

Emptiness is_empty(const Automaton& a) {
  std::vector<std::vector<GEdge>> adj(a.states);
  for (const auto& t : a.trans) adj[t.from].push_back({t.to, t.sym, t.acc});
  Emptiness e;
  e.witness = accepting_lasso(adj, a.initial);
  e.empty = !e.witness;
  return e;
}

Automaton complement(const Automaton& a, size_t max_states) {
  a.validate();
  const size_t n = a.states;
  if (n > 24) throw SizeGuard("complement: too many input states");
  auto out_of = a.by_source();
  Automaton c;
  c.alphabet = a.alphabet;
  c.symbol_names = a.symbol_names;
  // key: phase-1 subset {0, mask}; ranked {1, ranks..., O-mask}
  std::map<std::vector<int>, State> ids;
  std::vector<std::vector<int>> keys;
  auto intern = [&](std::vector<int> k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    if (keys.size() >= max_states) throw SizeGuard("complement exceeds " + std::to_string(max_states) + " states");
    State s = c.add_state();
    ids.emplace(k, s);
    keys.push_back(std::move(k));
    return s;
  };
  auto ranked_key = [&](const Ranking& f, unsigned omask) {
    std::vector<int> k{1};
    k.insert(k.end(), f.begin(), f.end());
    k.push_back((int)omask);
    return k;
  };
  unsigned init_mask = 0;
  for (State q : a.initial) init_mask |= 1u << q;
  c.initial.push_back(intern({0, (int)init_mask}));
  {
    Ranking b(n, -1);
    for (size_t q = 0; q < n; ++q)
      if (init_mask >> q & 1) b[q] = (int)(2 * n);
    std::vector<Ranking> rs;
    rankings(b, rs);
    for (const auto& f : rs) c.initial.push_back(intern(ranked_key(f, 0)));
  }
  for (size_t done = 0; done < keys.size(); ++done) {
    const std::vector<int> k = keys[done];
    for (Symbol sym = 0; sym < a.alphabet; ++sym) {
      if (k[0] == 0) {
        unsigned S = (unsigned)k[1], T = 0;
        for (size_t q = 0; q < n; ++q)
          if (S >> q & 1)
            for (size_t ti : out_of[q])
              if (a.trans[ti].sym == sym) T |= 1u << a.trans[ti].to;
        c.add(done, sym, intern({0, (int)T}), false);
        Ranking b(n, -1);
        for (size_t q = 0; q < n; ++q)
          if (T >> q & 1) b[q] = (int)(2 * n);
        std::vector<Ranking> rs;
        rankings(b, rs);
        for (const auto& f : rs) c.add(done, sym, intern(ranked_key(f, 0)), false);
        continue;
      }
      Ranking f(k.begin() + 1, k.begin() + 1 + (long)n);
      unsigned O = (unsigned)k[n + 1];
      Ranking bound(n, -1);
      unsigned reachO = 0;
      for (size_t q = 0; q < n; ++q) {
        if (f[q] < 0) continue;
        for (size_t ti : out_of[q]) {
          const auto& t = a.trans[ti];
          if (t.sym != sym) continue;
          int b = f[q];
          if (t.acc && b % 2 == 1) --b;
          bound[t.to] = bound[t.to] < 0 ? b : std::min(bound[t.to], b);
          if (O >> q & 1) reachO |= 1u << t.to;
        }
      }
      std::vector<Ranking> rs;
      rankings(bound, rs);
      for (const auto& g : rs) {
        unsigned even = 0;
        for (size_t q = 0; q < n; ++q)
          if (g[q] >= 0 && g[q] % 2 == 0) even |= 1u << q;
        unsigned O2 = O == 0 ? even : (reachO & even);
        c.add(done, sym, intern(ranked_key(g, O2)), O == 0);
      }
    }
  }
  return c;
}

Automaton intersect(const Automaton& a, const Automaton& b) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("intersect: alphabet mismatch");
  auto oa = a.by_source(), ob = b.by_source();
  Automaton c;
  c.alphabet = a.alphabet;
  c.symbol_names = a.symbol_names;
  std::map<std::tuple<State, State, int>, State> ids;
  std::vector<std::tuple<State, State, int>> keys;
  auto intern = [&](State p, State q, int ph) {
    auto k = std::make_tuple(p, q, ph);
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    State s = c.add_state();
    ids.emplace(k, s);
    keys.push_back(k);
    return s;
  };
  for (State p : a.initial)
    for (State q : b.initial) c.initial.push_back(intern(p, q, 0));
  for (size_t done = 0; done < keys.size(); ++done) {
    auto [p, q, ph] = keys[done];
    for (size_t i : oa[p])
      for (size_t j : ob[q]) {
        const auto& ta = a.trans[i];
        const auto& tb = b.trans[j];
        if (ta.sym != tb.sym) continue;
        int nph = ph;
        bool acc = false;
        if (nph == 0 && ta.acc) nph = 1;
        if (nph == 1 && tb.acc) {
          nph = 0;
          acc = true;
        }
        c.add(done, ta.sym, intern(ta.to, tb.to, nph), acc);
      }
  }
  return c;
}

Containment contains(const Automaton& a, const Automaton& b, size_t max_states) {
  Emptiness e = is_empty(intersect(a, complement(b, max_states)));
  Containment r;
  r.holds = e.empty;
  r.counterexample = e.witness;
  return r;
}

namespace {

// A relation over states as sorted (from, to, value) entries; value 1 = path,
// 2 = path through an accepting transition.
struct Entry {
  uint32_t p, q;
  unsigned char v;
  bool operator==(const Entry& o) const { return p == o.p && q == o.q && v == o.v; }
};
using Rel = std::vector<Entry>;

struct Profile {
  Rel ra, rb;
  bool operator==(const Profile& o) const { return ra == o.ra && rb == o.rb; }
};

struct ProfileHash {
  size_t operator()(const Profile& pr) const {
    size_t h = 1469598103934665603ull;
    auto mix = [&](const Rel& r) {
      for (const auto& e : r) h = (h ^ (((size_t)e.p << 33) ^ ((size_t)e.q << 2) ^ e.v)) * 1099511628211ull;
      h = (h ^ 0xff) * 1099511628211ull;
    };
    mix(pr.ra);
    mix(pr.rb);
    return h;
  }
};

using Adj = std::vector<std::vector<std::pair<uint32_t, unsigned char>>>;

Adj letter_adj(const Automaton& a, Symbol s) {
  Adj adj(a.states);
  for (const auto& t : a.trans)
    if (t.sym == s) adj[t.from].push_back({(uint32_t)t.to, (unsigned char)(t.acc ? 2 : 1)});
  return adj;
}

Rel normalize(std::vector<Entry> es) {
  std::sort(es.begin(), es.end(), [](const Entry& x, const Entry& y) {
    return x.p != y.p ? x.p < y.p : x.q != y.q ? x.q < y.q : x.v > y.v;
  });
  Rel out;
  for (const auto& e : es)
    if (out.empty() || out.back().p != e.p || out.back().q != e.q) out.push_back(e);
  return out;
}

Rel letter_rel(const Adj& adj) {
  std::vector<Entry> es;
  for (uint32_t p = 0; p < adj.size(); ++p)
    for (auto [q, v] : adj[p]) es.push_back({p, q, v});
  return normalize(std::move(es));
}

Rel compose(const Rel& x, const Adj& y) {
  std::vector<Entry> es;
  for (const auto& [p, q, a] : x)
    for (auto [r, b] : y[q]) es.push_back({p, r, std::max(a, b)});
  return normalize(std::move(es));
}

Adj adjacency(const Rel& r, size_t n) {
  Adj a(n);
  for (const auto& e : r) a[e.p].push_back({e.q, e.v});
  return a;
}

bool idempotent(const Rel& e, size_t n) { return compose(e, adjacency(e, n)) == e; }

std::vector<char> post(const std::vector<char>& set, const Adj& adj) {
  std::vector<char> out(set.size(), 0);
  for (size_t p = 0; p < set.size(); ++p)
    if (set[p])
      for (auto [q, v] : adj[p]) out[q] = 1;
  return out;
}

// some state reached from `reach` through e lies on an accepting e-loop
bool loop_accepts(const std::vector<char>& reach, const Rel& e) {
  std::vector<char> hit(reach.size(), 0);
  for (const auto& x : e)
    if (reach[x.p]) hit[x.q] = 1;
  for (const auto& x : e)
    if (x.p == x.q && x.v == 2 && hit[x.q]) return true;
  return false;
}

std::vector<Symbol> unwind(const std::vector<std::pair<long, Symbol>>& parent, long i) {
  std::vector<Symbol> w;
  for (; i >= 0; i = parent[i].first) w.push_back(parent[i].second);
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace

Containment contains_ramsey(const Automaton& a, const Automaton& b, size_t max_profiles) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("contains: alphabet mismatch");
  const size_t na = a.states, nb = b.states;
  std::vector<Adj> adj_a, adj_b;
  for (Symbol s = 0; s < a.alphabet; ++s) {
    adj_a.push_back(letter_adj(a, s));
    adj_b.push_back(letter_adj(b, s));
  }
  // profiles of nonempty words; each remembers (parent profile, last letter).
  // Words with no run in a can never give a counterexample, nor can their extensions.
  std::unordered_map<Profile, size_t, ProfileHash> pid;
  std::vector<Profile> profs;
  std::vector<std::pair<long, Symbol>> parent;
  for (Symbol s = 0; s < a.alphabet; ++s) {
    Profile p{letter_rel(adj_a[s]), letter_rel(adj_b[s])};
    if (p.ra.empty() || !pid.emplace(p, profs.size()).second) continue;
    profs.push_back(std::move(p));
    parent.push_back({-1, s});
  }
  for (size_t i = 0; i < profs.size(); ++i) {
    for (Symbol s = 0; s < a.alphabet; ++s) {
      Rel ra = compose(profs[i].ra, adj_a[s]);
      if (ra.empty()) continue;
      Profile p{std::move(ra), compose(profs[i].rb, adj_b[s])};
      if (pid.count(p)) continue;
      if (profs.size() >= max_profiles) throw SizeGuard("profile monoid exceeds the cap");
      pid.emplace(p, profs.size());
      profs.push_back(std::move(p));
      parent.push_back({(long)i, s});
    }
  }
  // reachable initial-subset pairs, including the empty prefix
  using Reach = std::pair<std::vector<char>, std::vector<char>>;
  std::map<Reach, size_t> rid;
  std::vector<Reach> reach;
  std::vector<std::pair<long, Symbol>> rparent;
  Reach r0{std::vector<char>(na, 0), std::vector<char>(nb, 0)};
  for (State s : a.initial) r0.first[s] = 1;
  for (State s : b.initial) r0.second[s] = 1;
  rid[r0] = 0;
  reach.push_back(r0);
  for (size_t i = 0; i < reach.size(); ++i) {
    for (Symbol s = 0; s < a.alphabet; ++s) {
      Reach n2{post(reach[i].first, adj_a[s]), post(reach[i].second, adj_b[s])};
      if (std::none_of(n2.first.begin(), n2.first.end(), [](char c) { return c; }) || rid.count(n2)) continue;
      rid[n2] = reach.size();
      reach.push_back(std::move(n2));
      rparent.push_back({(long)i, s});
    }
  }
  auto prefix = [&](size_t i) {
    std::vector<Symbol> w;
    for (; i > 0; i = (size_t)rparent[i - 1].first) w.push_back(rparent[i - 1].second);
    std::reverse(w.begin(), w.end());
    return w;
  };
  Containment res;
  for (size_t i = 0; i < profs.size(); ++i) {
    const Profile& e = profs[i];
    if (!idempotent(e.ra, na) || !idempotent(e.rb, nb)) continue;
    for (size_t k = 0; k < reach.size(); ++k) {
      if (loop_accepts(reach[k].first, e.ra) && !loop_accepts(reach[k].second, e.rb)) {
        res.holds = false;
        res.counterexample = LassoWord{prefix(k), unwind(parent, (long)i)};
        return res;
      }
    }
  }
  return res;
}

StateAutomaton to_state_based(const Automaton& a) {
  StateAutomaton s;
  s.states = 2 * a.states;
  s.alphabet = a.alphabet;
  for (State q : a.initial) s.initial.push_back(2 * q);
  s.accepting.assign(s.states, false);
  for (State q = 0; q < a.states; ++q) s.accepting[2 * q + 1] = true;
  for (const auto& t : a.trans)
    for (int flag = 0; flag < 2; ++flag) s.trans.push_back({2 * t.from + flag, t.sym, 2 * t.to + (t.acc ? 1 : 0)});
  return s;
}

bool accepts_lasso(const StateAutomaton& a, const LassoWord& w) {
  check_word(a.alphabet, w);
  // visiting an accepting state infinitely often = entering one infinitely often
  return lasso_product(a.states, a.initial, a.trans, w,
                       [&](const Transition& t) { return (bool)a.accepting[t.to]; });
}

std::string dump(const Automaton& a) {
  auto sname = [&](State q) {
    return q < a.state_names.size() && !a.state_names[q].empty() ? a.state_names[q] : std::to_string(q);
  };
  auto yname = [&](Symbol s) {
    return s < a.symbol_names.size() && !a.symbol_names[s].empty() ? a.symbol_names[s] : std::to_string(s);
  };
  std::ostringstream o;
  o << "states: " << a.states << "\n";
  o << "alphabet: " << a.alphabet << "\n";
  o << "initial:";
  for (State q : a.initial) o << " " << sname(q);
  o << "\n";
  for (const auto& t : a.trans)
    o << sname(t.from) << " -" << yname(t.sym) << "-> " << sname(t.to) << (t.acc ? " *" : "") << "\n";
  return o.str();
}

std::string to_dot(const Automaton& a) {
  auto esc = [](std::string s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  auto sname = [&](State q) {
    return q < a.state_names.size() && !a.state_names[q].empty() ? a.state_names[q] : std::to_string(q);
  };
  auto yname = [&](Symbol s) {
    return s < a.symbol_names.size() && !a.symbol_names[s].empty() ? a.symbol_names[s] : std::to_string(s);
  };
  std::ostringstream o;
  o << "digraph buchi {\n  rankdir=LR;\n  init [shape=point];\n";
  for (State q = 0; q < a.states; ++q) o << "  s" << q << " [label=\"" << esc(sname(q)) << "\"];\n";
  for (State q : a.initial) o << "  init -> s" << q << ";\n";
  for (const auto& t : a.trans)
    o << "  s" << t.from << " -> s" << t.to << " [label=\"" << esc(yname(t.sym)) << "\""
      << (t.acc ? ", style=bold, color=red" : "") << "];\n";
  o << "}\n";
  return o.str();
}

}  // namespace hfl::buchi
