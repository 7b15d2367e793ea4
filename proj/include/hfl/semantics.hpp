#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hfl/syntax.hpp"

namespace hfl::sem {

struct Value;
using V = std::shared_ptr<const Value>;

class Evaluator;

struct FunImpl {
  TypeP type;  // arrow type of this function
  explicit FunImpl(TypeP t) : type(std::move(t)) {}
  virtual ~FunImpl() = default;
  // arg is never the overflow marker; Evaluator::apply handles that case
  virtual V apply(const V& arg, Evaluator& ev) const = 0;
};

struct Value {
  enum class Kind { Bool, Nat, Fun } kind;
  bool b = false;
  unsigned n = 0;  // kOverflow when a successor left {0..K}
  std::shared_ptr<const FunImpl> fn;
};

inline constexpr unsigned kOverflow = ~0u;

V bool_val(bool b);
V nat_val(unsigned n);

struct Config {
  unsigned K = 8;                       // naturals truncated to {0..K}
  size_t max_domain = size_t(1) << 16;  // enumerated arrow domains
  size_t max_valuations = size_t(1) << 16;
  size_t max_steps = 50'000'000;        // evaluation budget per run
};

enum class Truth { False, True, Unknown };
std::string truth_str(Truth t);

using Valuation = std::map<std::string, V>;

struct DomainTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite lattices of the truncated domain. Shared by both evaluation modes.
class Domains {
 public:
  explicit Domains(Config cfg) : cfg_(cfg) {}
  const Config& config() const { return cfg_; }
  // every element of [[T]] (monotone functions for arrows); throws DomainTooLarge
  const std::vector<V>& elements(const TypeP& t);
  // function value from a total table over elements(arg type)
  V make_table(const TypeP& arrow, std::vector<V> table);
  // index of v inside elements(t)
  size_t index_of(const V& v, const TypeP& t, Evaluator& ev);
  std::string key(const V& v, const TypeP& t, Evaluator& ev);
  bool leq(const V& a, const V& b, const TypeP& t, Evaluator& ev);
  V bottom(const TypeP& t);
  V top(const TypeP& t);

 private:
  Config cfg_;
  std::map<std::string, std::vector<V>> elems_;
  std::map<std::string, std::map<std::string, size_t>> index_;
  std::map<std::string, V> bottoms_, tops_;
};

struct EvalEnv;
using EnvP = std::shared_ptr<const EvalEnv>;
struct EvalEnv {
  std::string name;
  V val;
  EnvP next;
};

// One evaluation mode. Lower: anything past K is read as false; upper: as true.
class Evaluator {
 public:
  Evaluator(Domains& d, bool upper, bool approximants = false)
      : dom(d), upper(upper), approximants(approximants) {}
  Domains& dom;
  const bool upper;
  const bool approximants;  // read ann = alpha+1 on fixpoints as mu^alpha / nu^alpha
  bool overflow_seen = false;
  size_t steps = 0;
  // approximant iteration strategy: false = general join/meet over beta < alpha,
  // true = chain shortcut
  bool chain_shortcut = false;

  V eval(const FPtr& f, const EnvP& env);
  V eval(const FPtr& f, const Valuation& rho);
  V apply(const V& fn, const V& arg);
  V extreme(const TypeP& t) { return upper ? dom.top(t) : dom.bottom(t); }
  // tabulate any function value of type t into a table value
  V tabulate(const V& v, const TypeP& t);
  void tick();

 private:
  unsigned eval_term(const Term& t, const EnvP& env);
  V eval_approx_fix(const FPtr& f, const EnvP& env);
};

// Both modes; Unknown when they disagree.
class Oracle {
 public:
  explicit Oracle(Config cfg = {}) : dom_(cfg) {}
  Domains& domains() { return dom_; }
  const Config& config() const { return dom_.config(); }

  Truth eval(const FPtr& phi, const Valuation& rho = {});
  // formulas whose fixpoints carry approximants in ann (alpha + 1)
  Truth eval_approx(const FPtr& phi, const Valuation& rho = {}, bool chain_shortcut = false);
  // single mode, for property tests
  bool eval_mode(const FPtr& phi, const Valuation& rho, bool upper, bool* overflow = nullptr);

  struct Validity {
    enum class Verdict { Valid, Invalid, Unknown } verdict;
    Valuation witness;
    std::string reason;
  };
  Validity check_validity(const TypeEnv& env, const Sequent& seq);

 private:
  Domains dom_;
};

std::string verdict_str(Oracle::Validity::Verdict v);
std::string value_str(const V& v, const TypeP& t, Domains& d);

}  // namespace hfl::sem
