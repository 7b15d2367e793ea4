#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfl {

// ---------------------------------------------------------------- types

struct Type;
using TypeP = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Nat, Prop, Arrow };
  Kind kind;
  TypeP arg, res;
};

TypeP nat_type();
TypeP prop_type();
// throws TypeError when res is N
TypeP arrow_type(TypeP arg, TypeP res);
bool type_eq(const TypeP& a, const TypeP& b);
std::string type_str(const TypeP& t);
// argument types of T = A1 -> ... -> An -> O
std::vector<TypeP> arg_types(const TypeP& t);

// ---------------------------------------------------------------- terms

// S^succ(var) or S^succ(Z) when var is empty.
struct Term {
  std::string var;
  unsigned succ = 0;

  static Term zero() { return {}; }
  static Term numeral(unsigned n) { return {"", n}; }
  static Term variable(std::string v, unsigned n = 0) { return {std::move(v), n}; }
  bool closed() const { return var.empty(); }
  Term plus(unsigned k) const { return {var, succ + k}; }
  bool operator==(const Term& o) const { return var == o.var && succ == o.succ; }
  bool operator!=(const Term& o) const { return !(*this == o); }
};

std::string term_str(const Term& t);

// ------------------------------------------------------------- formulas

struct Formula;
using FPtr = std::shared_ptr<const Formula>;

enum class FKind { Eq, Or, And, Var, Lam, App, Mu, Nu };

struct Formula {
  FKind kind;
  std::string name;  // Var name, binder name
  TypeP type;        // binder type
  FPtr lhs, rhs;     // Or/And operands; Lam/Mu/Nu body in lhs; App fun in lhs, formula arg in rhs
  Term t1, t2;       // Eq sides; App term argument in t1
  bool term_arg = false;
  // Fixpoint operators only: trace label id, gtc mark, or approximant index + 1.
  // Zero means "none". Ignored by alpha-equivalence unless asked for.
  long ann = 0;
};

FPtr mk_eq(Term s, Term t);
FPtr mk_or(FPtr a, FPtr b);
FPtr mk_and(FPtr a, FPtr b);
FPtr mk_var(std::string x);
FPtr mk_lam(std::string x, TypeP t, FPtr body);
FPtr mk_mu(std::string x, TypeP t, FPtr body, long ann = 0);
FPtr mk_nu(std::string x, TypeP t, FPtr body, long ann = 0);
FPtr mk_fix(FKind k, std::string x, TypeP t, FPtr body, long ann = 0);
FPtr mk_app(FPtr f, FPtr arg);
FPtr mk_app(FPtr f, Term arg);
FPtr with_ann(const FPtr& f, long ann);

inline bool is_fix(FKind k) { return k == FKind::Mu || k == FKind::Nu; }
inline bool is_binder(FKind k) { return k == FKind::Lam || is_fix(k); }

// Either a formula or a term; the argument of App and of substitution.
struct Arg {
  FPtr formula;
  std::optional<Term> term;
  static Arg of(FPtr f) { return {std::move(f), std::nullopt}; }
  static Arg of(Term t) { return {nullptr, std::move(t)}; }
  bool is_term() const { return term.has_value(); }
};

// head applied to arguments, outermost last
struct Spine {
  FPtr head;
  std::vector<Arg> args;
};
Spine spine(const FPtr& f);
FPtr apply_args(FPtr head, const std::vector<Arg>& args);

// ------------------------------------------------------------- errors

struct SyntaxError : std::runtime_error {
  size_t pos;
  SyntaxError(const std::string& m, size_t p)
      : std::runtime_error(m + " at offset " + std::to_string(p)), pos(p) {}
};

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnboundVariable : TypeError {
  std::string name;
  explicit UnboundVariable(const std::string& n) : TypeError("unbound variable " + n), name(n) {}
};

struct IllTyped : TypeError {
  std::string subterm, expected, found;
  IllTyped(std::string s, std::string e, std::string f)
      : TypeError("ill-typed " + s + ": expected " + e + ", found " + f),
        subterm(std::move(s)), expected(std::move(e)), found(std::move(f)) {}
};

// ------------------------------------------------------ free variables

using TypeEnv = std::map<std::string, TypeP>;

std::set<std::string> free_vars(const FPtr& f);
std::set<std::string> free_vars(const Term& t);
bool occurs_free(const FPtr& f, const std::string& x);
// number of free occurrences of x (as formula variable or inside terms)
size_t count_free(const FPtr& f, const std::string& x);

// ------------------------------------------------------- substitution

std::string fresh_name(const std::string& base);

using Subst = std::map<std::string, Arg>;
Term subst_term(const Term& t, const Subst& s);
FPtr substitute(const FPtr& f, const Subst& s);
FPtr substitute(const FPtr& f, const std::string& x, const Arg& a);
// Typed variant: checks that arg has the type of x under env (env must bind x).
FPtr substitute_checked(const TypeEnv& env, const FPtr& f, const std::string& x, const Arg& a);

// (σx.ψ) args  ->  ψ[σx.ψ/x] args ; throws if head is not a fixpoint
FPtr unfold(const FPtr& f);
// (λx.ψ) a args -> ψ[a/x] args ; throws if not a β-redex at the head
FPtr beta_head(const FPtr& f);

// ---------------------------------------------------- alpha-equivalence

bool alpha_eq(const FPtr& a, const FPtr& b, bool with_ann = false);
// canonical de Bruijn rendering; equal strings <=> alpha-equivalent
std::string canon(const FPtr& f, bool with_ann = false);
size_t size(const FPtr& f);
size_t count_fix(const FPtr& f);

// -------------------------------------------------------------- typing

TypeP infer_type(const TypeEnv& env, const FPtr& f);
void check_prop(const TypeEnv& env, const FPtr& f);
TypeP infer_arg_type(const TypeEnv& env, const Arg& a);

// ------------------------------------------------------------ sequents

struct Sequent {
  std::vector<FPtr> left, right;
};

bool seq_alpha_eq(const Sequent& a, const Sequent& b, bool with_ann = false);
std::set<std::string> free_vars(const Sequent& s);
Sequent substitute(const Sequent& s, const Subst& sub);
void check_sequent(const TypeEnv& env, const Sequent& s);

// ------------------------------------------------------------- printing

// Definitions printed by name when a subformula is alpha-equivalent to them.
using DefTable = std::vector<std::pair<std::string, FPtr>>;

std::string to_string(const FPtr& f, const DefTable* defs = nullptr);
std::string to_string(const Sequent& s, const DefTable* defs = nullptr);
std::string to_string(const Arg& a, const DefTable* defs = nullptr);

// every fixpoint printed as mu_<label(ann)> / nu_<label(ann)>
using AnnLabel = std::function<std::string(long)>;
std::string to_string_annotated(const FPtr& f, const AnnLabel& label);

// strip every annotation
FPtr strip(const FPtr& f);

}  // namespace hfl
