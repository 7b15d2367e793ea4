#pragma once

#include <map>
#include <string>
#include <variant>

#include "hfl/syntax.hpp"

namespace hfl {

// Named closed (or globally scoped) formulas usable by name inside formula text.
using Defs = std::map<std::string, FPtr>;

struct ParseContext {
  TypeEnv env;  // free variables; N-typed ones parse as terms
  const Defs* defs = nullptr;
};

TypeP parse_type(const std::string& text);
// Either a formula or a term, depending on what the text denotes.
Arg parse_expr(const std::string& text, const ParseContext& ctx = {});
FPtr parse_formula(const std::string& text, const ParseContext& ctx = {});
Term parse_term(const std::string& text, const ParseContext& ctx = {});

// "x:T, y:T | Γ |- Δ" ; the optional declaration prefix extends ctx.env.
struct ParsedSequent {
  TypeEnv env;
  Sequent seq;
};
ParsedSequent parse_sequent(const std::string& text, const ParseContext& ctx = {});
// declaration list "x:T, y:T" (possibly empty)
TypeEnv parse_decls(const std::string& text);

using Parsed = std::variant<FPtr, Term, Sequent>;
// Sequent if the text contains a turnstile, otherwise formula or term.
Parsed parse(const std::string& text, const ParseContext& ctx = {});

}  // namespace hfl
