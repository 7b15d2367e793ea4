#pragma once

#include <string>

#include "hfl/parser.hpp"
#include "hfl/syntax.hpp"

namespace hfl::enc {

FPtr top();                        // nu x:O. x
FPtr bot();                        // mu x:O. x
FPtr top_t(const TypeP& t);        // nu x:T. x
FPtr bot_t(const TypeP& t);        // mu x:T. x
FPtr forall_pred();                // nu X. \p. \x. p x /\ X p (S x)   : (N->O)->N->O
FPtr sum_pred();                   // the inductive summation predicate : N->N->N->O
FPtr nat_pred();                   // the numeral predicate N : N->O
FPtr leq_pred();                   // mu Y. \n.\m. n = m \/ Y (S n) m : N->N->O
FPtr lt_pred();                    // mu X. \y. (S y = t) \/ X (S y), t abstracted: N->N->O

FPtr exists_n(const std::string& x, const FPtr& body);  // (mu E. \y. body[y/x] \/ E (S y)) Z
FPtr forall_n(const std::string& x, const FPtr& body);  // (nu A. \y. body[y/x] /\ A (S y)) Z
// non-N quantifiers: (\x. body) top_T  /  (\x. body) bot_T
FPtr exists_t(const std::string& x, const TypeP& t, const FPtr& body);
FPtr forall_t(const std::string& x, const TypeP& t, const FPtr& body);

// the existential body predicate E_φ := mu E. \y. φ[y/x] \/ E (S y)
FPtr exists_pred(const std::string& x, const FPtr& body);
// its dual A_φ := nu A. \y. φ[y/x] /\ A (S y)
FPtr forall_pred_of(const std::string& x, const FPtr& body);

FPtr lt(const Term& s, const Term& t);
FPtr neq(const Term& s, const Term& t);
FPtr leq(const Term& s, const Term& t);
FPtr nat(const Term& t);
FPtr sum(const Term& a, const Term& b, const Term& c);

// Recognizers for the quantifier encodings above.
struct Quant {
  bool exists;
  std::string var;
  TypeP type;
  FPtr body;
};
std::optional<Quant> match_quant(const FPtr& f);

// Library by name: top, bot, top_T, bot_T (need t), forall, sum, lt, leq, N.
FPtr encoding(const std::string& name, const TypeP& t = nullptr);
// Definitions table usable by the parser and printer.
Defs standard_defs();

}  // namespace hfl::enc
