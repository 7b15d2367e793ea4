#include "hfl/parser.hpp"

#include <cctype>
#include <cstring>

namespace hfl {

namespace {

enum class Tok { Ident, Num, LParen, RParen, Lambda, Dot, Colon, Arrow, Eq, Or, And, Turnstile, Comma, Bar,
                 LBrace, RBrace, End };

struct Token {
  Tok kind;
  std::string text;
  size_t pos;
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto starts = [&](const char* lit) { return s.compare(i, std::strlen(lit), lit) == 0; };
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) { ++i; continue; }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    size_t p = i;
    struct Sym { const char* lit; Tok kind; };
    static const Sym syms[] = {
        {"|-", Tok::Turnstile}, {"\xE2\x8A\xA2", Tok::Turnstile},  // ⊢
        {"\\/", Tok::Or},       {"\xE2\x88\xA8", Tok::Or},         // ∨
        {"/\\", Tok::And},      {"\xE2\x88\xA7", Tok::And},        // ∧
        {"->", Tok::Arrow},     {"\xE2\x86\x92", Tok::Arrow},      // →
        {"\\", Tok::Lambda},    {"\xCE\xBB", Tok::Lambda},         // λ
        {"(", Tok::LParen},     {")", Tok::RParen},  {".", Tok::Dot},  {":", Tok::Colon},
        {"=", Tok::Eq},         {",", Tok::Comma},   {"|", Tok::Bar},  {"{", Tok::LBrace},
        {"}", Tok::RBrace},
    };
    bool matched = false;
    for (const auto& sym : syms) {
      if (starts(sym.lit)) {
        out.push_back({sym.kind, sym.lit, p});
        i += std::strlen(sym.lit);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (starts("\xCE\xBC")) { out.push_back({Tok::Ident, "mu", p}); i += 2; continue; }  // μ
    if (starts("\xCE\xBD")) { out.push_back({Tok::Ident, "nu", p}); i += 2; continue; }  // ν
    if (starts("\xCE\xA9")) { out.push_back({Tok::Ident, "O", p}); i += 2; continue; }   // Ω
    if (std::isdigit(c)) {
      while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
      out.push_back({Tok::Num, s.substr(p, i - p), p});
      continue;
    }
    if (ident_start(c)) {
      while (i < s.size() && ident_char((unsigned char)s[i])) ++i;
      out.push_back({Tok::Ident, s.substr(p, i - p), p});
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + (char)c + "'", p);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t k = 0;
  const ParseContext& ctx;
  TypeEnv extra;  // declarations from a sequent prefix
  std::vector<std::pair<std::string, TypeP>> scope;

  const Token& peek(size_t ahead = 0) const { return toks[std::min(k + ahead, toks.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_ident(const char* s) const { return at(Tok::Ident) && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().pos); }
  const Token& expect(Tok t, const char* what) {
    if (!at(t)) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
    return toks[k++];
  }

  static bool keyword(const std::string& s) { return s == "mu" || s == "nu" || s == "Z" || s == "S"; }

  // ------------------------------------------------------------ types
  TypeP type() {
    TypeP a;
    if (at(Tok::LParen)) {
      ++k;
      a = type();
      expect(Tok::RParen, "')'");
    } else if (at_ident("N")) {
      ++k;
      a = nat_type();
    } else if (at_ident("O")) {
      ++k;
      a = prop_type();
    } else {
      fail("expected a type");
    }
    if (at(Tok::Arrow)) {
      size_t p = peek().pos;
      ++k;
      TypeP r = type();
      if (r->kind == Type::Kind::Nat) throw SyntaxError("arrow result may not be N", p);
      return arrow_type(a, r);
    }
    return a;
  }

  // ------------------------------------------------------------ names
  std::optional<TypeP> lookup(const std::string& x) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == x) return it->second;
    if (auto it = extra.find(x); it != extra.end()) return it->second;
    if (auto it = ctx.env.find(x); it != ctx.env.end()) return it->second;
    return std::nullopt;
  }

  Term to_term(const Arg& a, size_t pos) const {
    if (a.is_term()) return *a.term;
    if (a.formula->kind == FKind::Var && !lookup(a.formula->name)) return Term::variable(a.formula->name);
    throw SyntaxError("expected a term, found formula " + to_string(a.formula), pos);
  }

  // ------------------------------------------------------- formulas
  Arg expr() { return disj(); }

  Arg disj() {
    size_t p = peek().pos;
    Arg a = conj();
    while (at(Tok::Or)) {
      ++k;
      Arg b = conj();
      a = Arg::of(mk_or(formula_of(a, p), formula_of(b, p)));
    }
    return a;
  }

  Arg conj() {
    size_t p = peek().pos;
    Arg a = eqx();
    while (at(Tok::And)) {
      ++k;
      Arg b = eqx();
      a = Arg::of(mk_and(formula_of(a, p), formula_of(b, p)));
    }
    return a;
  }

  FPtr formula_of(const Arg& a, size_t pos) const {
    if (a.is_term()) throw SyntaxError("expected a formula, found term " + term_str(*a.term), pos);
    return a.formula;
  }

  Arg eqx() {
    size_t p = peek().pos;
    Arg a = app();
    if (at(Tok::Eq)) {
      ++k;
      size_t q = peek().pos;
      Arg b = app();
      return Arg::of(mk_eq(to_term(a, p), to_term(b, q)));
    }
    return a;
  }

  bool atom_start() const {
    if (at(Tok::LParen) || at(Tok::Num)) return true;
    return at(Tok::Ident) && peek().text != "mu" && peek().text != "nu";
  }

  bool binder_start() const { return at(Tok::Lambda) || at_ident("mu") || at_ident("nu"); }

  Arg app() {
    if (binder_start()) return binder();
    size_t p = peek().pos;
    Arg f = atom();
    while (atom_start() || binder_start()) {
      size_t q = peek().pos;
      Arg a = binder_start() ? binder() : atom();
      if (f.is_term()) throw SyntaxError("a term cannot be applied", p);
      f = a.is_term() ? Arg::of(mk_app(f.formula, *a.term)) : Arg::of(mk_app(f.formula, a.formula));
      (void)q;
    }
    return f;
  }

  Arg binder() {
    FKind kind = at(Tok::Lambda) ? FKind::Lam : at_ident("mu") ? FKind::Mu : FKind::Nu;
    ++k;
    long ann = 0;
    if (at(Tok::LBrace)) {
      ++k;
      ann = std::stol(expect(Tok::Num, "annotation number").text);
      expect(Tok::RBrace, "'}'");
      if (kind == FKind::Lam) fail("annotation on lambda");
    }
    const Token& x = expect(Tok::Ident, "binder name");
    if (keyword(x.text)) throw SyntaxError("keyword used as binder name", x.pos);
    expect(Tok::Colon, "':'");
    size_t tp = peek().pos;
    TypeP t = type();
    if (kind != FKind::Lam && t->kind == Type::Kind::Nat)
      throw SyntaxError("fixpoint binder may not have type N", tp);
    expect(Tok::Dot, "'.'");
    scope.emplace_back(x.text, t);
    size_t bp = peek().pos;
    Arg body = expr();
    scope.pop_back();
    FPtr b = formula_of(body, bp);
    FPtr r = kind == FKind::Lam ? mk_lam(x.text, t, b) : mk_fix(kind, x.text, t, b, ann);
    return Arg::of(r);
  }

  Arg atom() {
    const Token& tk = peek();
    if (tk.kind == Tok::Num) {
      ++k;
      return Arg::of(Term::numeral((unsigned)std::stoul(tk.text)));
    }
    if (tk.kind == Tok::LParen) {
      ++k;
      Arg a = expr();
      expect(Tok::RParen, "')'");
      return a;
    }
    if (tk.kind != Tok::Ident) fail("expected a formula or term, found '" + tk.text + "'");
    ++k;
    if (tk.text == "Z") return Arg::of(Term::zero());
    if (tk.text == "S") {
      size_t p = peek().pos;
      Arg a = atom();
      return Arg::of(to_term(a, p).plus(1));
    }
    auto ty = lookup(tk.text);
    if (ty && (*ty)->kind == Type::Kind::Nat) return Arg::of(Term::variable(tk.text));
    if (!ty && ctx.defs) {
      auto it = ctx.defs->find(tk.text);
      if (it != ctx.defs->end()) {
        for (const auto& v : free_vars(it->second))
          for (const auto& [b, _] : scope)
            if (b == v)
              throw SyntaxError("definition " + tk.text + " would capture bound " + v, tk.pos);
        return Arg::of(it->second);
      }
    }
    return Arg::of(mk_var(tk.text));
  }

  // ------------------------------------------------------- sequents
  TypeEnv decls(Tok stop) {
    TypeEnv env;
    while (!at(stop) && !at(Tok::End)) {
      const Token& x = expect(Tok::Ident, "variable name");
      expect(Tok::Colon, "':'");
      env[x.text] = type();
      if (!at(stop)) expect(Tok::Comma, "','");
    }
    return env;
  }

  std::vector<FPtr> formula_list(Tok stop) {
    std::vector<FPtr> out;
    if (at(Tok::LBrace) && peek(1).kind == Tok::RBrace) { k += 2; return out; }
    while (!at(stop) && !at(Tok::End)) {
      size_t p = peek().pos;
      out.push_back(formula_of(expr(), p));
      if (!at(stop) && !at(Tok::End)) expect(Tok::Comma, "','");
    }
    return out;
  }

  bool has_decl_prefix() const {
    for (size_t i = k; i < toks.size(); ++i) {
      if (toks[i].kind == Tok::Bar) return true;
      if (toks[i].kind == Tok::Turnstile) return false;
    }
    return false;
  }
};

}  // namespace

TypeP parse_type(const std::string& text) {
  ParseContext ctx;
  Parser p{lex(text), 0, ctx, {}, {}};
  TypeP t = p.type();
  if (!p.at(Tok::End)) p.fail("trailing input after type");
  return t;
}

Arg parse_expr(const std::string& text, const ParseContext& ctx) {
  Parser p{lex(text), 0, ctx, {}, {}};
  Arg a = p.expr();
  if (!p.at(Tok::End)) p.fail("trailing input '" + p.peek().text + "'");
  return a;
}

FPtr parse_formula(const std::string& text, const ParseContext& ctx) {
  Arg a = parse_expr(text, ctx);
  if (a.is_term()) throw SyntaxError("expected a formula, found a term", 0);
  return a.formula;
}

Term parse_term(const std::string& text, const ParseContext& ctx) {
  Arg a = parse_expr(text, ctx);
  if (a.is_term()) return *a.term;
  if (a.formula->kind == FKind::Var) return Term::variable(a.formula->name);
  throw SyntaxError("expected a term", 0);
}

TypeEnv parse_decls(const std::string& text) {
  ParseContext ctx;
  Parser p{lex(text), 0, ctx, {}, {}};
  TypeEnv env = p.decls(Tok::End);
  return env;
}

ParsedSequent parse_sequent(const std::string& text, const ParseContext& ctx) {
  Parser p{lex(text), 0, ctx, {}, {}};
  ParsedSequent out;
  if (p.has_decl_prefix()) {
    p.extra = p.decls(Tok::Bar);
    p.expect(Tok::Bar, "'|'");
  }
  out.seq.left = p.formula_list(Tok::Turnstile);
  p.expect(Tok::Turnstile, "'|-'");
  out.seq.right = p.formula_list(Tok::End);
  if (!p.at(Tok::End)) p.fail("trailing input");
  out.env = ctx.env;
  for (const auto& [x, t] : p.extra) out.env[x] = t;
  return out;
}

Parsed parse(const std::string& text, const ParseContext& ctx) {
  for (const auto& t : lex(text))
    if (t.kind == Tok::Turnstile) return parse_sequent(text, ctx).seq;
  Arg a = parse_expr(text, ctx);
  if (a.is_term()) return *a.term;
  return a.formula;
}

}  // namespace hfl
