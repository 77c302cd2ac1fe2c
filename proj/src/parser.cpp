#include "aot/parser.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "aot/syntax_ops.hpp"

namespace aot {

namespace {

// ---------------------------------------------------------------------------
// lexer

enum class Tok {
  Ident, LParen, RParen, LBrack, RBrack, Backslash, Dot, Comma, Eq,
  Tilde, Arrow, Amp, Pipe, Iff, KwForall, KwExists, KwBox, KwDia, KwThe, End
};

struct Token {
  Tok kind;
  std::string text;
  int pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, size_t p) { out.push_back({k, std::move(t), (int)p}); };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c)) { ++i; continue; }
    size_t p = i;
    if (std::isalpha((unsigned char)c)) {
      size_t j = i;
      while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
      std::string word = s.substr(i, j - i);
      if (j < s.size() && s[j] == '!' && (word == "O" || word == "A")) {
        word += '!';
        ++j;
      }
      while (j < s.size() && s[j] == '\'') { word += '\''; ++j; }
      i = j;
      if (word == "forall") push(Tok::KwForall, word, p);
      else if (word == "exists") push(Tok::KwExists, word, p);
      else if (word == "box") push(Tok::KwBox, word, p);
      else if (word == "dia") push(Tok::KwDia, word, p);
      else if (word == "the") push(Tok::KwThe, word, p);
      else push(Tok::Ident, word, p);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, "(", p); ++i; break;
      case ')': push(Tok::RParen, ")", p); ++i; break;
      case '[': push(Tok::LBrack, "[", p); ++i; break;
      case ']': push(Tok::RBrack, "]", p); ++i; break;
      case '\\': push(Tok::Backslash, "\\", p); ++i; break;
      case '.': push(Tok::Dot, ".", p); ++i; break;
      case ',': push(Tok::Comma, ",", p); ++i; break;
      case '=': push(Tok::Eq, "=", p); ++i; break;
      case '~': push(Tok::Tilde, "~", p); ++i; break;
      case '&': push(Tok::Amp, "&", p); ++i; break;
      case '|': push(Tok::Pipe, "|", p); ++i; break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') { push(Tok::Arrow, "->", p); i += 2; break; }
        throw ParseError((int)p, "unexpected '-'");
      case '<':
        if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') { push(Tok::Iff, "<->", p); i += 3; break; }
        throw ParseError((int)p, "unexpected '<'");
      default:
        throw ParseError((int)p, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", (int)s.size()});
  return out;
}

bool upper_initial(const std::string& n) { return !n.empty() && std::isupper((unsigned char)n[0]); }

// ---------------------------------------------------------------------------
// raw parse tree (sorts unresolved until the whole formula is seen)

struct RForm;
struct RTerm;
using RFormP = std::shared_ptr<RForm>;
using RTermP = std::shared_ptr<RTerm>;

struct RTerm {
  enum K { Var, Lam, Desc } k;
  std::string name;   // Var
  std::string bound;  // Lam/Desc
  RFormP matrix;
  int pos = 0;
};

struct RForm {
  enum K { Apply, AtomVar, EncF, Id, Not, Box, Dia, Impl, And, Or, Iff, Forall, Exists } k;
  RTermP head;
  std::vector<RTermP> args;
  std::string name;
  RTermP subj, rel;
  RTermP t1, t2;
  RFormP a, b;
  std::string var;
  RFormP body;
  int pos = 0;
};

bool rel_side(const RTermP& t) {
  return t->k == RTerm::Lam || (t->k == RTerm::Var && upper_initial(t->name));
}

struct Parser {
  std::vector<Token> toks;
  size_t at = 0;

  const Token& peek(int k = 0) const { return toks[std::min(at + k, toks.size() - 1)]; }
  Token next() { return toks[at == toks.size() - 1 ? at : at++]; }
  bool accept(Tok k) {
    if (peek().kind == k) { next(); return true; }
    return false;
  }
  Token expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(peek().pos, std::string("expected ") + what);
    return next();
  }

  RFormP rf(RForm::K k, int pos) {
    auto f = std::make_shared<RForm>();
    f->k = k;
    f->pos = pos;
    return f;
  }

  RFormP parse_iff() {
    auto a = parse_impl();
    while (peek().kind == Tok::Iff) {
      int p = next().pos;
      auto f = rf(RForm::Iff, p);
      f->a = a;
      f->b = parse_impl();
      a = f;
    }
    return a;
  }

  RFormP parse_impl() {
    auto a = parse_or();
    if (peek().kind == Tok::Arrow) {
      int p = next().pos;
      auto f = rf(RForm::Impl, p);
      f->a = a;
      f->b = parse_impl();  // right-associative
      return f;
    }
    return a;
  }

  RFormP parse_or() {
    auto a = parse_and();
    while (peek().kind == Tok::Pipe) {
      int p = next().pos;
      auto f = rf(RForm::Or, p);
      f->a = a;
      f->b = parse_and();
      a = f;
    }
    return a;
  }

  RFormP parse_and() {
    auto a = parse_unary();
    while (peek().kind == Tok::Amp) {
      int p = next().pos;
      auto f = rf(RForm::And, p);
      f->a = a;
      f->b = parse_unary();
      a = f;
    }
    return a;
  }

  RFormP parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Tilde: { next(); auto f = rf(RForm::Not, t.pos); f->a = parse_unary(); return f; }
      case Tok::KwBox: { next(); auto f = rf(RForm::Box, t.pos); f->a = parse_unary(); return f; }
      case Tok::KwDia: { next(); auto f = rf(RForm::Dia, t.pos); f->a = parse_unary(); return f; }
      case Tok::KwForall:
      case Tok::KwExists: {
        next();
        Token v = expect(Tok::Ident, "a variable after the quantifier");
        expect(Tok::Dot, "'.' after the quantified variable");
        auto f = rf(t.kind == Tok::KwForall ? RForm::Forall : RForm::Exists, t.pos);
        f->var = v.text;
        f->body = parse_iff();  // scope extends to the end of the enclosing parenthesis
        return f;
      }
      default:
        return parse_atom();
    }
  }

  RTermP parse_any_term() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      next();
      auto r = std::make_shared<RTerm>();
      r->k = RTerm::Var;
      r->name = t.text;
      r->pos = t.pos;
      return r;
    }
    if (t.kind == Tok::LParen && peek(1).kind == Tok::KwThe) return parse_description();
    if (t.kind == Tok::LBrack) return parse_lambda();
    throw ParseError(t.pos, "expected a term");
  }

  RTermP parse_description() {
    Token lp = expect(Tok::LParen, "'('");
    expect(Tok::KwThe, "'the'");
    Token v = expect(Tok::Ident, "a variable after 'the'");
    if (upper_initial(v.text))
      throw ParseError(v.pos, "description variable must be an individual (lowercase)");
    expect(Tok::Dot, "'.' after the description variable");
    auto r = std::make_shared<RTerm>();
    r->k = RTerm::Desc;
    r->bound = v.text;
    r->pos = lp.pos;
    r->matrix = parse_iff();
    expect(Tok::RParen, "')' closing the description");
    return r;
  }

  RTermP parse_lambda() {
    Token lb = expect(Tok::LBrack, "'['");
    expect(Tok::Backslash, "'\\' after '['");
    Token v = expect(Tok::Ident, "a variable after '\\'");
    if (upper_initial(v.text))
      throw ParseError(v.pos, "lambda variable must be an individual (lowercase)");
    expect(Tok::Dot, "'.' after the lambda variable");
    auto r = std::make_shared<RTerm>();
    r->k = RTerm::Lam;
    r->bound = v.text;
    r->pos = lb.pos;
    r->matrix = parse_iff();
    expect(Tok::RBrack, "']' closing the lambda");
    return r;
  }

  RTermP parse_rel_term() {
    const Token& t = peek();
    if (t.kind == Tok::LBrack) return parse_lambda();
    if (t.kind == Tok::Ident) return parse_any_term();
    throw ParseError(t.pos, "expected a relation term");
  }

  RFormP finish_term(RTermP term) {
    const Token& t = peek();
    if (t.kind == Tok::LParen && term->k != RTerm::Desc) {
      next();
      auto f = rf(RForm::Apply, term->pos);
      f->head = term;
      f->args.push_back(parse_any_term());
      while (accept(Tok::Comma)) f->args.push_back(parse_any_term());
      expect(Tok::RParen, "')' closing the argument list");
      return f;
    }
    if (t.kind == Tok::Eq) {
      next();
      auto f = rf(RForm::Id, t.pos);
      f->t1 = term;
      f->t2 = rel_side(term) ? parse_rel_term() : parse_any_term();
      return f;
    }
    if (t.kind == Tok::LBrack && term->k != RTerm::Lam) {
      next();
      auto f = rf(RForm::EncF, t.pos);
      f->subj = term;
      f->rel = parse_rel_term();
      expect(Tok::RBrack, "']' closing the encoding");
      return f;
    }
    if (term->k == RTerm::Var && !upper_initial(term->name)) {
      auto f = rf(RForm::AtomVar, term->pos);
      f->name = term->name;
      return f;
    }
    throw ParseError(term->pos, term->k == RTerm::Desc
                                    ? "an individual term is not a formula"
                                    : "a relation term is not a formula");
  }

  RFormP parse_atom() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      if (peek(1).kind == Tok::KwThe) return finish_term(parse_description());
      next();
      auto f = parse_iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::LBrack) return finish_term(parse_lambda());
    if (t.kind == Tok::Ident) return finish_term(parse_any_term());
    throw ParseError(t.pos, "expected a formula");
  }
};

// ---------------------------------------------------------------------------
// sort and arity resolution
//
// Lexical rule: lowercase-initial names are individual variables, except that
// a name used only as a standalone atom is a 0-place relation variable;
// uppercase-initial names are relation variables with arity inferred from
// usage (default 1).

struct Entry {
  std::string name;
  bool upper = false;
  bool fixed_ind = false;  // lambda/description binders are individuals
  bool used_ind = false;
  bool used_atom = false;
  std::set<int> arities;
  int pos = -1;
  std::vector<Entry*> linked;  // identity partners for arity inference
};

struct Sort {
  bool is_rel = false;
  int arity = 1;
};

struct Resolver {
  std::vector<std::unique_ptr<Entry>> pool;
  std::vector<Entry*> scope;
  std::map<std::string, Entry*> free;
  std::map<const RForm*, Entry*> binders;

  Entry* make_entry(const std::string& n, int pos, bool fixed_ind) {
    pool.push_back(std::make_unique<Entry>());
    Entry* e = pool.back().get();
    e->name = n;
    e->upper = upper_initial(n);
    e->pos = pos;
    e->fixed_ind = fixed_ind;
    return e;
  }

  Entry* lookup(const std::string& n, int pos) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if ((*it)->name == n) return *it;
    auto it = free.find(n);
    if (it != free.end()) return it->second;
    Entry* e = make_entry(n, pos, false);
    free[n] = e;
    return e;
  }

  void use_ind(Entry* e, int pos) {
    if (e->upper)
      throw ParseError(pos, "relation variable '" + e->name + "' in individual position");
    e->used_ind = true;
  }

  void use_rel(Entry* e, int arity, int pos) {
    if (e->name == "O!" || e->name == "A!") {
      if (arity != 1) throw ParseError(pos, e->name + " is 1-place");
      return;
    }
    if (e->fixed_ind || (!e->upper && arity > 0))
      throw ParseError(pos, "individual variable '" + e->name + "' in relation position");
    if (!e->upper) { e->used_atom = true; return; }
    e->arities.insert(arity);
  }

  void walk(const RFormP& f) {
    switch (f->k) {
      case RForm::Apply:
        walk_rel(f->head, (int)f->args.size());
        for (auto& a : f->args) walk_ind(a);
        break;
      case RForm::AtomVar:
        use_rel(lookup(f->name, f->pos), 0, f->pos);
        break;
      case RForm::EncF:
        walk_ind(f->subj);
        walk_rel(f->rel, 1);
        break;
      case RForm::Id: {
        bool r1 = rel_side(f->t1), r2 = rel_side(f->t2);
        if (r1 != r2)
          throw ParseError(f->pos, "identity between an individual and a relation term");
        if (r1) {
          Entry* e1 = nullptr;
          Entry* e2 = nullptr;
          if (f->t1->k == RTerm::Var) e1 = lookup(f->t1->name, f->t1->pos);
          else walk_rel(f->t1, 1);
          if (f->t2->k == RTerm::Var) e2 = lookup(f->t2->name, f->t2->pos);
          else walk_rel(f->t2, 1);
          if (f->t1->k == RTerm::Lam && e2) e2->arities.insert(1);
          if (f->t2->k == RTerm::Lam && e1) e1->arities.insert(1);
          if (e1 && e2) { e1->linked.push_back(e2); e2->linked.push_back(e1); }
        } else {
          walk_ind(f->t1);
          walk_ind(f->t2);
        }
        break;
      }
      case RForm::Not: case RForm::Box: case RForm::Dia:
        walk(f->a);
        break;
      case RForm::Impl: case RForm::And: case RForm::Or: case RForm::Iff:
        walk(f->a);
        walk(f->b);
        break;
      case RForm::Forall:
      case RForm::Exists: {
        if (f->var == "O!" || f->var == "A!")
          throw ParseError(f->pos, "cannot bind the reserved predicate " + f->var);
        Entry* e = make_entry(f->var, f->pos, false);
        binders[f.get()] = e;
        scope.push_back(e);
        walk(f->body);
        scope.pop_back();
        break;
      }
    }
  }

  void walk_ind(const RTermP& t) {
    switch (t->k) {
      case RTerm::Var: use_ind(lookup(t->name, t->pos), t->pos); break;
      case RTerm::Lam: throw ParseError(t->pos, "relation term in individual position");
      case RTerm::Desc: {
        Entry* e = make_entry(t->bound, t->pos, true);
        scope.push_back(e);
        walk(t->matrix);
        scope.pop_back();
        break;
      }
    }
  }

  void walk_rel(const RTermP& t, int arity) {
    switch (t->k) {
      case RTerm::Var: use_rel(lookup(t->name, t->pos), arity, t->pos); break;
      case RTerm::Lam: {
        if (arity != 1) throw ParseError(t->pos, "lambda terms are 1-place");
        Entry* e = make_entry(t->bound, t->pos, true);
        scope.push_back(e);
        walk(t->matrix);
        scope.pop_back();
        break;
      }
      case RTerm::Desc: throw ParseError(t->pos, "individual term in relation position");
    }
  }
};

Sort resolve_entry(const Entry* e) {
  if (e->fixed_ind) return {false, 1};
  if (e->used_atom) {
    if (e->used_ind || !e->arities.empty())
      throw ParseError(e->pos, "'" + e->name + "' used both as a propositional atom and otherwise");
    return {true, 0};
  }
  if (e->used_ind) {
    if (!e->arities.empty())
      throw ParseError(e->pos, "'" + e->name + "' used both as individual and relation");
    return {false, 1};
  }
  if (!e->arities.empty()) {
    if (e->arities.size() > 1)
      throw ParseError(e->pos, "'" + e->name + "' used with conflicting arities");
    int n = *e->arities.begin();
    if (n > 2)
      throw ParseError(e->pos, "relation arity " + std::to_string(n) + " unsupported (0..2)");
    return {true, n};
  }
  if (e->upper) {
    for (auto* l : e->linked)
      if (!l->arities.empty()) return {true, *l->arities.begin()};
    return {true, 1};
  }
  return {false, 1};
}

// ---------------------------------------------------------------------------
// typed construction

struct Builder {
  std::map<const RForm*, Sort> binder_sorts;
  std::map<std::string, Sort> free_sorts;
  std::vector<std::pair<std::string, Sort>> scope;

  Sort sort_of(const std::string& n) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == n) return it->second;
    auto it = free_sorts.find(n);
    if (it != free_sorts.end()) return it->second;
    return {upper_initial(n), 1};
  }

  TermPtr term_ind(const RTermP& t) {
    switch (t->k) {
      case RTerm::Var: {
        Sort s = sort_of(t->name);
        if (s.is_rel)
          throw ParseError(t->pos, "relation variable '" + t->name + "' in individual position");
        return ind_var(t->name);
      }
      case RTerm::Desc: {
        scope.push_back({t->bound, {false, 1}});
        auto m = formula(t->matrix);
        scope.pop_back();
        return description(t->bound, m);
      }
      case RTerm::Lam:
        throw ParseError(t->pos, "relation term in individual position");
    }
    throw ParseError(t->pos, "bad term");
  }

  TermPtr term_rel(const RTermP& t) {
    switch (t->k) {
      case RTerm::Var: {
        if (t->name == "O!") return o_bang();
        if (t->name == "A!") return a_bang();
        Sort s = sort_of(t->name);
        if (!s.is_rel)
          throw ParseError(t->pos, "individual variable '" + t->name + "' in relation position");
        return rel_var(s.arity, t->name);
      }
      case RTerm::Lam: {
        scope.push_back({t->bound, {false, 1}});
        auto m = formula(t->matrix);
        scope.pop_back();
        return lambda(t->bound, m);
      }
      case RTerm::Desc:
        throw ParseError(t->pos, "individual term in relation position");
    }
    throw ParseError(t->pos, "bad term");
  }

  FormulaPtr formula(const RFormP& f) {
    switch (f->k) {
      case RForm::Apply: {
        auto head = term_rel(f->head);
        std::vector<TermPtr> args;
        for (auto& a : f->args) args.push_back(term_ind(a));
        try {
          return exe(head, std::move(args));
        } catch (const SortError& e) {
          throw ParseError(f->pos, e.what());
        }
      }
      case RForm::AtomVar:
        return exe(rel_var(0, f->name), {});
      case RForm::EncF:
        return enc(term_ind(f->subj), term_rel(f->rel));
      case RForm::Id: {
        if (rel_side(f->t1)) {
          auto a = term_rel(f->t1);
          auto b = term_rel(f->t2);
          int n1 = a->kind == TermKind::Lambda ? 1 : a->arity;
          int n2 = b->kind == TermKind::Lambda ? 1 : b->arity;
          if (n1 != n2)
            throw ParseError(f->pos, "identity between relations of different arity");
          return id_rel(n1, a, b);
        }
        return id_ind(term_ind(f->t1), term_ind(f->t2));
      }
      case RForm::Not: return f_not(formula(f->a));
      case RForm::Box: return box(formula(f->a));
      case RForm::Dia: return diamond(formula(f->a));
      case RForm::Impl: return impl(formula(f->a), formula(f->b));
      case RForm::And: return f_and(formula(f->a), formula(f->b));
      case RForm::Or: return f_or(formula(f->a), formula(f->b));
      case RForm::Iff: return equiv(formula(f->a), formula(f->b));
      case RForm::Forall:
      case RForm::Exists: {
        Sort s = binder_sorts.at(f.get());
        scope.push_back({f->var, s});
        auto body = formula(f->body);
        scope.pop_back();
        bool fa = f->k == RForm::Forall;
        if (s.is_rel)
          return fa ? forall_rel(s.arity, f->var, body) : exists_rel(s.arity, f->var, body);
        return fa ? forall_ind(f->var, body) : exists_ind(f->var, body);
      }
    }
    throw ParseError(f->pos, "bad formula");
  }
};

FormulaPtr build_typed(const RFormP& raw) {
  Resolver res;
  res.walk(raw);
  Builder b;
  for (auto& [node, entry] : res.binders) b.binder_sorts[node] = resolve_entry(entry);
  for (auto& [name, entry] : res.free) b.free_sorts[name] = resolve_entry(entry);
  return b.formula(raw);
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  Parser p{lex(text)};
  RFormP raw = p.parse_iff();
  if (p.peek().kind != Tok::End)
    throw ParseError(p.peek().pos, "trailing input after formula");
  return normalize_bound_names(build_typed(raw));
}

TermPtr parse_term(const std::string& text) {
  Parser p{lex(text)};
  const Token& t = p.peek();
  if (t.kind == Tok::LBrack) {
    // Resolve matrix sorts by parsing the term applied to a dummy argument.
    FormulaPtr wf = parse_formula(text + "(zdummyarg)");
    return wf->rel;
  }
  if (t.kind == Tok::LParen && p.peek(1).kind == Tok::KwThe) {
    FormulaPtr wf = parse_formula(text + " = zdummyarg");
    return wf->t1;
  }
  if (t.kind == Tok::Ident) {
    Token tok = p.next();
    if (p.peek().kind != Tok::End)
      throw ParseError(p.peek().pos, "trailing input after term");
    if (tok.text == "O!") return o_bang();
    if (tok.text == "A!") return a_bang();
    if (upper_initial(tok.text)) return rel_var(1, tok.text);
    return ind_var(tok.text);
  }
  throw ParseError(t.pos, "expected a term");
}

}  // namespace aot
