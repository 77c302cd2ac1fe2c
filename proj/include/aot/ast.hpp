#pragma once

// Object-language AST: sorted terms (individual / n-place relation) and
// formulas with two predication modes (exemplification and encoding).
// Nodes are immutable after construction and shared freely across threads.

#include <memory>
#include <string>
#include <vector>
#include <stdexcept>
#include <cstdint>

namespace aot {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

struct SortError : std::runtime_error {
  explicit SortError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class TermKind {
  IndVar,       // individual variable (lowercase)
  RelVar,       // n-place relation variable (uppercase; n=0 lowercase atoms)
  Lambda,       // [\x. phi], 1-place relation term
  Description,  // (the y. phi), individual term
};

struct Term {
  TermKind kind;
  std::string name;   // IndVar, RelVar
  int arity = 1;      // RelVar only
  std::string bound;  // Lambda / Description bound variable
  FormulaPtr matrix;  // Lambda / Description

  bool is_individual() const {
    return kind == TermKind::IndVar || kind == TermKind::Description;
  }
  bool is_relation() const { return !is_individual(); }
  // O! and A! are reserved relation constants, present in every context.
  bool is_rel_const() const {
    return kind == TermKind::RelVar && (name == "O!" || name == "A!");
  }
};

TermPtr ind_var(std::string name);
TermPtr rel_var(int arity, std::string name);
TermPtr lambda(std::string bound, FormulaPtr matrix);
TermPtr description(std::string bound, FormulaPtr matrix);
TermPtr o_bang();
TermPtr a_bang();

enum class FormulaKind {
  Exe,      // rel + args (0..2 individual terms)
  Enc,      // subject[rel]
  Not, Box, Diamond,          // unary: a
  Impl, And, Or, Equiv,       // binary: a, b
  ForallInd, ExistsInd,       // var + body
  ForallRel, ExistsRel,       // var + var_arity + body
  IdInd,                      // t1 = t2 (individual terms)
  IdRel,                      // T1 = T2 (relation terms, id_arity)
};

struct Formula {
  FormulaKind kind;
  TermPtr rel;                 // Exe, Enc
  std::vector<TermPtr> args;   // Exe
  TermPtr subject;             // Enc
  FormulaPtr a, b;             // connectives
  std::string var;             // quantifiers
  int var_arity = 1;           // ForallRel/ExistsRel
  FormulaPtr body;             // quantifiers
  TermPtr t1, t2;              // identities
  int id_arity = 1;            // IdRel

  bool is_core() const;  // built from {Not, Impl, Box, ForallInd, ForallRel, Exe, Enc}
};

FormulaPtr exe(TermPtr rel, std::vector<TermPtr> args);
FormulaPtr enc(TermPtr subject, TermPtr rel);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr impl(FormulaPtr a, FormulaPtr b);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr equiv(FormulaPtr a, FormulaPtr b);
FormulaPtr box(FormulaPtr a);
FormulaPtr diamond(FormulaPtr a);
FormulaPtr forall_ind(std::string v, FormulaPtr body);
FormulaPtr exists_ind(std::string v, FormulaPtr body);
FormulaPtr forall_rel(int arity, std::string v, FormulaPtr body);
FormulaPtr exists_rel(int arity, std::string v, FormulaPtr body);
FormulaPtr id_ind(TermPtr t1, TermPtr t2);
FormulaPtr id_rel(int arity, TermPtr t1, TermPtr t2);

// A free variable reference; sort and arity disambiguate name reuse.
struct VarRef {
  std::string name;
  bool is_rel = false;
  int arity = 1;

  bool operator==(const VarRef& o) const {
    return name == o.name && is_rel == o.is_rel && (!is_rel || arity == o.arity);
  }
  bool operator<(const VarRef& o) const {
    if (name != o.name) return name < o.name;
    if (is_rel != o.is_rel) return is_rel < o.is_rel;
    return arity < o.arity;
  }
};

std::vector<VarRef> free_vars(const FormulaPtr& f);
std::vector<VarRef> free_vars(const TermPtr& t);
bool is_free_in(const FormulaPtr& f, const std::string& name, bool is_rel);

// Structural equality (exact bound-variable names).
bool struct_equal(const FormulaPtr& a, const FormulaPtr& b);
bool struct_equal(const TermPtr& a, const TermPtr& b);

// Equality up to renaming of bound variables.
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);
bool alpha_equal(const TermPtr& a, const TermPtr& b);

// First name in {base, base', base'', ...} avoiding `used`.
std::string fresh_name(const std::string& base, const std::vector<std::string>& used);

}  // namespace aot
