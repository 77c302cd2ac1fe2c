#include "aot/printer.hpp"

#include <sstream>

namespace aot {

namespace {

// Precedence levels, loosest to tightest. Quantifiers print at level 0 and
// extend to the end of the enclosing parenthesis, so any tighter context
// wraps them in parens.
enum Level { L_QUANT = 0, L_IFF = 1, L_IMPL = 2, L_OR = 3, L_AND = 4, L_PREFIX = 5, L_ATOM = 6 };

void pr(std::ostream& os, const FormulaPtr& f, int ctx);

void pr_term(std::ostream& os, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::IndVar:
    case TermKind::RelVar:
      os << t->name;
      break;
    case TermKind::Lambda:
      os << "[\\" << t->bound << ". ";
      pr(os, t->matrix, L_QUANT);
      os << "]";
      break;
    case TermKind::Description:
      os << "(the " << t->bound << ". ";
      pr(os, t->matrix, L_QUANT);
      os << ")";
      break;
  }
}

void pr(std::ostream& os, const FormulaPtr& f, int ctx) {
  auto wrap = [&](int mine, auto&& body) {
    if (mine < ctx) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (f->kind) {
    case FormulaKind::Exe:
      pr_term(os, f->rel);
      if (!f->args.empty()) {
        os << "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
          if (i) os << ",";
          pr_term(os, f->args[i]);
        }
        os << ")";
      }
      break;
    case FormulaKind::Enc:
      pr_term(os, f->subject);
      os << "[";
      pr_term(os, f->rel);
      os << "]";
      break;
    case FormulaKind::IdInd:
    case FormulaKind::IdRel:
      // identity is atomic in the grammar
      pr_term(os, f->t1);
      os << " = ";
      pr_term(os, f->t2);
      break;
    case FormulaKind::Not:
      wrap(L_PREFIX, [&] { os << "~"; pr(os, f->a, L_PREFIX); });
      break;
    case FormulaKind::Box:
      wrap(L_PREFIX, [&] { os << "box "; pr(os, f->a, L_PREFIX); });
      break;
    case FormulaKind::Diamond:
      wrap(L_PREFIX, [&] { os << "dia "; pr(os, f->a, L_PREFIX); });
      break;
    case FormulaKind::And:
      wrap(L_AND, [&] { pr(os, f->a, L_AND); os << " & "; pr(os, f->b, L_AND + 1); });
      break;
    case FormulaKind::Or:
      wrap(L_OR, [&] { pr(os, f->a, L_OR); os << " | "; pr(os, f->b, L_OR + 1); });
      break;
    case FormulaKind::Impl:
      // right-associative
      wrap(L_IMPL, [&] { pr(os, f->a, L_IMPL + 1); os << " -> "; pr(os, f->b, L_IMPL); });
      break;
    case FormulaKind::Equiv:
      wrap(L_IFF, [&] { pr(os, f->a, L_IFF + 1); os << " <-> "; pr(os, f->b, L_IFF + 1); });
      break;
    case FormulaKind::ForallInd:
    case FormulaKind::ForallRel:
    case FormulaKind::ExistsInd:
    case FormulaKind::ExistsRel: {
      bool is_forall = f->kind == FormulaKind::ForallInd || f->kind == FormulaKind::ForallRel;
      wrap(L_QUANT, [&] {
        os << (is_forall ? "forall " : "exists ") << f->var << ".";
        // Non-atomic bodies are parenthesized so the maximal-scope rule
        // reads them back unchanged.
        if (f->body->kind == FormulaKind::Exe || f->body->kind == FormulaKind::Enc ||
            f->body->kind == FormulaKind::IdInd || f->body->kind == FormulaKind::IdRel) {
          os << " ";
          pr(os, f->body, L_QUANT);
        } else {
          os << "(";
          pr(os, f->body, L_QUANT);
          os << ")";
        }
      });
      break;
    }
  }
}

}  // namespace

std::string print(const FormulaPtr& f) {
  std::ostringstream os;
  pr(os, f, L_QUANT);
  return os.str();
}

std::string print(const TermPtr& t) {
  std::ostringstream os;
  pr_term(os, t);
  return os.str();
}

}  // namespace aot
