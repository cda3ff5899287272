#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpq/common.hpp"

namespace dpq::surface {

// Terms and types share one expression tree; the checker sorts them out.
// Tensor '*' and tuples are left-associated, so a * b * c = (a * b) * c and
// (x, y, z) = ((x, y), z).

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class ExprKind {
  Var,        // name
  Con,        // name (constructor / type head)
  Nat,        // nat literal (removed by desugar)
  Unit,       // ()
  UnitType,   // Unit
  TypeKind,   // Type
  App,        // kids[0] kids[1]
  Lam,        // binders -> kids[0]
  Let,        // bindings, kids[0] = body
  Case,       // kids[0] = scrutinee, alts
  Do,         // stmts (removed by desugar)
  Idiom,      // kids[0] = bracket content (removed by desugar)
  Pair,       // (kids[0], kids[1])
  BinOp,      // name = "&&" or "||" (removed by desugar)
  Arrow,      // kids[0] -> kids[1]
  Pi,         // (binders : kids[0]) -> kids[1], flavor Expl/Irrel/Impl
  Tensor,     // kids[0] * kids[1]
  Exists,     // (binders[0] : kids[0]) * kids[1]
  Bang,       // ! kids[0]
  CircType,   // Circ(kids[0], kids[1])
  Constraint, // (classes) => kids[0]
};

enum class BinderFlavor { Expl, Irrel, Impl };

struct Pattern {
  enum class Kind { Var, Wild, Pair, Con } kind;
  Span span;
  std::string name;                // Var / Con
  std::vector<Pattern> args;       // Pair (exactly 2, left-nested) / Con fields
};

struct LetBinding {
  Pattern pat;
  ExprPtr rhs;
  Span span;
};

struct CaseAlt {
  std::string con;
  std::vector<std::string> binders;  // field pattern variables ("_" allowed)
  ExprPtr body;
  Span span;
};

struct DoStmt {
  enum class Kind { Bind, LetGroup, Expr } kind;
  Pattern pat;                      // Bind
  std::vector<LetBinding> bindings; // LetGroup
  ExprPtr expr;                     // Bind / Expr
  Span span;
};

struct ClassConstraint {
  std::string cls;
  ExprPtr arg;
  Span span;
};

struct Expr {
  ExprKind kind;
  Span span;
  std::string name;
  uint64_t nat = 0;
  std::vector<ExprPtr> kids;
  std::vector<std::string> binders;
  BinderFlavor flavor = BinderFlavor::Expl;
  std::vector<LetBinding> bindings;
  std::vector<CaseAlt> alts;
  std::vector<DoStmt> stmts;
  std::vector<ClassConstraint> constraints;
};

ExprPtr make_expr(ExprKind k, Span sp);

// ---- declarations ----

struct CtorDecl {
  std::string name;
  std::vector<ExprPtr> fields;
  Span span;
};

struct SimpleClause {
  std::vector<std::string> params;  // must repeat the declared parameters
  Pattern index;                    // constructor pattern on the index
  std::vector<CtorDecl> rhs;        // well-formed iff exactly one
  Span span;
};

struct GateAttrs {
  std::optional<std::string> adjoint;  // self for self-adjoint gates
  std::string style;                   // box|oplus|init|term|meas|discard
  int controls = 0;                    // trailing inputs drawn as control dots
};

struct MethodSig {
  std::string name;
  ExprPtr type;
  Span span;
};

struct MethodDef {
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
  Span span;
};

struct Decl {
  enum class Kind { Data, Simple, Object, Gate, Class, Instance, Def } kind;
  Span span;
  std::string name;

  // Data / Simple
  std::vector<std::string> params;
  std::vector<CtorDecl> ctors;          // Data
  std::vector<ExprPtr> indexKinds;      // Simple: kinds before the final Type
  std::vector<SimpleClause> clauses;    // Simple

  // Gate
  std::vector<std::string> paramKinds;  // e.g. ["Nat"] for gate R Nat
  ExprPtr gateType;
  GateAttrs attrs;

  // Class
  std::string classParam;
  ExprPtr classParamKind;  // null means Type
  std::vector<MethodSig> methods;

  // Instance
  std::vector<ClassConstraint> constraints;
  std::string headCon;
  std::vector<std::string> headVars;
  std::vector<MethodDef> methodDefs;

  // Def (type signature + defining equation)
  ExprPtr declaredType;
  std::vector<std::string> eqParams;
  ExprPtr body;
};

using Module = std::vector<Decl>;

}  // namespace dpq::surface
