#include "dpq/surface/printer.hpp"

#include <functional>
#include <sstream>

namespace dpq::surface {

namespace {

struct Printer {
  std::string out;
  int col = 1;

  void write(const std::string& s) {
    out += s;
    col += (int)s.size();
  }

  void newline(int indent) {
    out += '\n';
    out += std::string(indent - 1, ' ');
    col = indent;
  }

  void parens(bool need, const std::function<void()>& f) {
    if (need) write("(");
    f();
    if (need) write(")");
  }

  void expr(const ExprPtr& e, int prec) {
    switch (e->kind) {
      case ExprKind::Var:
      case ExprKind::Con:
        write(e->name);
        break;
      case ExprKind::Nat:
        write(std::to_string(e->nat));
        break;
      case ExprKind::Unit:
        write("()");
        break;
      case ExprKind::UnitType:
        write("Unit");
        break;
      case ExprKind::TypeKind:
        write("Type");
        break;
      case ExprKind::App:
        parens(prec > 4, [&] {
          expr(e->kids[0], 4);
          write(" ");
          expr(e->kids[1], 5);
        });
        break;
      case ExprKind::Lam:
        parens(prec > 0, [&] {
          write("\\ ");
          for (auto& b : e->binders) write(b + " ");
          write("-> ");
          expr(e->kids[0], 0);
        });
        break;
      case ExprKind::Pair: {
        // re-flatten the left-nested spine into tuple syntax
        std::vector<ExprPtr> elems;
        ExprPtr cur = e;
        while (cur->kind == ExprKind::Pair) {
          elems.push_back(cur->kids[1]);
          cur = cur->kids[0];
        }
        elems.push_back(cur);
        write("(");
        for (size_t i = elems.size(); i-- > 0;) {
          expr(elems[i], 0);
          if (i > 0) write(", ");
        }
        write(")");
        break;
      }
      case ExprKind::BinOp:
        if (e->name == "&&") {
          parens(prec > 3, [&] {
            expr(e->kids[0], 3);
            write(" && ");
            expr(e->kids[1], 4);
          });
        } else {
          parens(prec > 2, [&] {
            expr(e->kids[0], 2);
            write(" || ");
            expr(e->kids[1], 3);
          });
        }
        break;
      case ExprKind::Idiom:
        write("[| ");
        expr(e->kids[0], 2);
        write(" |]");
        break;
      case ExprKind::Tensor:
        parens(prec > 1, [&] {
          expr(e->kids[0], 1);
          write(" * ");
          expr(e->kids[1], 2);
        });
        break;
      case ExprKind::Arrow:
        parens(prec > 0, [&] {
          expr(e->kids[0], 1);
          write(" -> ");
          expr(e->kids[1], 0);
        });
        break;
      case ExprKind::Pi:
        parens(prec > 0, [&] {
          if (e->flavor == BinderFlavor::Irrel) {
            write("forall (" + e->binders[0] + " : ");
            expr(e->kids[0], 0);
            write(") -> ");
          } else if (e->flavor == BinderFlavor::Impl) {
            write("{" + e->binders[0] + " : ");
            expr(e->kids[0], 0);
            write("} -> ");
          } else {
            write("(" + e->binders[0] + " : ");
            expr(e->kids[0], 0);
            write(") -> ");
          }
          expr(e->kids[1], 0);
        });
        break;
      case ExprKind::Exists:
        parens(prec > 1, [&] {
          write("(" + e->binders[0] + " : ");
          expr(e->kids[0], 0);
          write(") * ");
          expr(e->kids[1], 2);
        });
        break;
      case ExprKind::Bang:
        parens(prec > 0, [&] {
          write("! ");
          expr(e->kids[0], 0);
        });
        break;
      case ExprKind::CircType:
        write("Circ(");
        expr(e->kids[0], 0);
        write(", ");
        expr(e->kids[1], 0);
        write(")");
        break;
      case ExprKind::Constraint:
        parens(prec > 0, [&] {
          write("(");
          for (size_t i = 0; i < e->constraints.size(); i++) {
            if (i) write(", ");
            write(e->constraints[i].cls + " ");
            expr(e->constraints[i].arg, 5);
          }
          write(") => ");
          expr(e->kids[0], 0);
        });
        break;
      case ExprKind::Let: {
        parens(prec > 0, [&] {
          int letcol = col;
          write("let ");
          int align = col;
          for (size_t i = 0; i < e->bindings.size(); i++) {
            if (i) newline(align);
            binding(e->bindings[i]);
          }
          newline(letcol);
          write("in ");
          expr(e->kids[0], 0);
        });
        break;
      }
      case ExprKind::Case: {
        parens(prec > 0, [&] {
          int casecol = col;
          write("case ");
          expr(e->kids[0], 1);
          write(" of");
          for (auto& alt : e->alts) {
            newline(casecol + 2);
            write(alt.con);
            for (auto& b : alt.binders) write(" " + b);
            write(" -> ");
            expr(alt.body, 0);
          }
        });
        break;
      }
      case ExprKind::Do: {
        parens(prec > 0, [&] {
          int docol = col;
          write("do ");
          int align = col;
          for (size_t i = 0; i < e->stmts.size(); i++) {
            if (i) newline(align);
            const DoStmt& s = e->stmts[i];
            switch (s.kind) {
              case DoStmt::Kind::Bind:
                write(print_pattern(s.pat));
                write(" <- ");
                expr(s.expr, 0);
                break;
              case DoStmt::Kind::LetGroup: {
                write("let ");
                int balign = col;
                for (size_t j = 0; j < s.bindings.size(); j++) {
                  if (j) newline(balign);
                  binding(s.bindings[j]);
                }
                break;
              }
              case DoStmt::Kind::Expr:
                expr(s.expr, 0);
                break;
            }
          }
          (void)docol;
        });
        break;
      }
    }
  }

  void binding(const LetBinding& b) {
    write(print_pattern(b.pat));
    write(" = ");
    expr(b.rhs, 0);
  }
};

}  // namespace

std::string print_pattern(const Pattern& p, bool atom) {
  switch (p.kind) {
    case Pattern::Kind::Var:
    case Pattern::Kind::Wild:
      return p.name;
    case Pattern::Kind::Con: {
      std::string s = p.name;
      for (auto& a : p.args) s += " " + print_pattern(a, true);
      if (atom && !p.args.empty()) return "(" + s + ")";
      return s;
    }
    case Pattern::Kind::Pair: {
      std::vector<const Pattern*> elems;
      const Pattern* cur = &p;
      while (cur->kind == Pattern::Kind::Pair) {
        elems.push_back(&cur->args[1]);
        cur = &cur->args[0];
      }
      elems.push_back(cur);
      std::string s = "(";
      for (size_t i = elems.size(); i-- > 0;) {
        s += print_pattern(*elems[i]);
        if (i > 0) s += ", ";
      }
      return s + ")";
    }
  }
  return "?";
}

std::string print_expr(const ExprPtr& e, int prec) {
  Printer p;
  p.expr(e, prec);
  return p.out;
}

std::string print_decl(const Decl& d) {
  Printer p;
  switch (d.kind) {
    case Decl::Kind::Data: {
      p.write("data " + d.name);
      for (auto& v : d.params) p.write(" " + v);
      p.write(" = ");
      for (size_t i = 0; i < d.ctors.size(); i++) {
        if (i) p.write(" | ");
        p.write(d.ctors[i].name);
        for (auto& f : d.ctors[i].fields) {
          p.write(" ");
          p.expr(f, 5);
        }
      }
      break;
    }
    case Decl::Kind::Simple: {
      p.write("simple " + d.name);
      for (auto& v : d.params) p.write(" " + v);
      p.write(" : ");
      for (auto& k : d.indexKinds) {
        p.expr(k, 5);
        p.write(" -> ");
      }
      p.write("Type where");
      for (auto& cl : d.clauses) {
        p.newline(3);
        p.write(d.name);
        for (auto& v : cl.params) p.write(" " + v);
        p.write(" " + print_pattern(cl.index, true) + " = ");
        for (size_t i = 0; i < cl.rhs.size(); i++) {
          if (i) p.write(" | ");
          p.write(cl.rhs[i].name);
          for (auto& f : cl.rhs[i].fields) {
            p.write(" ");
            p.expr(f, 5);
          }
        }
      }
      break;
    }
    case Decl::Kind::Object:
      p.write("object " + d.name);
      break;
    case Decl::Kind::Gate: {
      p.write("gate " + d.name);
      for (auto& k : d.paramKinds) p.write(" " + k);
      p.write(" : ");
      p.expr(d.gateType, 0);
      std::vector<std::string> attrs;
      if (d.attrs.adjoint) {
        if (*d.attrs.adjoint == d.name) attrs.push_back("self_adjoint");
        else attrs.push_back("adjoint " + *d.attrs.adjoint);
      }
      if (d.attrs.style != "box") attrs.push_back("style " + d.attrs.style);
      if (d.attrs.controls) attrs.push_back("controls " + std::to_string(d.attrs.controls));
      if (!attrs.empty()) {
        p.write(" [");
        for (size_t i = 0; i < attrs.size(); i++) {
          if (i) p.write(", ");
          p.write(attrs[i]);
        }
        p.write("]");
      }
      break;
    }
    case Decl::Kind::Class: {
      p.write("class " + d.name + " ");
      if (d.classParamKind) {
        p.write("(" + d.classParam + " : ");
        p.expr(d.classParamKind, 0);
        p.write(")");
      } else {
        p.write(d.classParam);
      }
      p.write(" where");
      for (auto& m : d.methods) {
        p.newline(3);
        p.write(m.name + " : ");
        p.expr(m.type, 0);
      }
      break;
    }
    case Decl::Kind::Instance: {
      p.write("instance ");
      if (!d.constraints.empty()) {
        p.write("(");
        for (size_t i = 0; i < d.constraints.size(); i++) {
          if (i) p.write(", ");
          p.write(d.constraints[i].cls + " ");
          p.expr(d.constraints[i].arg, 5);
        }
        p.write(") => ");
      }
      p.write(d.name + " ");
      if (d.headVars.empty()) {
        p.write(d.headCon);
      } else {
        p.write("(" + d.headCon);
        for (auto& v : d.headVars) p.write(" " + v);
        p.write(")");
      }
      p.write(" where");
      for (auto& m : d.methodDefs) {
        p.newline(3);
        p.write(m.name);
        for (auto& v : m.params) p.write(" " + v);
        p.write(" = ");
        p.expr(m.body, 0);
      }
      break;
    }
    case Decl::Kind::Def: {
      p.write(d.name + " : ");
      p.expr(d.declaredType, 0);
      p.newline(1);
      p.write(d.name);
      for (auto& v : d.eqParams) p.write(" " + v);
      p.write(" = ");
      p.expr(d.body, 0);
      break;
    }
  }
  p.write("\n");
  return p.out;
}

std::string print_module(const Module& m) {
  std::string out;
  for (auto& d : m) {
    out += print_decl(d);
    out += "\n";
  }
  return out;
}

}  // namespace dpq::surface
