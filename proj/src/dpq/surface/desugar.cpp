#include "dpq/surface/desugar.hpp"

namespace dpq::surface {

namespace {

ExprPtr var_ref(const std::string& name, Span sp) {
  auto e = make_expr(ExprKind::Var, sp);
  e->name = name;
  return e;
}

ExprPtr apply(ExprPtr f, ExprPtr a, Span sp) {
  auto e = make_expr(ExprKind::App, sp);
  e->kids = {std::move(f), std::move(a)};
  return e;
}

ExprPtr nat_chain(uint64_t n, Span sp) {
  auto z = make_expr(ExprKind::Con, sp);
  z->name = "Z";
  ExprPtr acc = z;
  for (uint64_t i = 0; i < n; i++) {
    auto s = make_expr(ExprKind::Con, sp);
    s->name = "S";
    acc = apply(s, acc, sp);
  }
  return acc;
}

ExprPtr idiom_expand(const ExprPtr& content, Span sp) {
  // view the content as an application spine f a1 .. ak
  std::vector<ExprPtr> spine;
  ExprPtr cur = content;
  while (cur->kind == ExprKind::App) {
    spine.push_back(cur->kids[1]);
    cur = cur->kids[0];
  }
  if (spine.empty())
    throw CompileError(Code::DesugarError, sp,
                       "an idiom bracket needs a head applied to at least one argument");
  ExprPtr acc = apply(var_ref("pure", sp), cur, sp);
  for (size_t i = spine.size(); i-- > 0;)
    acc = apply(apply(var_ref("ap", sp), acc, sp), spine[i], sp);
  return apply(var_ref("join", sp), acc, sp);
}

ExprPtr do_expand(const std::vector<DoStmt>& stmts, size_t i, Span sp) {
  const DoStmt& s = stmts[i];
  if (i + 1 == stmts.size()) {
    if (s.kind != DoStmt::Kind::Expr)
      throw CompileError(Code::DesugarError, s.span, "a do-block must end with an expression");
    return desugar_expr(s.expr);
  }
  ExprPtr rest = do_expand(stmts, i + 1, sp);
  switch (s.kind) {
    case DoStmt::Kind::LetGroup: {
      auto node = make_expr(ExprKind::Let, s.span);
      for (auto& b : s.bindings) node->bindings.push_back({b.pat, desugar_expr(b.rhs), b.span});
      node->kids.push_back(rest);
      return node;
    }
    case DoStmt::Kind::Bind:
    case DoStmt::Kind::Expr: {
      ExprPtr body;
      std::string binder;
      if (s.kind == DoStmt::Kind::Expr) {
        binder = "_";
        body = rest;
      } else if (s.pat.kind == Pattern::Kind::Var || s.pat.kind == Pattern::Kind::Wild) {
        binder = s.pat.name;
        body = rest;
      } else {
        // destructure through a fresh intermediate binding
        binder = "_bound";
        auto let = make_expr(ExprKind::Let, s.span);
        let->bindings.push_back({s.pat, var_ref(binder, s.span), s.span});
        let->kids.push_back(rest);
        body = let;
      }
      auto lam = make_expr(ExprKind::Lam, s.span);
      lam->binders = {binder};
      lam->kids = {body};
      return apply(apply(var_ref("bind", s.span), desugar_expr(s.expr), s.span), lam, s.span);
    }
  }
  throw CompileError(Code::DesugarError, s.span, "malformed do-block");
}

}  // namespace

ExprPtr desugar_expr(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Nat:
      return nat_chain(e->nat, e->span);
    case ExprKind::BinOp: {
      const char* fn = e->name == "&&" ? "and" : "or";
      return apply(apply(var_ref(fn, e->span), desugar_expr(e->kids[0]), e->span),
                   desugar_expr(e->kids[1]), e->span);
    }
    case ExprKind::Idiom:
      return idiom_expand(desugar_expr(e->kids[0]), e->span);
    case ExprKind::Do:
      return do_expand(e->stmts, 0, e->span);
    default: {
      auto out = std::make_shared<Expr>(*e);
      for (auto& k : out->kids) k = desugar_expr(k);
      for (auto& b : out->bindings) b.rhs = desugar_expr(b.rhs);
      for (auto& a : out->alts) a.body = desugar_expr(a.body);
      for (auto& c : out->constraints) c.arg = desugar_expr(c.arg);
      return out;
    }
  }
}

Decl desugar_decl(const Decl& d) {
  Decl out = d;
  if (out.gateType) out.gateType = desugar_expr(out.gateType);
  if (out.classParamKind) out.classParamKind = desugar_expr(out.classParamKind);
  if (out.declaredType) out.declaredType = desugar_expr(out.declaredType);
  if (out.body) out.body = desugar_expr(out.body);
  for (auto& c : out.ctors)
    for (auto& f : c.fields) f = desugar_expr(f);
  for (auto& k : out.indexKinds) k = desugar_expr(k);
  for (auto& cl : out.clauses)
    for (auto& rc : cl.rhs)
      for (auto& f : rc.fields) f = desugar_expr(f);
  for (auto& m : out.methods) m.type = desugar_expr(m.type);
  for (auto& m : out.methodDefs) m.body = desugar_expr(m.body);
  for (auto& c : out.constraints) c.arg = desugar_expr(c.arg);
  return out;
}

Module desugar(const Module& m) {
  Module out;
  out.reserve(m.size());
  for (auto& d : m) out.push_back(desugar_decl(d));
  return out;
}

}  // namespace dpq::surface
