#include "dpq/surface/parser.hpp"

#include <cassert>

namespace dpq::surface {

ExprPtr make_expr(ExprKind k, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = sp;
  return e;
}

namespace {

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;
  int guard = 0;  // continuation tokens on a fresh line must sit in col > guard

  explicit Parser(const std::vector<Token>& t) : toks(t) {}

  const Token& peek(size_t off = 0) const {
    size_t i = pos + off;
    return i < toks.size() ? toks[i] : toks.back();
  }
  const Token& prev() const { return toks[pos == 0 ? 0 : pos - 1]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw CompileError(Code::ParseError, t.span, msg);
  }

  bool fresh_line() const { return pos > 0 && peek().span.line > prev().span.line; }

  // A token observed past the layout guard belongs to an enclosing block.
  bool layout_stop() const {
    return fresh_line() && peek().span.col <= guard;
  }

  bool at(Tok k) const { return peek().kind == k && !layout_stop(); }

  const Token& bump() {
    const Token& t = peek();
    if (t.kind != Tok::End) pos++;
    return t;
  }

  // For block/declaration heads whose position was already validated.
  const Token& bump_keyword(Tok k, const char* what) {
    if (peek().kind != k)
      fail(peek(), std::string("expected ") + what + ", found " + tok_name(peek().kind));
    return bump();
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      fail(peek(), std::string("expected ") + what + ", found " + tok_name(peek().kind) +
                       (peek().text.empty() ? "" : " '" + peek().text + "'"));
    if (layout_stop())
      fail(peek(), std::string("expected ") + what +
                       " but the line is not indented past the enclosing block");
    return bump();
  }

  struct GuardScope {
    Parser& p;
    int saved;
    GuardScope(Parser& p_, int g) : p(p_), saved(p_.guard) { p.guard = g; }
    ~GuardScope() { p.guard = saved; }
  };

  // ---- patterns ----

  static bool pattern_start_kind(Tok k) {
    return k == Tok::Ident || k == Tok::ConId || k == Tok::Underscore || k == Tok::LParen;
  }

  static bool stmt_start_kind(Tok k) {
    switch (k) {
      case Tok::Ident:
      case Tok::ConId:
      case Tok::NatLit:
      case Tok::LParen:
      case Tok::IdiomOpen:
      case Tok::KwType:
      case Tok::Underscore:
      case Tok::KwLet:
      case Tok::Lambda:
      case Tok::KwCase:
      case Tok::KwDo:
        return true;
      default:
        return false;
    }
  }

  bool starts_pattern() const {
    return pattern_start_kind(peek().kind) && !layout_stop();
  }

  Pattern parse_pattern_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        bump();
        return {Pattern::Kind::Var, t.span, t.text, {}};
      case Tok::Underscore:
        bump();
        return {Pattern::Kind::Wild, t.span, "_", {}};
      case Tok::ConId:
        bump();
        return {Pattern::Kind::Con, t.span, t.text, {}};
      case Tok::LParen: {
        bump();
        Pattern first = parse_pattern();
        if (at(Tok::Comma)) {
          // tuple patterns left-nest, matching the left-associated tensor
          Pattern acc = first;
          while (at(Tok::Comma)) {
            bump();
            Pattern next = parse_pattern();
            Pattern node{Pattern::Kind::Pair, acc.span, "", {}};
            node.args.push_back(std::move(acc));
            node.args.push_back(std::move(next));
            acc = std::move(node);
          }
          expect(Tok::RParen, "')'");
          return acc;
        }
        expect(Tok::RParen, "')'");
        return first;
      }
      default:
        fail(t, "expected a pattern");
    }
  }

  Pattern parse_pattern() {
    Pattern head = parse_pattern_atom();
    if (head.kind == Pattern::Kind::Con) {
      while (starts_pattern() && peek().kind != Tok::LParen) {
        // constructor patterns take variable/wildcard fields only
        if (peek().kind == Tok::ConId) break;
        head.args.push_back(parse_pattern_atom());
      }
    }
    return head;
  }

  // ---- expressions and types ----

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::ConId:
      case Tok::NatLit:
      case Tok::LParen:
      case Tok::IdiomOpen:
      case Tok::KwType:
      case Tok::Underscore:
        return !layout_stop();
      default:
        return false;
    }
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        bump();
        auto e = make_expr(ExprKind::Var, t.span);
        e->name = t.text;
        return e;
      }
      case Tok::Underscore:
        fail(t, "'_' is only allowed in patterns");
      case Tok::ConId: {
        bump();
        if (t.text == "Circ" && at(Tok::LParen)) {
          bump();
          auto e = make_expr(ExprKind::CircType, t.span);
          e->kids.push_back(parse_type());
          expect(Tok::Comma, "','");
          e->kids.push_back(parse_type());
          expect(Tok::RParen, "')'");
          return e;
        }
        if (t.text == "Unit") return make_expr(ExprKind::UnitType, t.span);
        auto e = make_expr(ExprKind::Con, t.span);
        e->name = t.text;
        return e;
      }
      case Tok::NatLit: {
        bump();
        auto e = make_expr(ExprKind::Nat, t.span);
        e->nat = t.nat;
        return e;
      }
      case Tok::KwType:
        bump();
        return make_expr(ExprKind::TypeKind, t.span);
      case Tok::IdiomOpen: {
        bump();
        auto e = make_expr(ExprKind::Idiom, t.span);
        e->kids.push_back(parse_opexpr());
        expect(Tok::IdiomClose, "'|]'");
        return e;
      }
      case Tok::LParen: {
        bump();
        if (at(Tok::RParen)) {
          bump();
          return make_expr(ExprKind::Unit, t.span);
        }
        ExprPtr first = parse_type();
        if (at(Tok::Comma)) {
          ExprPtr acc = first;
          while (at(Tok::Comma)) {
            bump();
            ExprPtr next = parse_type();
            auto node = make_expr(ExprKind::Pair, t.span);
            node->kids = {acc, next};
            acc = node;
          }
          expect(Tok::RParen, "')'");
          return acc;
        }
        expect(Tok::RParen, "')'");
        return first;
      }
      default:
        fail(t, std::string("expected an expression, found ") + tok_name(t.kind));
    }
  }

  ExprPtr parse_app() {
    ExprPtr head = parse_atom();
    while (starts_atom()) {
      auto node = make_expr(ExprKind::App, head->span);
      node->kids = {head, parse_atom()};
      head = node;
    }
    return head;
  }

  ExprPtr parse_and() {
    ExprPtr l = parse_app();
    while (at(Tok::AndAnd)) {
      Span sp = bump().span;
      auto node = make_expr(ExprKind::BinOp, sp);
      node->name = "&&";
      node->kids = {l, parse_app()};
      l = node;
    }
    return l;
  }

  ExprPtr parse_opexpr() {
    ExprPtr l = parse_and();
    while (at(Tok::OrOr)) {
      Span sp = bump().span;
      auto node = make_expr(ExprKind::BinOp, sp);
      node->name = "||";
      node->kids = {l, parse_and()};
      l = node;
    }
    return l;
  }

  ExprPtr parse_tensor() {
    ExprPtr l = parse_opexpr();
    while (at(Tok::Star)) {
      Span sp = bump().span;
      auto node = make_expr(ExprKind::Tensor, sp);
      node->kids = {l, parse_opexpr()};
      l = node;
    }
    return l;
  }

  // Looks ahead from a '(' already consumed: are we at "vars :" (binder group)?
  bool binder_group_ahead() const {
    size_t i = pos;
    auto kind_at = [&](size_t j) {
      return j < toks.size() ? toks[j].kind : Tok::End;
    };
    if (kind_at(i) != Tok::Ident && kind_at(i) != Tok::Underscore) return false;
    while (kind_at(i) == Tok::Ident || kind_at(i) == Tok::Underscore) i++;
    return kind_at(i) == Tok::Colon;
  }

  // Scans a balanced "(...)" group from the current '(' and reports whether
  // "=>" follows, which marks a constraint list.
  bool constraint_list_ahead() const {
    assert(peek().kind == Tok::LParen);
    size_t i = pos;
    int depth = 0;
    while (i < toks.size()) {
      Tok k = toks[i].kind;
      if (k == Tok::LParen) depth++;
      else if (k == Tok::RParen) {
        depth--;
        if (depth == 0) {
          return i + 1 < toks.size() && toks[i + 1].kind == Tok::FatArrow;
        }
      } else if (k == Tok::End) {
        return false;
      }
      i++;
    }
    return false;
  }

  std::vector<std::string> parse_binder_names() {
    std::vector<std::string> names;
    while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore) {
      names.push_back(bump().text);
    }
    if (names.empty()) fail(peek(), "expected a binder name");
    return names;
  }

  ExprPtr parse_forall() {
    Span sp = expect(Tok::KwForall, "'forall'").span;
    // forall x -> T | forall (x y : K) -> T, possibly several groups
    std::vector<std::pair<std::vector<std::string>, ExprPtr>> groups;
    for (;;) {
      if (at(Tok::LParen)) {
        bump();
        auto names = parse_binder_names();
        expect(Tok::Colon, "':'");
        ExprPtr kind = parse_type();
        expect(Tok::RParen, "')'");
        groups.push_back({names, kind});
      } else if (peek().kind == Tok::Ident) {
        groups.push_back({{bump().text}, nullptr});
      } else {
        break;
      }
    }
    if (groups.empty()) fail(peek(), "expected binders after 'forall'");
    expect(Tok::Arrow, "'->'");
    ExprPtr body = parse_type();
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      for (auto nit = it->first.rbegin(); nit != it->first.rend(); ++nit) {
        auto node = make_expr(ExprKind::Pi, sp);
        node->flavor = BinderFlavor::Irrel;
        node->binders = {*nit};
        node->kids = {it->second ? it->second : make_expr(ExprKind::TypeKind, sp), body};
        body = node;
      }
    }
    return body;
  }

  ExprPtr parse_type() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang: {
        bump();
        auto node = make_expr(ExprKind::Bang, t.span);
        node->kids.push_back(parse_type());
        return node;
      }
      case Tok::KwForall:
        return parse_forall();
      case Tok::Lambda:
        return parse_lambda();
      case Tok::KwLet:
        return parse_let();
      case Tok::KwCase:
        return parse_case();
      case Tok::KwDo:
        return parse_do();
      case Tok::LBrace: {
        bump();
        auto names = parse_binder_names();
        expect(Tok::Colon, "':'");
        ExprPtr kind = parse_type();
        expect(Tok::RBrace, "'}'");
        expect(Tok::Arrow, "'->'");
        ExprPtr body = parse_type();
        for (auto it = names.rbegin(); it != names.rend(); ++it) {
          auto node = make_expr(ExprKind::Pi, t.span);
          node->flavor = BinderFlavor::Impl;
          node->binders = {*it};
          node->kids = {kind, body};
          body = node;
        }
        return body;
      }
      case Tok::LParen: {
        if (constraint_list_ahead()) {
          bump();
          auto node = make_expr(ExprKind::Constraint, t.span);
          for (;;) {
            const Token& c = expect(Tok::ConId, "a class name");
            ClassConstraint cc;
            cc.cls = c.text;
            cc.span = c.span;
            cc.arg = parse_app();
            node->constraints.push_back(cc);
            if (at(Tok::Comma)) {
              bump();
              continue;
            }
            break;
          }
          expect(Tok::RParen, "')'");
          expect(Tok::FatArrow, "'=>'");
          node->kids.push_back(parse_type());
          return node;
        }
        size_t here = pos;
        bump();
        if (binder_group_ahead()) {
          auto names = parse_binder_names();
          expect(Tok::Colon, "':'");
          ExprPtr dom = parse_type();
          expect(Tok::RParen, "')'");
          if (at(Tok::Arrow)) {
            bump();
            ExprPtr body = parse_type();
            for (auto it = names.rbegin(); it != names.rend(); ++it) {
              auto node = make_expr(ExprKind::Pi, t.span);
              node->flavor = BinderFlavor::Expl;
              node->binders = {*it};
              node->kids = {dom, body};
              body = node;
            }
            return body;
          }
          if (at(Tok::Star)) {
            bump();
            if (names.size() != 1)
              fail(t, "an existential type binds exactly one variable");
            auto node = make_expr(ExprKind::Exists, t.span);
            node->binders = names;
            node->kids = {dom, parse_opexpr()};
            ExprPtr acc = node;
            while (at(Tok::Star)) {
              Span sp = bump().span;
              auto outer = make_expr(ExprKind::Tensor, sp);
              outer->kids = {acc, parse_opexpr()};
              acc = outer;
            }
            return maybe_arrow(acc);
          }
          fail(peek(), "expected '->' or '*' after a binder group");
        }
        pos = here;  // plain parenthesised form
        break;
      }
      default:
        break;
    }
    return maybe_arrow(parse_tensor());
  }

  ExprPtr maybe_arrow(ExprPtr l) {
    if (at(Tok::Arrow)) {
      Span sp = bump().span;
      auto node = make_expr(ExprKind::Arrow, sp);
      node->kids = {l, parse_type()};
      return node;
    }
    return l;
  }

  ExprPtr parse_lambda() {
    Span sp = expect(Tok::Lambda, "a lambda").span;
    std::vector<std::string> params;
    while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore)
      params.push_back(bump().text);
    if (params.empty()) fail(peek(), "expected lambda parameters");
    expect(Tok::Arrow, "'->'");
    auto node = make_expr(ExprKind::Lam, sp);
    node->binders = params;
    node->kids.push_back(parse_expr());
    return node;
  }

  std::vector<LetBinding> parse_let_group(bool* saw_in, bool in_do) {
    int align = peek().span.col;
    std::vector<LetBinding> bindings;
    GuardScope gs(*this, align);
    for (;;) {
      LetBinding b;
      b.span = peek().span;
      b.pat = parse_pattern();
      if (peek().kind == Tok::BindArrow)
        throw CompileError(Code::DesugarError, peek().span,
                           "'<-' bindings are only allowed inside a do-block");
      expect(Tok::Equals, "'='");
      b.rhs = parse_expr();
      bindings.push_back(std::move(b));
      if (peek().kind == Tok::KwIn && !in_do) {
        // 'in' may dedent past the binding column
        bump();
        *saw_in = true;
        return bindings;
      }
      if (fresh_line() && peek().span.col == align && pattern_start_kind(peek().kind))
        continue;
      *saw_in = false;
      return bindings;
    }
  }

  ExprPtr parse_let() {
    Span sp = expect(Tok::KwLet, "'let'").span;
    bool saw_in = false;
    auto node = make_expr(ExprKind::Let, sp);
    node->bindings = parse_let_group(&saw_in, false);
    if (!saw_in) expect(Tok::KwIn, "'in'");
    node->kids.push_back(parse_expr());
    return node;
  }

  ExprPtr parse_case() {
    Span sp = expect(Tok::KwCase, "'case'").span;
    auto node = make_expr(ExprKind::Case, sp);
    node->kids.push_back(parse_tensor());
    expect(Tok::KwOf, "'of'");
    int align = peek().span.col;
    GuardScope gs(*this, align);
    for (;;) {
      CaseAlt alt;
      if (peek().kind != Tok::ConId)
        fail(peek(), "expected a constructor alternative");
      const Token& c = bump();
      alt.con = c.text;
      alt.span = c.span;
      while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore)
        alt.binders.push_back(bump().text);
      expect(Tok::Arrow, "'->'");
      alt.body = parse_expr();
      node->alts.push_back(std::move(alt));
      if (fresh_line() && peek().span.col == align && peek().kind == Tok::ConId) continue;
      break;
    }
    return node;
  }

  ExprPtr parse_do() {
    Span sp = expect(Tok::KwDo, "'do'").span;
    auto node = make_expr(ExprKind::Do, sp);
    int align = peek().span.col;
    GuardScope gs(*this, align);
    for (;;) {
      DoStmt stmt;
      stmt.span = peek().span;
      if (peek().kind == Tok::KwLet) {
        bump();
        stmt.kind = DoStmt::Kind::LetGroup;
        bool saw_in = false;
        stmt.bindings = parse_let_group(&saw_in, true);
      } else {
        size_t here = pos;
        bool is_bind = false;
        if (pattern_start_kind(peek().kind)) {
          Pattern p = parse_pattern();
          if (peek().kind == Tok::BindArrow) {
            bump();
            stmt.kind = DoStmt::Kind::Bind;
            stmt.pat = std::move(p);
            stmt.expr = parse_expr();
            is_bind = true;
          } else {
            pos = here;
          }
        }
        if (!is_bind) {
          stmt.kind = DoStmt::Kind::Expr;
          stmt.expr = parse_expr();
        }
      }
      node->stmts.push_back(std::move(stmt));
      if (fresh_line() && peek().span.col == align && stmt_start_kind(peek().kind))
        continue;
      break;
    }
    if (node->stmts.back().kind != DoStmt::Kind::Expr)
      fail(toks[pos == 0 ? 0 : pos - 1], "a do-block must end with an expression");
    return node;
  }

  ExprPtr parse_expr() { return parse_type(); }

  // ---- declarations ----

  CtorDecl parse_ctor_decl() {
    CtorDecl c;
    const Token& t = expect(Tok::ConId, "a constructor name");
    c.name = t.text;
    c.span = t.span;
    while (starts_atom()) c.fields.push_back(parse_atom());
    return c;
  }

  std::vector<CtorDecl> parse_ctor_alts() {
    std::vector<CtorDecl> out;
    out.push_back(parse_ctor_decl());
    while (at(Tok::Pipe)) {
      bump();
      out.push_back(parse_ctor_decl());
    }
    return out;
  }

  Decl parse_data() {
    Decl d;
    d.kind = Decl::Kind::Data;
    d.span = bump_keyword(Tok::KwData, "'data'").span;
    d.name = expect(Tok::ConId, "a type name").text;
    while (peek().kind == Tok::Ident) d.params.push_back(bump().text);
    expect(Tok::Equals, "'='");
    d.ctors = parse_ctor_alts();
    return d;
  }

  Decl parse_simple() {
    Decl d;
    d.kind = Decl::Kind::Simple;
    d.span = bump_keyword(Tok::KwSimple, "'simple'").span;
    d.name = expect(Tok::ConId, "a type family name").text;
    while (peek().kind == Tok::Ident) d.params.push_back(bump().text);
    expect(Tok::Colon, "':'");
    // index kinds: K1 -> ... -> Type
    for (;;) {
      if (peek().kind == Tok::KwType) {
        bump();
        break;
      }
      d.indexKinds.push_back(parse_atom());
      expect(Tok::Arrow, "'->'");
    }
    expect(Tok::KwWhere, "'where'");
    int align = peek().span.col;
    GuardScope gs(*this, align);
    for (;;) {
      SimpleClause cl;
      if (peek().kind != Tok::ConId) fail(peek(), "expected a clause head");
      const Token& h = bump();
      cl.span = h.span;
      if (h.text != d.name)
        fail(h, "clause head must repeat the family name '" + d.name + "'");
      for (size_t i = 0; i < d.params.size(); i++)
        cl.params.push_back(expect(Tok::Ident, "a parameter variable").text);
      cl.index = parse_pattern_atom();
      if (cl.index.kind == Pattern::Kind::Con && peek().kind == Tok::Ident) {
        // unparenthesised "S n" style index pattern
        while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore)
          cl.index.args.push_back(parse_pattern_atom());
      }
      expect(Tok::Equals, "'='");
      cl.rhs = parse_ctor_alts();
      d.clauses.push_back(std::move(cl));
      if (fresh_line() && peek().span.col == align && peek().kind == Tok::ConId) continue;
      break;
    }
    return d;
  }

  Decl parse_object() {
    Decl d;
    d.kind = Decl::Kind::Object;
    d.span = bump_keyword(Tok::KwObject, "'object'").span;
    d.name = expect(Tok::ConId, "an object name").text;
    return d;
  }

  Decl parse_gate() {
    Decl d;
    d.kind = Decl::Kind::Gate;
    d.span = bump_keyword(Tok::KwGate, "'gate'").span;
    d.name = expect(Tok::ConId, "a gate name").text;
    while (peek().kind == Tok::ConId) d.paramKinds.push_back(bump().text);
    expect(Tok::Colon, "':'");
    d.gateType = parse_type();
    d.attrs.style = "box";
    if (at(Tok::LBracket)) {
      bump();
      for (;;) {
        const Token& a = expect(Tok::Ident, "a gate attribute");
        if (a.text == "adjoint") {
          d.attrs.adjoint = expect(Tok::ConId, "the adjoint gate name").text;
        } else if (a.text == "self_adjoint") {
          d.attrs.adjoint = d.name;
        } else if (a.text == "style") {
          d.attrs.style = expect(Tok::Ident, "a draw style").text;
        } else if (a.text == "controls") {
          d.attrs.controls = (int)expect(Tok::NatLit, "a control count").nat;
        } else {
          fail(a, "unknown gate attribute '" + a.text + "'");
        }
        if (at(Tok::Comma)) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::RBracket, "']'");
    }
    return d;
  }

  Decl parse_class() {
    Decl d;
    d.kind = Decl::Kind::Class;
    d.span = bump_keyword(Tok::KwClass, "'class'").span;
    d.name = expect(Tok::ConId, "a class name").text;
    if (at(Tok::LParen)) {
      bump();
      d.classParam = expect(Tok::Ident, "a class parameter").text;
      expect(Tok::Colon, "':'");
      d.classParamKind = parse_type();
      expect(Tok::RParen, "')'");
    } else {
      d.classParam = expect(Tok::Ident, "a class parameter").text;
    }
    expect(Tok::KwWhere, "'where'");
    int align = peek().span.col;
    GuardScope gs(*this, align);
    for (;;) {
      MethodSig m;
      if (peek().kind != Tok::Ident) fail(peek(), "expected a method name");
      const Token& n = bump();
      m.name = n.text;
      m.span = n.span;
      expect(Tok::Colon, "':'");
      m.type = parse_type();
      d.methods.push_back(std::move(m));
      if (fresh_line() && peek().span.col == align && peek().kind == Tok::Ident) continue;
      break;
    }
    return d;
  }

  Decl parse_instance() {
    Decl d;
    d.kind = Decl::Kind::Instance;
    d.span = bump_keyword(Tok::KwInstance, "'instance'").span;
    if (peek().kind == Tok::LParen && constraint_list_ahead()) {
      bump();
      for (;;) {
        const Token& c = expect(Tok::ConId, "a class name");
        ClassConstraint cc;
        cc.cls = c.text;
        cc.span = c.span;
        cc.arg = parse_app();
        d.constraints.push_back(cc);
        if (at(Tok::Comma)) {
          bump();
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
      expect(Tok::FatArrow, "'=>'");
    }
    d.name = expect(Tok::ConId, "a class name").text;
    if (at(Tok::LParen)) {
      bump();
      d.headCon = expect(Tok::ConId, "a type constructor").text;
      while (peek().kind == Tok::Ident) d.headVars.push_back(bump().text);
      expect(Tok::RParen, "')'");
    } else {
      d.headCon = expect(Tok::ConId, "a type constructor").text;
    }
    expect(Tok::KwWhere, "'where'");
    int align = peek().span.col;
    GuardScope gs(*this, align);
    for (;;) {
      MethodDef m;
      if (peek().kind != Tok::Ident) fail(peek(), "expected a method name");
      const Token& n = bump();
      m.name = n.text;
      m.span = n.span;
      while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore)
        m.params.push_back(bump().text);
      expect(Tok::Equals, "'='");
      m.body = parse_expr();
      d.methodDefs.push_back(std::move(m));
      if (fresh_line() && peek().span.col == align && peek().kind == Tok::Ident) continue;
      break;
    }
    return d;
  }

  Decl parse_def() {
    Decl d;
    d.kind = Decl::Kind::Def;
    const Token& n = bump_keyword(Tok::Ident, "a definition name");
    d.name = n.text;
    d.span = n.span;
    expect(Tok::Colon, "':'");
    d.declaredType = parse_type();
    // defining equation follows, starting a fresh declaration line
    if (peek().kind != Tok::Ident || peek().text != d.name || peek().span.col != 1)
      fail(peek(), "expected the defining equation for '" + d.name + "'");
    bump();
    while (peek().kind == Tok::Ident || peek().kind == Tok::Underscore)
      d.eqParams.push_back(bump().text);
    expect(Tok::Equals, "'='");
    d.body = parse_expr();
    return d;
  }

  Module parse_module() {
    Module mod;
    GuardScope gs(*this, 1);
    while (peek().kind != Tok::End) {
      if (peek().span.col != 1)
        fail(peek(), "declarations must start at column 1");
      switch (peek().kind) {
        case Tok::KwData: mod.push_back(parse_data()); break;
        case Tok::KwSimple: mod.push_back(parse_simple()); break;
        case Tok::KwObject: mod.push_back(parse_object()); break;
        case Tok::KwGate: mod.push_back(parse_gate()); break;
        case Tok::KwClass: mod.push_back(parse_class()); break;
        case Tok::KwInstance: mod.push_back(parse_instance()); break;
        case Tok::Ident: mod.push_back(parse_def()); break;
        default:
          fail(peek(), std::string("expected a declaration, found ") + tok_name(peek().kind));
      }
    }
    return mod;
  }
};

}  // namespace

Module parse_module(const std::vector<Token>& tokens) {
  Parser p(tokens);
  return p.parse_module();
}

ExprPtr parse_expression(const std::vector<Token>& tokens) {
  Parser p(tokens);
  p.guard = 0;
  ExprPtr e = p.parse_expr();
  if (p.peek().kind != Tok::End)
    throw CompileError(Code::ParseError, p.peek().span, "trailing input after expression");
  return e;
}

Module parse_module_source(const std::string& source) {
  return parse_module(tokenize(source));
}

}  // namespace dpq::surface
