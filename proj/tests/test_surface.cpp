#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpq/surface/desugar.hpp"
#include "dpq/surface/parser.hpp"
#include "dpq/surface/printer.hpp"
#include "dpq/surface/token.hpp"

using namespace dpq;
using namespace dpq::surface;

namespace {

std::vector<Token> lex(const std::string& s) { return tokenize(s); }

Module parse(const std::string& s) { return parse_module(tokenize(s)); }

// Listings exercised for parsing and the round-trip property.
const char* kListings[] = {
    "data Nat = Z | S Nat\n",

    "add : !(Nat -> Nat -> Nat)\n"
    "add n m =\n"
    "  case n of\n"
    "    Z -> m\n"
    "    S n' -> S (add n' m)\n",

    "addS : ! (p : Nat -> Type) -> (n m : Nat) ->\n"
    "             p (add n (S m)) -> p (add (S n) m)\n"
    "addS p n m h =\n"
    "  case n of\n"
    "    Z -> h\n"
    "    S n' -> addS (\\ y -> p (S y)) n' m h\n",

    "addZ : ! (p : Nat -> Type) -> (n : Nat) -> p (add n Z) -> p n\n"
    "addZ p n h = case n of\n"
    "               Z -> h\n"
    "               S n' -> addZ (\\ y -> p (S y)) n' h\n",

    "object Qubit\n",

    "gate H : Qubit -> Qubit\n"
    "gate CNot : Qubit -> Qubit -> Qubit * Qubit\n"
    "gate Meas : Qubit -> Bit\n"
    "gate Init0 : Unit -> Qubit\n",

    "gate R Nat : Qubit -> Qubit -> Qubit * Qubit\n",

    "bell00 : !(Unit -> Qubit * Qubit)\n"
    "bell00 u =\n"
    "  let x = Init0 ()\n"
    "      y = Init0 ()\n"
    "      x' = H x\n"
    "      (y, x') = CNot y x'\n"
    "  in (y, x')\n",

    "bellMeas : !(Qubit -> Qubit -> Bit * Bit)\n"
    "bellMeas x y =\n"
    "  let (x', y') = CNot x y\n"
    "      y'' = H y'\n"
    "  in (Meas x', Meas y'')\n",

    "tele : !(Qubit -> Qubit)\n"
    "tele phi =\n"
    "  let (bob, alice) = bell00 ()\n"
    "      (a', phi') = bellMeas alice phi\n"
    "      (bob', a'') = C_X bob a'\n"
    "      (r, phi'') = C_Z bob' phi'\n"
    "      u = Discard phi''\n"
    "      u = Discard a''\n"
    "  in r\n",

    "simple Vec a : Nat -> Type where\n"
    "    Vec a Z = VNil\n"
    "    Vec a (S n) = VCons a (Vec a n)\n",

    "simple ColorVec a : Nat -> Type where\n"
    "  ColorVec a Z = CNil\n"
    "  ColorVec a (S n) = VConsBlue a (ColorVec a n)\n"
    "  ColorVec a (S n) = VConsRed a (ColorVec a n)\n",

    "simple InfVec a : Nat -> Type where\n"
    "  InfVec a Z = INil\n"
    "  InfVec a (S n) = IVCons a (InfVec a (S n))\n",

    "reverse_aux : ! (a : Type) -> (n m : Nat) ->\n"
    "                      Vec a n -> Vec a m -> Vec a (add n m)\n"
    "reverse_aux a n m v1 v2 =\n"
    "  case n of\n"
    "    Z -> let VNil = v1 in v2\n"
    "    S n' ->\n"
    "      let VCons q qs = v1 in\n"
    "      let ih = reverse_aux a n' (S m) qs (VCons q v2) in\n"
    "      addS (Vec a) n' m ih\n",

    "reverse_vec : ! (a : Type) -> (n : Nat) -> Vec a n -> Vec a n\n"
    "reverse_vec a n v = addZ (Vec a) n (reverse_aux a n Z v VNil)\n",

    "rotate : ! forall (y : Nat) -> Nat ->\n"
    "                Qubit -> Vec Qubit y -> Qubit * Vec Qubit y\n"
    "rotate k q v =\n"
    "    case v of\n"
    "      VNil -> (q, VNil)\n"
    "      VCons x xs ->\n"
    "        let (q', x') = R k q x\n"
    "            (q'', xs') = rotate (S k) q' xs\n"
    "        in (q'', VCons x' xs')\n",

    "oneRotation : ! (n : Nat) ->\n"
    "                   Circ(Qubit * Vec Qubit n, Qubit * Vec Qubit n)\n"
    "oneRotation n =\n"
    "  box (Qubit * Vec Qubit n)\n"
    "    (\\ x -> let (q, v) = x in rotate 2 (H q) v)\n",

    "qft : ! forall (n : Nat) -> Vec Qubit n -> Vec Qubit n\n"
    "qft v =\n"
    "  case v of\n"
    "    VNil -> VNil\n"
    "    VCons q qs ->\n"
    "      let q' = H q\n"
    "          (q'', qs') = rotate 2 q' qs\n"
    "          qs'' = qft qs'\n"
    "      in VCons q'' qs''\n",

    "qftBox : ! (n : Nat) -> Circ(Vec Qubit n, Vec Qubit n)\n"
    "qftBox n = box (Vec Qubit n) qft\n",

    "qftBoxLittle : ! (n : Nat) -> Circ(Vec Qubit n, Vec Qubit n)\n"
    "qftBoxLittle n = box (Vec Qubit n) (\\ v -> qft (reverse_vec Qubit n v))\n",

    "data List a = Nil | Cons a (List a)\n",

    "kill : ! forall a -> (Parameter a) => a -> Unit\n"
    "kill x = ()\n",

    "test1 : !(List Nat -> Unit)\n"
    "test1 x = kill x\n",

    "test2 : !(List Qubit -> Unit)\n"
    "test2 x = kill x\n",

    "boxId : Circ(List Qubit, List Qubit)\n"
    "boxId = box (List Qubit) (\\ x -> x)\n",

    "boxQftRev : ! (n : Nat) -> Circ(Vec Qubit n, Vec Qubit n)\n"
    "boxQftRev n = reverse (qftBox n)\n",

    "data WithGarbage a = WG ((n : Nat) * Vec Qubit n) a\n",

    "instance Monad WithGarbage where\n"
    "  return x = WG (Z, VNil) x\n"
    "  bind wg f = let WG ng r = wg\n"
    "                  (n, g) = ng\n"
    "                  WG mg' r' = f r\n"
    "                  (m, g') = mg'\n"
    "               in WG (add n m, append g g') r'\n",

    "class Disposable a where\n"
    "  dispose : a -> WithGarbage Unit\n",

    "instance Disposable Qubit where\n"
    "  dispose q = WG (1, VCons q VNil) ()\n",

    "xor : !(Qubit -> Qubit -> WithGarbage Qubit)\n"
    "xor x y =\n"
    "  do let z = Init0 ()\n"
    "         (z', x') = CNot z x\n"
    "         (z'', y') = CNot z' y\n"
    "     dispose x'\n"
    "     dispose y'\n"
    "     return z''\n",

    "adder : !(Qubit * Qubit * Qubit -> WithGarbage (Qubit * Qubit))\n"
    "adder input = do\n"
    "  let (a, b, carryIn) = input\n"
    "      (a1, a2, a3) = copy3 a\n"
    "      (b1, b2, b3) = copy3 b\n"
    "      (carryIn1, carryIn2, carryIn3) = copy3 carryIn\n"
    "  s <- [| xor (xor a1 b1) (pure carryIn1)|]\n"
    "  carryOut <- [| [| (a2 && b2) || (a3 && carryIn2) |] || (b3 && carryIn3) |]\n"
    "  return (s, carryOut)\n",

    "with_computed : !forall d -> {a b c : Type} -> (Simple a, Simple b) =>\n"
    "                  !(a -> WithGarbage b) -> !(c * b -> d * b) ->\n"
    "                   (c * a -> d * a)\n"
    "with_computed a b c f g input =\n"
    "  let (y, x) = input\n"
    "      (_, circ) =\n"
    "         existsBox a (\\ x -> Vec Qubit x * b)\n"
    "           (\\ z -> unGarbage (f z))\n"
    "      h' = unbox circ\n"
    "      (v, r) = h' x\n"
    "      circ_rev = unbox (reverse circ)\n"
    "      (d, r') = g (y, r)\n"
    "      res = circ_rev (v, r')\n"
    "  in (d, res)\n",

    "adderRev : Circ(Qubit * Qubit * (Qubit * Qubit * Qubit),\n"
    "                Qubit * Qubit * (Qubit * Qubit * Qubit))\n"
    "adderRev =\n"
    "   box (Qubit * Qubit * (Qubit * Qubit * Qubit))\n"
    "      (\\ x -> with_computed adder copy x)\n",
};

}  // namespace

TEST_CASE("tokenize: data Nat declaration") {
  auto ts = lex("data Nat = Z | S Nat");
  REQUIRE(ts.size() == 8);  // incl. End
  CHECK(ts[0].kind == Tok::KwData);
  CHECK(ts[1].kind == Tok::ConId);
  CHECK(ts[1].text == "Nat");
  CHECK(ts[2].kind == Tok::Equals);
  CHECK(ts[3].kind == Tok::ConId);
  CHECK(ts[3].text == "Z");
  CHECK(ts[4].kind == Tok::Pipe);
  CHECK(ts[5].kind == Tok::ConId);
  CHECK(ts[5].text == "S");
  CHECK(ts[6].kind == Tok::ConId);
  CHECK(ts[6].text == "Nat");
  CHECK(ts[7].kind == Tok::End);
}

TEST_CASE("tokenize: empty input gives only the end marker") {
  auto ts = lex("");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].kind == Tok::End);
}

TEST_CASE("tokenize: unicode lambda expression") {
  auto ts = lex("\xCE\xBB y -> p (S y)");
  REQUIRE(ts.size() == 9);
  CHECK(ts[0].kind == Tok::Lambda);
  CHECK(ts[1].kind == Tok::Ident);
  CHECK(ts[1].text == "y");
  CHECK(ts[2].kind == Tok::Arrow);
  CHECK(ts[3].kind == Tok::Ident);
  CHECK(ts[3].text == "p");
  CHECK(ts[4].kind == Tok::LParen);
  CHECK(ts[5].kind == Tok::ConId);
  CHECK(ts[5].text == "S");
  CHECK(ts[6].kind == Tok::Ident);
  CHECK(ts[7].kind == Tok::RParen);
}

TEST_CASE("tokenize: spans are monotonically nondecreasing") {
  auto ts = lex("add n m =\n  case n of\n    Z -> m\n    S n' -> S (add n' m)");
  for (size_t i = 1; i < ts.size(); i++) {
    bool ok = ts[i].span.line > ts[i - 1].span.line ||
              (ts[i].span.line == ts[i - 1].span.line && ts[i].span.col >= ts[i - 1].span.col);
    CHECK(ok);
  }
}

TEST_CASE("tokenize: comments and errors") {
  auto ts = lex("x -- the rest is ignored\ny");
  REQUIRE(ts.size() == 3);
  CHECK(ts[0].text == "x");
  CHECK(ts[1].text == "y");
  CHECK_THROWS_AS(lex("a # b"), CompileError);
}

TEST_CASE("parse: object declaration") {
  auto m = parse("object Qubit\n");
  REQUIRE(m.size() == 1);
  CHECK(m[0].kind == Decl::Kind::Object);
  CHECK(m[0].name == "Qubit");
}

TEST_CASE("parse: bell00 is one definition with a four-binding let chain") {
  auto m = parse(kListings[7]);
  REQUIRE(m.size() == 1);
  const Decl& d = m[0];
  CHECK(d.kind == Decl::Kind::Def);
  CHECK(d.name == "bell00");
  REQUIRE(d.eqParams.size() == 1);
  CHECK(d.eqParams[0] == "u");
  REQUIRE(d.body->kind == ExprKind::Let);
  CHECK(d.body->bindings.size() == 4);
  for (auto& b : d.body->bindings) CHECK(b.rhs->kind == ExprKind::App);
}

TEST_CASE("parse: malformed case without 'of' is a parse error") {
  CHECK_THROWS_AS(parse("add : !(Nat -> Nat -> Nat)\nadd n m = case n\n"), CompileError);
  try {
    parse("add : !(Nat -> Nat -> Nat)\nadd n m = case n\n");
  } catch (const CompileError& e) {
    CHECK(e.diag().code == Code::ParseError);
  }
}

TEST_CASE("parse: every tutorial listing parses") {
  for (auto* src : kListings) {
    CAPTURE(src);
    CHECK_NOTHROW(parse(src));
  }
}

TEST_CASE("parse: tensor and tuples are left-associated") {
  auto m = parse("t : Qubit * Qubit * (Qubit * Qubit * Qubit)\nt = x\n");
  const ExprPtr& ty = m[0].declaredType;
  REQUIRE(ty->kind == ExprKind::Tensor);
  // left spine: ((Qubit * Qubit) * (...))
  CHECK(ty->kids[0]->kind == ExprKind::Tensor);
  CHECK(ty->kids[0]->kids[0]->name == "Qubit");
  CHECK(ty->kids[1]->kind == ExprKind::Tensor);
}

TEST_CASE("round trip: pretty-printing then re-parsing is stable") {
  for (auto* src : kListings) {
    CAPTURE(src);
    Module m1 = parse(src);
    std::string printed = print_module(m1);
    CAPTURE(printed);
    Module m2 = parse(printed);
    CHECK(print_module(m2) == printed);
  }
}

TEST_CASE("desugar: idiom brackets expand to join/ap/pure chains") {
  Module m = parse("t : X\nt = [| f a b c |]\n");
  Module target = parse("t : X\nt = join (ap (ap (ap (pure f) a) b) c)\n");
  CHECK(print_expr(desugar(m)[0].body) == print_expr(desugar(target)[0].body));
}

TEST_CASE("desugar: natural literals become Peano numerals") {
  Module m = parse("t : Nat\nt = 1\n");
  CHECK(print_expr(desugar(m)[0].body) == "S Z");
  Module z = parse("t : Nat\nt = 0\n");
  CHECK(print_expr(desugar(z)[0].body) == "Z");
}

TEST_CASE("desugar: do-blocks become right-nested binds") {
  Module m = parse("t : X\nt = do x <- e\n       return x\n");
  Module target = parse("t : X\nt = bind e (\\ x -> return x)\n");
  CHECK(print_expr(desugar(m)[0].body) == print_expr(desugar(target)[0].body));
}

TEST_CASE("desugar: infix booleans become prefix applications") {
  Module m = parse("t : X\nt = (a && b) || c\n");
  CHECK(print_expr(desugar(m)[0].body) == "or (and a b) c");
}

TEST_CASE("desugar is idempotent on the corpus") {
  for (auto* src : kListings) {
    CAPTURE(src);
    Module once = desugar(parse(src));
    Module twice = desugar(once);
    CHECK(print_module(twice) == print_module(once));
  }
}
