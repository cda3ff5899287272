#include <cctype>
#include <unordered_map>

#include "dpq/surface/token.hpp"

namespace dpq::surface {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::KwData: return "'data'";
    case Tok::KwSimple: return "'simple'";
    case Tok::KwObject: return "'object'";
    case Tok::KwGate: return "'gate'";
    case Tok::KwClass: return "'class'";
    case Tok::KwInstance: return "'instance'";
    case Tok::KwWhere: return "'where'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwCase: return "'case'";
    case Tok::KwOf: return "'of'";
    case Tok::KwDo: return "'do'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwType: return "'Type'";
    case Tok::Ident: return "identifier";
    case Tok::ConId: return "constructor identifier";
    case Tok::NatLit: return "natural literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::IdiomOpen: return "'[|'";
    case Tok::IdiomClose: return "'|]'";
    case Tok::Arrow: return "'->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::BindArrow: return "'<-'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Pipe: return "'|'";
    case Tok::Star: return "'*'";
    case Tok::Bang: return "'!'";
    case Tok::Lambda: return "lambda";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Underscore: return "'_'";
    case Tok::End: return "end of input";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string, Tok>& keywords() {
  static const std::unordered_map<std::string, Tok> kw = {
      {"data", Tok::KwData},   {"simple", Tok::KwSimple},
      {"object", Tok::KwObject}, {"gate", Tok::KwGate},
      {"class", Tok::KwClass}, {"instance", Tok::KwInstance},
      {"where", Tok::KwWhere}, {"let", Tok::KwLet},
      {"in", Tok::KwIn},       {"case", Tok::KwCase},
      {"of", Tok::KwOf},       {"do", Tok::KwDo},
      {"forall", Tok::KwForall},
  };
  return kw;
}

bool is_ident_start(char c) { return std::islower((unsigned char)c) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(Span sp, const std::string& msg) {
    throw CompileError(Code::LexError, sp, msg);
  }

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  // Advances one code point; column counts code points.
  void bump() {
    char c = src[pos];
    if (c == '\n') {
      line++;
      col = 1;
      pos++;
      return;
    }
    unsigned char u = (unsigned char)c;
    size_t len = u < 0x80 ? 1 : u < 0xE0 ? 2 : u < 0xF0 ? 3 : 4;
    pos += len;
    col++;
  }

  void skip_space_and_comments() {
    while (pos < src.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (c == '-' && peek(1) == '-') {
        while (pos < src.size() && peek() != '\n') bump();
      } else {
        break;
      }
    }
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Span sp{line, col};
      if (pos >= src.size()) {
        out.push_back({Tok::End, "", sp});
        return out;
      }
      char c = peek();
      // Unicode lambda (U+03BB)
      if ((unsigned char)c == 0xCE && (unsigned char)peek(1) == 0xBB) {
        bump();
        out.push_back({Tok::Lambda, "\xCE\xBB", sp});
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        std::string text;
        while (std::isdigit((unsigned char)peek())) {
          text += peek();
          bump();
        }
        if (is_ident_char(peek()))
          fail(sp, "identifiers may not start with a digit");
        Token t{Tok::NatLit, text, sp};
        t.nat = std::stoull(text);
        out.push_back(t);
        continue;
      }
      if (std::isupper((unsigned char)c)) {
        std::string text;
        while (is_ident_char(peek())) {
          text += peek();
          bump();
        }
        if (text == "Type")
          out.push_back({Tok::KwType, text, sp});
        else
          out.push_back({Tok::ConId, text, sp});
        continue;
      }
      if (is_ident_start(c)) {
        std::string text;
        while (is_ident_char(peek())) {
          text += peek();
          bump();
        }
        if (text == "_") {
          out.push_back({Tok::Underscore, text, sp});
        } else {
          auto it = keywords().find(text);
          out.push_back({it != keywords().end() ? it->second : Tok::Ident, text, sp});
        }
        continue;
      }
      auto sym = [&](Tok k, int n, const char* text) {
        for (int i = 0; i < n; i++) bump();
        out.push_back({k, text, sp});
      };
      switch (c) {
        case '(': sym(Tok::LParen, 1, "("); break;
        case ')': sym(Tok::RParen, 1, ")"); break;
        case '{': sym(Tok::LBrace, 1, "{"); break;
        case '}': sym(Tok::RBrace, 1, "}"); break;
        case ']': sym(Tok::RBracket, 1, "]"); break;
        case ':': sym(Tok::Colon, 1, ":"); break;
        case ',': sym(Tok::Comma, 1, ","); break;
        case '*': sym(Tok::Star, 1, "*"); break;
        case '!': sym(Tok::Bang, 1, "!"); break;
        case '\\': sym(Tok::Lambda, 1, "\\"); break;
        case '[':
          if (peek(1) == '|') sym(Tok::IdiomOpen, 2, "[|");
          else sym(Tok::LBracket, 1, "[");
          break;
        case '|':
          if (peek(1) == ']') sym(Tok::IdiomClose, 2, "|]");
          else if (peek(1) == '|') sym(Tok::OrOr, 2, "||");
          else sym(Tok::Pipe, 1, "|");
          break;
        case '&':
          if (peek(1) == '&') sym(Tok::AndAnd, 2, "&&");
          else fail(sp, "stray '&'");
          break;
        case '-':
          if (peek(1) == '>') sym(Tok::Arrow, 2, "->");
          else fail(sp, "stray '-'");
          break;
        case '=':
          if (peek(1) == '>') sym(Tok::FatArrow, 2, "=>");
          else sym(Tok::Equals, 1, "=");
          break;
        case '<':
          if (peek(1) == '-') sym(Tok::BindArrow, 2, "<-");
          else fail(sp, "stray '<'");
          break;
        default:
          fail(sp, std::string("illegal character '") + c + "'");
      }
    }
  }
};

}  // namespace

std::vector<Token> tokenize(const std::string& source) {
  return Lexer(source).run();
}

}  // namespace dpq::surface
