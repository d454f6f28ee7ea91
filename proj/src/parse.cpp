#include "rcir/parse.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace rcir {

namespace {

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  Eq,
  Pipe,
  Slash,
  Arrow,
  Semi,
  At,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  int line = 1;
  int col = 1;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  Lexer(const std::string& text, bool allow_internal)
      : text_(text), allow_internal_(allow_internal) {}

  std::vector<Token> lex() {
    std::vector<Token> out;
    for (;;) {
      skip_ws_and_comments();
      int line = line_, col = col_;
      if (eof()) {
        out.push_back({Tok::End, "", 0, line, col});
        return out;
      }
      char c = peek();
      if (c == '(') {
        advance();
        out.push_back({Tok::LParen, "(", 0, line, col});
      } else if (c == ')') {
        advance();
        out.push_back({Tok::RParen, ")", 0, line, col});
      } else if (c == '=') {
        advance();
        out.push_back({Tok::Eq, "=", 0, line, col});
      } else if (c == '|') {
        advance();
        out.push_back({Tok::Pipe, "|", 0, line, col});
      } else if (c == '/') {
        advance();
        out.push_back({Tok::Slash, "/", 0, line, col});
      } else if (c == ';') {
        advance();
        out.push_back({Tok::Semi, ";", 0, line, col});
      } else if (c == '@') {
        advance();
        out.push_back({Tok::At, "@", 0, line, col});
      } else if (c == '-') {
        advance();
        if (!eof() && peek() == '>') {
          advance();
          out.push_back({Tok::Arrow, "->", 0, line, col});
        } else {
          throw ParseError("unexpected '-'", line, col);
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) num += take();
        if (num.size() > 9) throw ParseError("integer literal too large", line, col);
        out.push_back({Tok::Int, num, std::stol(num), line, col});
      } else if (c == '%' || is_ident_start(c)) {
        std::string name;
        if (c == '%') {
          if (!allow_internal_)
            throw ParseError("'%' names are reserved for compiler-generated bindings", line,
                             col);
          name += take();
          if (eof() || !(is_ident_char(peek())))
            throw ParseError("malformed '%' name", line, col);
        }
        while (!eof() && is_ident_char(peek())) name += take();
        if (name.size() == (name[0] == '%' ? 1u : 0u))
          throw ParseError("empty identifier", line, col);
        out.push_back({Tok::Ident, name, 0, line, col});
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
    }
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() {
    char c = text_[pos_];
    advance();
    return c;
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws_and_comments() {
    for (;;) {
      while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      // "--" starts a comment running to end of line
      if (!eof() && peek() == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (!eof() && peek() != '\n') advance();
        continue;
      }
      return;
    }
  }

  const std::string& text_;
  bool allow_internal_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  static const char* kws[] = {"def",  "ret",  "let",  "case",  "of",   "inc",  "dec",
                              "ctor", "proj", "call", "pap",   "vapp", "reset", "reuse"};
  for (const char* k : kws) {
    if (s == k) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse() {
    Program p;
    while (cur().kind != Tok::End) {
      expect_keyword("def");
      Token nameTok = expect(Tok::Ident, "constant name");
      check_name(nameTok);
      if (p.contains(nameTok.text))
        throw ParseError("duplicate definition of constant '" + nameTok.text + "'",
                         nameTok.line, nameTok.col);
      Fn fn;
      fn.pos = {nameTok.line, nameTok.col};
      expect(Tok::LParen, "'('");
      while (cur().kind != Tok::RParen) {
        Ownership ow = Ownership::Owned;
        if (cur().kind == Tok::At) {
          next();
          ow = Ownership::Borrowed;
        }
        Token pTok = expect(Tok::Ident, "parameter name");
        check_name(pTok);
        fn.params.push_back(pTok.text);
        fn.borrows.push_back(ow);
      }
      next();  // ')'
      expect(Tok::Eq, "'='");
      fn.body = parse_body();
      p.add(nameTok.text, std::move(fn));
    }
    return p;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  Token expect(Tok kind, const char* what) {
    if (cur().kind != kind)
      throw ParseError(std::string("expected ") + what + ", got '" + cur().text + "'",
                       cur().line, cur().col);
    return next();
  }

  void expect_keyword(const char* kw) {
    if (cur().kind != Tok::Ident || cur().text != kw)
      throw ParseError(std::string("expected '") + kw + "', got '" + cur().text + "'",
                       cur().line, cur().col);
    next();
  }

  bool at_keyword(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  void check_name(const Token& t) {
    if (is_keyword(t.text))
      throw ParseError("'" + t.text + "' is a keyword", t.line, t.col);
  }

  Var parse_var() {
    Token t = expect(Tok::Ident, "variable");
    check_name(t);
    return t.text;
  }

  Const parse_const() {
    Token t = expect(Tok::Ident, "constant");
    check_name(t);
    return t.text;
  }

  int parse_index(const char* what) {
    Token t = expect(Tok::Int, what);
    if (t.value < 1) throw ParseError(std::string(what) + " must be >= 1", t.line, t.col);
    return static_cast<int>(t.value);
  }

  std::vector<Var> parse_var_list() {
    std::vector<Var> vs;
    while (cur().kind == Tok::Ident && !is_keyword(cur().text)) vs.push_back(parse_var());
    return vs;
  }

  Expr parse_expr() {
    Token t = cur();
    if (at_keyword("ctor")) {
      next();
      int i = parse_index("constructor index");
      return Ctor{i, parse_var_list()};
    }
    if (at_keyword("proj")) {
      next();
      int i = parse_index("field index");
      return Proj{i, parse_var()};
    }
    if (at_keyword("call")) {
      next();
      Const c = parse_const();
      return FullApp{c, parse_var_list()};
    }
    if (at_keyword("pap")) {
      next();
      Const c = parse_const();
      return PartApp{c, parse_var_list()};
    }
    if (at_keyword("vapp")) {
      next();
      Var f = parse_var();
      Var a = parse_var();
      return VarApp{f, a};
    }
    if (at_keyword("reset")) {
      next();
      return Reset{parse_var()};
    }
    if (at_keyword("reuse")) {
      next();
      Var tok = parse_var();
      expect_keyword("ctor");
      int i = parse_index("constructor index");
      return Reuse{tok, i, parse_var_list()};
    }
    throw ParseError("expected expression, got '" + t.text + "'", t.line, t.col);
  }

  Body parse_body() {
    Token t = cur();
    SourcePos pos{t.line, t.col};
    if (t.kind == Tok::LParen) {
      next();
      Body b = parse_body();
      expect(Tok::RParen, "')'");
      return b;
    }
    if (at_keyword("ret")) {
      next();
      return make_ret(parse_var(), pos);
    }
    if (at_keyword("let")) {
      next();
      Var x = parse_var();
      expect(Tok::Eq, "'='");
      Expr e = parse_expr();
      expect(Tok::Semi, "';'");
      return make_let(std::move(x), std::move(e), parse_body(), pos);
    }
    if (at_keyword("inc")) {
      next();
      Var x = parse_var();
      expect(Tok::Semi, "';'");
      return make_inc(std::move(x), parse_body(), pos);
    }
    if (at_keyword("dec")) {
      next();
      Var x = parse_var();
      expect(Tok::Semi, "';'");
      return make_dec(std::move(x), parse_body(), pos);
    }
    if (at_keyword("case")) {
      next();
      Var x = parse_var();
      expect_keyword("of");
      std::vector<CaseArm> arms;
      while (cur().kind == Tok::Pipe) {
        Token pipeTok = next();
        Token cTok = expect(Tok::Ident, "'C'");
        if (cTok.text != "C")
          throw ParseError("expected 'C' in case arm", cTok.line, cTok.col);
        int idx = parse_index("constructor index");
        expect(Tok::Slash, "'/'");
        Token arityTok = expect(Tok::Int, "arity");
        if (arityTok.value < 0)
          throw ParseError("arity must be >= 0", arityTok.line, arityTok.col);
        expect(Tok::Arrow, "'->'");
        if (idx != static_cast<int>(arms.size()) + 1)
          throw ParseError("case arm index " + std::to_string(idx) +
                               " out of order (expected " +
                               std::to_string(arms.size() + 1) + ")",
                           pipeTok.line, pipeTok.col);
        arms.push_back(CaseArm{static_cast<int>(arityTok.value), parse_body()});
      }
      if (arms.empty())
        throw ParseError("case requires at least one arm", t.line, t.col);
      return make_case(std::move(x), std::move(arms), pos);
    }
    throw ParseError("expected function body, got '" + t.text + "'", t.line, t.col);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Program parse_program(const std::string& text, const ParseOptions& opts) {
  Lexer lex(text, opts.allow_internal_names);
  Parser parser(lex.lex());
  return parser.parse();
}

}  // namespace rcir
