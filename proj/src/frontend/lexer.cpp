#include "npefix/frontend/lexer.hpp"

#include <cctype>
#include <unordered_map>

#include "npefix/frontend/errors.hpp"

namespace npefix {

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"class", Tok::KwClass},       {"extends", Tok::KwExtends}, {"implements", Tok::KwImplements},
      {"abstract", Tok::KwAbstract}, {"interface", Tok::KwInterface}, {"static", Tok::KwStatic},
      {"void", Tok::KwVoid},         {"if", Tok::KwIf},           {"else", Tok::KwElse},
      {"while", Tok::KwWhile},       {"return", Tok::KwReturn},   {"throw", Tok::KwThrow},
      {"try", Tok::KwTry},           {"catch", Tok::KwCatch},     {"finally", Tok::KwFinally},
      {"new", Tok::KwNew},           {"null", Tok::KwNull},       {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},       {"this", Tok::KwThis},       {"int", Tok::KwInt},
      {"bool", Tok::KwBool},
  };
  return table;
}

class Lexer {
public:
  Lexer(std::string_view path, std::string_view text) : path_(path), text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token tok;
      tok.span = here();
      if (pos_ >= text_.size()) {
        tok.kind = Tok::End;
        out.push_back(std::move(tok));
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          advance();
        tok.text = std::string(text_.substr(start, pos_ - start));
        auto kw = keywords().find(tok.text);
        tok.kind = kw == keywords().end() ? Tok::Ident : kw->second;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          advance();
        tok.kind = Tok::IntLit;
        tok.text = std::string(text_.substr(start, pos_ - start));
        if (tok.text.size() > 18) fail(tok.span, "integer literal too large");
      } else if (c == '"') {
        tok.kind = Tok::StringLit;
        tok.text = string_literal(tok.span);
      } else {
        tok.kind = punct(tok.span);
      }
      tok.span.end = static_cast<uint32_t>(pos_);
      out.push_back(std::move(tok));
    }
  }

private:
  Span here() const {
    Span s;
    s.begin = s.end = static_cast<uint32_t>(pos_);
    s.line = line_;
    s.col = col_;
    return s;
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

  bool peek(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  [[noreturn]] void fail(Span at, const std::string& msg) const {
    throw SyntaxError(std::string(path_), at, msg);
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (peek("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (peek("/*")) {
        Span start = here();
        advance();
        advance();
        while (pos_ < text_.size() && !peek("*/")) advance();
        if (pos_ >= text_.size()) fail(start, "unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  std::string string_literal(Span start) {
    advance();  // opening quote
    std::string value;
    for (;;) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail(start, "unterminated string literal");
      char c = text_[pos_];
      if (c == '"') {
        advance();
        return value;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) fail(start, "unterminated string literal");
        switch (text_[pos_]) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default: fail(here(), "unknown escape sequence");
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
  }

  Tok punct(Span at) {
    struct Entry { std::string_view text; Tok kind; };
    static constexpr Entry table[] = {
        {"==", Tok::EqEq}, {"!=", Tok::NotEq}, {"<=", Tok::Le},     {">=", Tok::Ge},
        {"&&", Tok::AndAnd}, {"||", Tok::OrOr}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
        {"(", Tok::LParen}, {")", Tok::RParen}, {";", Tok::Semi},   {",", Tok::Comma},
        {".", Tok::Dot},    {"=", Tok::Assign}, {"+", Tok::Plus},   {"-", Tok::Minus},
        {"*", Tok::Star},   {"/", Tok::Slash},  {"%", Tok::Percent}, {"!", Tok::Bang},
        {"<", Tok::Lt},     {">", Tok::Gt},
    };
    for (const auto& e : table) {
      if (peek(e.text)) {
        for (size_t i = 0; i < e.text.size(); ++i) advance();
        return e.kind;
      }
    }
    fail(at, std::string("unexpected character '") + text_[pos_] + "'");
  }

  std::string_view path_;
  std::string_view text_;
  size_t pos_ = 0;
  uint32_t line_ = 1;
  uint32_t col_ = 1;
};

}  // namespace

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::StringLit: return "string literal";
    case Tok::KwClass: return "'class'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwImplements: return "'implements'";
    case Tok::KwAbstract: return "'abstract'";
    case Tok::KwInterface: return "'interface'";
    case Tok::KwStatic: return "'static'";
    case Tok::KwVoid: return "'void'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwTry: return "'try'";
    case Tok::KwCatch: return "'catch'";
    case Tok::KwFinally: return "'finally'";
    case Tok::KwNew: return "'new'";
    case Tok::KwNull: return "'null'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwThis: return "'this'";
    case Tok::KwInt: return "'int'";
    case Tok::KwBool: return "'bool'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Bang: return "'!'";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view path, std::string_view text) {
  return Lexer(path, text).run();
}

}  // namespace npefix
