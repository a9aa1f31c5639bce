#include "npefix/frontend/parser.hpp"

#include <fstream>
#include <sstream>

#include "npefix/frontend/errors.hpp"
#include "npefix/frontend/lexer.hpp"

namespace npefix {

namespace {

class Parser {
public:
  Parser(std::string_view path, std::string_view text)
      : path_(path), tokens_(tokenize(path, text)) {}

  CompilationUnit unit() {
    CompilationUnit cu;
    cu.path = path_;
    if (at(Tok::End)) fail_expected({"'class'", "'abstract'", "'interface'"});
    while (!at(Tok::End)) cu.classes.push_back(class_decl());
    return cu;
  }

  std::vector<Stmt> statements() {
    std::vector<Stmt> out;
    while (!at(Tok::End)) out.push_back(statement());
    return out;
  }

  Expr full_expression() {
    Expr e = expression();
    expect(Tok::End);
    return e;
  }

private:
  // -- token helpers ---------------------------------------------------------

  const Token& cur() const { return tokens_[pos_]; }
  const Token& ahead(size_t n) const {
    size_t i = std::min(pos_ + n, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(Tok k) const { return cur().kind == k; }

  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok k) {
    if (!at(k)) fail_expected({std::string(describe(k))});
    return tokens_[pos_++];
  }

  [[noreturn]] void fail_expected(std::vector<std::string> expected) const {
    std::string msg = "expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + std::string(describe(cur().kind));
    if (cur().kind == Tok::Ident) msg += " '" + cur().text + "'";
    throw SyntaxError(path_, cur().span, msg, std::move(expected));
  }

  uint32_t last_end() const { return pos_ == 0 ? 0 : tokens_[pos_ - 1].span.end; }

  Span finish(Span start) const {
    start.end = std::max(start.begin, last_end());
    return start;
  }

  bool at_type_start() const {
    return at(Tok::KwInt) || at(Tok::KwBool) || at(Tok::Ident);
  }

  std::string type_name() {
    if (accept(Tok::KwInt)) return "int";
    if (accept(Tok::KwBool)) return "bool";
    if (at(Tok::Ident)) return tokens_[pos_++].text;
    fail_expected({"type name"});
  }

  // -- declarations ----------------------------------------------------------

  ClassDecl class_decl() {
    ClassDecl cls;
    Span start = cur().span;
    if (accept(Tok::KwInterface)) {
      cls.kind = ClassKind::Interface;
      cls.name = expect(Tok::Ident).text;
      if (accept(Tok::KwExtends)) {
        do cls.implements.push_back(expect(Tok::Ident).text);
        while (accept(Tok::Comma));
      }
    } else {
      if (accept(Tok::KwAbstract)) cls.kind = ClassKind::Abstract;
      if (!at(Tok::KwClass))
        fail_expected(cls.kind == ClassKind::Abstract
                          ? std::vector<std::string>{"'class'"}
                          : std::vector<std::string>{"'class'", "'abstract'", "'interface'"});
      ++pos_;
      cls.name = expect(Tok::Ident).text;
      if (accept(Tok::KwExtends)) cls.extends = expect(Tok::Ident).text;
      if (accept(Tok::KwImplements)) {
        do cls.implements.push_back(expect(Tok::Ident).text);
        while (accept(Tok::Comma));
      }
    }
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail_expected({"'}'"});
      member(cls);
    }
    expect(Tok::RBrace);
    cls.span = finish(start);
    return cls;
  }

  void member(ClassDecl& cls) {
    Span start = cur().span;
    bool is_abstract = accept(Tok::KwAbstract);
    bool is_static = accept(Tok::KwStatic);

    if (at(Tok::Ident) && cur().text == cls.name && ahead(1).kind == Tok::LParen) {
      MethodDecl ctor;
      ctor.is_constructor = true;
      ctor.return_type = "void";
      ctor.name = tokens_[pos_++].text;
      ctor.params = params();
      ctor.body = block();
      ctor.span = finish(start);
      if (is_abstract || is_static)
        throw SyntaxError(path_, start, "constructors cannot be abstract or static");
      cls.constructors.push_back(std::move(ctor));
      return;
    }

    std::string type;
    if (accept(Tok::KwVoid)) {
      type = "void";
    } else if (at_type_start()) {
      type = type_name();
    } else {
      fail_expected({"type name", "'void'", "constructor"});
    }
    Token name = expect(Tok::Ident);

    if (at(Tok::LParen)) {
      MethodDecl m;
      m.is_static = is_static;
      m.return_type = type;
      m.name = name.text;
      m.params = params();
      if (accept(Tok::Semi)) {
        m.is_abstract = true;
      } else {
        if (is_abstract) fail_expected({"';'"});
        m.body = block();
      }
      if (is_abstract) m.is_abstract = true;
      m.span = finish(start);
      cls.methods.push_back(std::move(m));
      return;
    }

    if (type == "void") throw SyntaxError(path_, name.span, "fields cannot have type void");
    if (is_abstract) throw SyntaxError(path_, start, "fields cannot be abstract");
    FieldDecl f;
    f.is_static = is_static;
    f.type = type;
    f.name = name.text;
    if (accept(Tok::Assign)) f.init = expression();
    expect(Tok::Semi);
    f.span = finish(start);
    cls.fields.push_back(std::move(f));
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.span = cur().span;
        p.type = type_name();
        p.name = expect(Tok::Ident).text;
        p.span = finish(p.span);
        out.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    return out;
  }

  // -- statements ------------------------------------------------------------

  Block block() {
    Block b;
    Span start = cur().span;
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail_expected({"'}'"});
      b.stmts.push_back(statement());
    }
    expect(Tok::RBrace);
    b.span = finish(start);
    return b;
  }

  // Bodies of if/while accept a single statement, normalised to a block.
  Block body() {
    if (at(Tok::LBrace)) return block();
    Block b;
    b.span = cur().span;
    b.stmts.push_back(statement());
    b.span = finish(b.span);
    return b;
  }

  bool at_declaration() const {
    if (at(Tok::KwInt) || at(Tok::KwBool)) return true;
    return at(Tok::Ident) && ahead(1).kind == Tok::Ident;
  }

  Stmt statement() {
    Span start = cur().span;
    Stmt s;
    if (at(Tok::LBrace)) {
      s.node = BlockStmt{block()};
    } else if (accept(Tok::KwIf)) {
      expect(Tok::LParen);
      IfStmt node{expression(), {}, std::nullopt};
      expect(Tok::RParen);
      node.then_block = body();
      if (accept(Tok::KwElse)) node.else_block = body();
      s.node = std::move(node);
    } else if (accept(Tok::KwWhile)) {
      expect(Tok::LParen);
      WhileStmt node{expression(), {}};
      expect(Tok::RParen);
      node.body = body();
      s.node = std::move(node);
    } else if (accept(Tok::KwReturn)) {
      ReturnStmt node;
      if (!at(Tok::Semi)) node.value = expression();
      expect(Tok::Semi);
      s.node = std::move(node);
    } else if (accept(Tok::KwThrow)) {
      ThrowStmt node{expression()};
      expect(Tok::Semi);
      s.node = std::move(node);
    } else if (accept(Tok::KwTry)) {
      TryStmt node;
      node.body = block();
      while (at(Tok::KwCatch)) {
        CatchClause c;
        c.span = cur().span;
        ++pos_;
        expect(Tok::LParen);
        c.type = expect(Tok::Ident).text;
        c.var = expect(Tok::Ident).text;
        expect(Tok::RParen);
        c.body = block();
        c.span = finish(c.span);
        node.catches.push_back(std::move(c));
      }
      if (accept(Tok::KwFinally)) node.finally_block = block();
      if (node.catches.empty() && !node.finally_block) fail_expected({"'catch'", "'finally'"});
      s.node = std::move(node);
    } else if (at_declaration()) {
      VarDecl node;
      node.type = type_name();
      node.name = expect(Tok::Ident).text;
      if (accept(Tok::Assign)) node.init = expression();
      expect(Tok::Semi);
      s.node = std::move(node);
    } else {
      Expr e = expression();
      if (accept(Tok::Assign)) {
        if (!e.is<Name>() && !e.is<FieldAccess>())
          throw SyntaxError(path_, e.span, "left-hand side of assignment must be a variable or field");
        Expr value = expression();
        s.node = Assign{std::move(e), std::move(value)};
      } else {
        s.node = ExprStmt{std::move(e)};
      }
      expect(Tok::Semi);
    }
    s.span = finish(start);
    return s;
  }

  // -- expressions -----------------------------------------------------------

  Expr make(Expr::Node node, Span start) {
    Expr e;
    e.node = std::move(node);
    e.span = finish(start);
    return e;
  }

  Expr expression() { return binary(0); }

  static int precedence(Tok k) {
    switch (k) {
      case Tok::OrOr: return 1;
      case Tok::AndAnd: return 2;
      case Tok::EqEq: case Tok::NotEq: return 3;
      case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: return 4;
      case Tok::Plus: case Tok::Minus: return 5;
      case Tok::Star: case Tok::Slash: case Tok::Percent: return 6;
      default: return -1;
    }
  }

  static BinaryOp binary_op(Tok k) {
    switch (k) {
      case Tok::OrOr: return BinaryOp::Or;
      case Tok::AndAnd: return BinaryOp::And;
      case Tok::EqEq: return BinaryOp::Eq;
      case Tok::NotEq: return BinaryOp::Ne;
      case Tok::Lt: return BinaryOp::Lt;
      case Tok::Le: return BinaryOp::Le;
      case Tok::Gt: return BinaryOp::Gt;
      case Tok::Ge: return BinaryOp::Ge;
      case Tok::Plus: return BinaryOp::Add;
      case Tok::Minus: return BinaryOp::Sub;
      case Tok::Star: return BinaryOp::Mul;
      case Tok::Slash: return BinaryOp::Div;
      default: return BinaryOp::Mod;
    }
  }

  // Precedence climbing; all binary operators are left-associative.
  Expr binary(int min_prec) {
    Span start = cur().span;
    Expr lhs = unary();
    for (;;) {
      int prec = precedence(cur().kind);
      if (prec < 0 || prec < min_prec) break;
      BinaryOp op = binary_op(cur().kind);
      ++pos_;
      Expr rhs = binary(prec + 1);
      lhs = make(Binary{op, std::move(lhs), std::move(rhs)}, start);
    }
    return lhs;
  }

  Expr unary() {
    Span start = cur().span;
    if (accept(Tok::Bang)) return make(Unary{UnaryOp::Not, unary()}, start);
    if (accept(Tok::Minus)) return make(Unary{UnaryOp::Neg, unary()}, start);
    return postfix();
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do args.push_back(expression());
      while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    return args;
  }

  Expr postfix() {
    Span start = cur().span;
    Expr e = primary();
    while (accept(Tok::Dot)) {
      const Token& name = expect(Tok::Ident);
      Span member = name.span;
      if (at(Tok::LParen)) {
        MethodCall call;
        call.receiver = std::move(e);
        call.method = name.text;
        call.member_span = member;
        call.args = arguments();
        e = make(std::move(call), start);
      } else {
        e = make(FieldAccess{std::move(e), name.text, member}, start);
      }
    }
    return e;
  }

  Expr primary() {
    Span start = cur().span;
    switch (cur().kind) {
      case Tok::IntLit: {
        int64_t v = std::stoll(tokens_[pos_++].text);
        return make(IntLit{v}, start);
      }
      case Tok::StringLit: return make(StringLit{tokens_[pos_++].text}, start);
      case Tok::KwTrue: ++pos_; return make(BoolLit{true}, start);
      case Tok::KwFalse: ++pos_; return make(BoolLit{false}, start);
      case Tok::KwNull: ++pos_; return make(NullLit{}, start);
      case Tok::KwThis: ++pos_; return make(ThisExpr{}, start);
      case Tok::KwNew: {
        ++pos_;
        NewExpr n;
        n.type = expect(Tok::Ident).text;
        n.args = arguments();
        return make(std::move(n), start);
      }
      case Tok::LParen: {
        ++pos_;
        Expr inner = expression();
        expect(Tok::RParen);
        inner.span = finish(start);
        return inner;
      }
      case Tok::Ident: {
        const Token& name = tokens_[pos_++];
        if (at(Tok::LParen)) {
          MethodCall call;
          call.method = name.text;
          call.member_span = name.span;
          call.args = arguments();
          return make(std::move(call), start);
        }
        return make(Name{name.text}, start);
      }
      default:
        fail_expected({"expression"});
    }
  }

  std::string path_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace

SourceUnit read_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceUnit{path, ss.str()};
}

CompilationUnit parse_unit(const SourceUnit& source) {
  return Parser(source.path, source.text).unit();
}

Program parse_program(const std::vector<SourceUnit>& sources) {
  Program p;
  for (const auto& s : sources) p.units.push_back(parse_unit(s));
  return p;
}

std::vector<Stmt> parse_statements(std::string_view path, std::string_view text) {
  return Parser(path, text).statements();
}

Expr parse_expression(std::string_view path, std::string_view text) {
  return Parser(path, text).full_expression();
}

}  // namespace npefix
