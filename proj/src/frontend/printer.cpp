#include "npefix/frontend/printer.hpp"

#include <sstream>

namespace npefix {

namespace {

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq: case BinaryOp::Ne: return 3;
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge: return 4;
    case BinaryOp::Add: case BinaryOp::Sub: return 5;
    default: return 6;
  }
}

std::string pad(int indent) { return std::string(static_cast<size_t>(indent) * 4, ' '); }

void print_args(std::ostringstream& out, const std::vector<Expr>& args) {
  out << '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out << ", ";
    out << print_expr(args[i]);
  }
  out << ')';
}

std::string operand(const Expr& e, int parent_prec, bool right) {
  std::string s = print_expr(e);
  if (const auto* b = e.as<Binary>()) {
    int p = precedence(b->op);
    if (p < parent_prec || (right && p == parent_prec)) return "(" + s + ")";
  }
  return s;
}

std::string receiver(const Expr& e) {
  std::string s = print_expr(e);
  if (e.is<Binary>() || e.is<Unary>()) return "(" + s + ")";
  return s;
}

void print_block_into(std::ostringstream& out, const Block& block, int indent) {
  out << "{\n";
  for (const auto& s : block.stmts) out << print_stmt(s, indent + 1);
  out << pad(indent) << "}";
}

}  // namespace

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

std::string method_signature(const ClassDecl& cls, const MethodDecl& method) {
  std::string sig = cls.name + "." + (method.is_constructor ? "<init>" : method.name) + "(";
  for (size_t i = 0; i < method.params.size(); ++i) {
    if (i) sig += ",";
    sig += method.params[i].type;
  }
  return sig + ")";
}

std::string quote_string(std::string_view raw) {
  std::string out = "\"";
  for (char c : raw) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string print_expr(const Expr& expr) {
  std::ostringstream out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out << n.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, StringLit>) {
          out << quote_string(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          out << "null";
        } else if constexpr (std::is_same_v<T, ThisExpr>) {
          out << "this";
        } else if constexpr (std::is_same_v<T, Name>) {
          out << n.id;
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          out << receiver(*n.object) << '.' << n.field;
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver) out << receiver(*n.receiver) << '.';
          out << n.method;
          print_args(out, n.args);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          out << "new " << n.type;
          print_args(out, n.args);
        } else if constexpr (std::is_same_v<T, Unary>) {
          out << (n.op == UnaryOp::Not ? "!" : "-") << receiver(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(n.op);
          out << operand(*n.lhs, p, false) << ' ' << to_string(n.op) << ' '
              << operand(*n.rhs, p, true);
        }
      },
      expr.node);
  return out.str();
}

std::string print_block(const Block& block, int indent) {
  std::ostringstream out;
  print_block_into(out, block, indent);
  return out.str();
}

std::string print_stmt(const Stmt& stmt, int indent) {
  std::ostringstream out;
  out << pad(indent);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          out << n.type << ' ' << n.name;
          if (n.init) out << " = " << print_expr(*n.init);
          out << ';';
        } else if constexpr (std::is_same_v<T, Assign>) {
          out << print_expr(n.target) << " = " << print_expr(n.value) << ';';
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          out << print_expr(n.expr) << ';';
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out << "if (" << print_expr(n.cond) << ") ";
          print_block_into(out, n.then_block, indent);
          if (n.else_block) {
            out << " else ";
            print_block_into(out, *n.else_block, indent);
          }
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          out << "while (" << print_expr(n.cond) << ") ";
          print_block_into(out, n.body, indent);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          out << "return";
          if (n.value) out << ' ' << print_expr(*n.value);
          out << ';';
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          out << "throw " << print_expr(n.value) << ';';
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          out << "try ";
          print_block_into(out, n.body, indent);
          for (const auto& c : n.catches) {
            out << " catch (" << c.type << ' ' << c.var << ") ";
            print_block_into(out, c.body, indent);
          }
          if (n.finally_block) {
            out << " finally ";
            print_block_into(out, *n.finally_block, indent);
          }
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          print_block_into(out, n.block, indent);
        }
      },
      stmt.node);
  out << '\n';
  return out.str();
}

namespace {

void print_params(std::ostringstream& out, const MethodDecl& m) {
  out << '(';
  for (size_t i = 0; i < m.params.size(); ++i) {
    if (i) out << ", ";
    out << m.params[i].type << ' ' << m.params[i].name;
  }
  out << ')';
}

}  // namespace

std::string print_class(const ClassDecl& cls) {
  std::ostringstream out;
  switch (cls.kind) {
    case ClassKind::Interface:
      out << "interface " << cls.name;
      if (!cls.implements.empty()) out << " extends ";
      break;
    case ClassKind::Abstract:
      out << "abstract class " << cls.name;
      break;
    case ClassKind::Class:
      out << "class " << cls.name;
      break;
  }
  if (cls.kind != ClassKind::Interface) {
    if (cls.extends) out << " extends " << *cls.extends;
    if (!cls.implements.empty()) out << " implements ";
  }
  for (size_t i = 0; i < cls.implements.size(); ++i) {
    if (i) out << ", ";
    out << cls.implements[i];
  }
  out << " {\n";
  for (const auto& f : cls.fields) {
    out << pad(1) << (f.is_static ? "static " : "") << f.type << ' ' << f.name;
    if (f.init) out << " = " << print_expr(*f.init);
    out << ";\n";
  }
  for (const auto& c : cls.constructors) {
    out << pad(1) << c.name;
    print_params(out, c);
    out << ' ';
    print_block_into(out, *c.body, 1);
    out << '\n';
  }
  for (const auto& m : cls.methods) {
    out << pad(1);
    if (m.is_abstract && cls.kind != ClassKind::Interface) out << "abstract ";
    if (m.is_static) out << "static ";
    out << m.return_type << ' ' << m.name;
    print_params(out, m);
    if (m.body) {
      out << ' ';
      print_block_into(out, *m.body, 1);
      out << '\n';
    } else {
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string print_unit(const CompilationUnit& unit) {
  std::string out;
  for (size_t i = 0; i < unit.classes.size(); ++i) {
    if (i) out += '\n';
    out += print_class(unit.classes[i]);
  }
  return out;
}

std::string print_program(const Program& program) {
  if (program.units.size() == 1) return print_unit(program.units.front());
  std::string out;
  for (const auto& unit : program.units) {
    out += "// file: " + unit.path + "\n";
    out += print_unit(unit);
  }
  return out;
}

}  // namespace npefix
