#pragma once

// Random MiniJ programs with nested try/catch/finally, calls between methods
// and throw sites (explicit throws and null dereferences), plus an observer
// that checks the catch-stack prediction at every throw against where the
// exception actually ends up.

#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "npefix/runtime/interpreter.hpp"

namespace npefix::testing {

class RandomTryProgram {
public:
  explicit RandomTryProgram(uint64_t seed) : rng_(seed) {}

  std::string generate() {
    std::ostringstream out;
    out << "class E1 extends Exception { }\n"
           "class E2 extends E1 { }\n"
           "class E3 extends Exception { }\n"
           "class Node { void f() { } }\n"
           "class Tick {\n"
           "  static int n = 0;\n"
           "  static int period = " << pick(2, 4) << ";\n"
           "  static bool next() { n = n + 1; return n % period == 0; }\n"
           "}\n"
           "class P {\n";
    int methods = pick(1, 4);
    for (int m = methods - 1; m >= 0; --m) {
      method_ = m;
      methods_ = methods;
      names_ = 0;
      out << "  static void m" << m << "() {\n";
      block(out, 2, 0);
      out << "  }\n";
    }
    out << "  static void main() {\n    m0();\n    print(\"end\");\n  }\n}\n";
    return out.str();
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string exception_type() {
    static const char* kTypes[] = {"E1", "E2", "E3", "Exception", "NullPointerException"};
    return kTypes[pick(0, 4)];
  }

  std::string thrown_type() {
    static const char* kTypes[] = {"E1", "E2", "E3"};
    return kTypes[pick(0, 2)];
  }

  void indent(std::ostream& out, int level) { out << std::string(static_cast<size_t>(level) * 2, ' '); }

  // No throw sites inside finally blocks: they would discard a pending
  // exception, which is then neither caught nor uncaught.
  void block(std::ostream& out, int level, int depth, bool in_finally = false) {
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) stmt(out, level, depth, in_finally);
  }

  void stmt(std::ostream& out, int level, int depth, bool in_finally) {
    int kind = pick(0, 9);
    indent(out, level);
    if (kind <= 1 || (in_finally && kind <= 6)) {
      out << "print(\"s" << names_++ << "\");\n";
    } else if (kind <= 3) {
      out << "if (Tick.next()) { throw new " << thrown_type() << "(); }\n";
    } else if (kind == 4) {
      std::string v = "n" + std::to_string(names_++);
      out << "Node " << v << " = null;\n";
      indent(out, level);
      out << "if (Tick.next()) { " << v << ".f(); }\n";
    } else if (kind == 5 && method_ + 1 < methods_) {
      out << "m" << pick(method_ + 1, methods_ - 1) << "();\n";
    } else if (depth < 3 && !in_finally) {
      try_stmt(out, level, depth);
    } else {
      out << "print(\"s" << names_++ << "\");\n";
    }
  }

  void try_stmt(std::ostream& out, int level, int depth) {
    out << "try {\n";
    block(out, level + 1, depth + 1);
    indent(out, level);
    out << "}";
    int catches = pick(0, 2);
    bool has_finally = catches == 0 || pick(0, 1) == 1;
    for (int c = 0; c < catches; ++c) {
      out << " catch (" << exception_type() << " e" << names_++ << ") {\n";
      block(out, level + 1, depth + 1);
      indent(out, level);
      out << "}";
    }
    if (has_finally) {
      out << " finally {\n";
      block(out, level + 1, depth + 1, true);
      indent(out, level);
      out << "}";
    }
    out << "\n";
  }

  std::mt19937_64 rng_;
  int method_ = 0;
  int methods_ = 1;
  int names_ = 0;
};

/// Records, per exception object, the catch-stack prediction at its throw and
/// whether the interpreter caught it or let it escape.
class UnwindOracle : public ExecutionObserver {
public:
  void on_throw(const Object* exc, bool predicted) override { predicted_[exc] = predicted; }
  void on_catch(const Object* exc) override { actual_[exc] = true; }
  void on_uncaught(const Object* exc) override { actual_[exc] = false; }

  size_t queries() const { return predicted_.size(); }
  size_t agreements() const {
    size_t n = 0;
    for (const auto& [exc, p] : predicted_) {
      auto it = actual_.find(exc);
      if (it != actual_.end() && it->second == p) ++n;
    }
    return n;
  }

private:
  std::map<const Object*, bool> predicted_;
  std::map<const Object*, bool> actual_;
};

}  // namespace npefix::testing
