#include "doctest.h"

#include <map>
#include <set>

#include "../support/test_util.hpp"
#include "npefix/frontend/derefs.hpp"
#include "npefix/frontend/errors.hpp"
#include "npefix/frontend/printer.hpp"

using namespace npefix;
using npefix::testing::checked;
using npefix::testing::parsed;

TEST_CASE("parse: empty void method has no dereference sites") {
  auto p = checked("class A { void m() { } }");
  REQUIRE(p->program.units.size() == 1);
  const auto& classes = p->program.units[0].classes;
  REQUIRE(classes.size() == 1);
  REQUIRE(classes[0].methods.size() == 1);
  CHECK(classes[0].methods[0].return_type == "void");
  CHECK(enumerate_dereferences(p->program).empty());
}

TEST_CASE("parse: single call yields one site typed by the receiver") {
  auto p = checked("class B { void f() { } }\nclass A { void m(B b) { b.f(); } }");
  auto sites = enumerate_dereferences(p->program);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].receiver_type == "B");
  CHECK(sites[0].key == "T.mj:2:27");
  CHECK(sites[0].method_signature == "A.m(B)");
  CHECK(sites[0].skippable);
}

TEST_CASE("parse: unbalanced braces are a syntax error at the offending token") {
  try {
    parsed("class A {\n  void m() {\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.span().line == 3);
    REQUIRE_FALSE(e.expected().empty());
    CHECK(e.expected().front() == "'}'");
  }
}

TEST_CASE("syntax errors report expected tokens") {
  try {
    parsed("class A { void m() { int x = ; } }");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.span().col == 30);
    CHECK(e.expected() == std::vector<std::string>{"expression"});
  }
}

TEST_CASE("type errors carry a span and message") {
  CHECK_THROWS_AS(checked("class A { void m() { int x = true; } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { void m() { B b = null; } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { void n() { return 1; } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { int m() { } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { int m(bool c) { if (c) { return 1; } } }"), TypeError);
  CHECK_NOTHROW(checked("class A { int m(bool c) { if (c) { return 1; } else { throw new Exception(); } } }"));
  CHECK_NOTHROW(checked("class A { int m() { while (true) { } } }"));
  CHECK_NOTHROW(checked("class A { int m() { try { return 1; } catch (Exception e) { return 2; } } }"));
  CHECK_THROWS_AS(checked("abstract class S { } class A { void m() { S s = new S(); } }"), TypeError);
  CHECK_THROWS_AS(checked("interface I { void f(); } class A implements I { }"), TypeError);
  CHECK_THROWS_AS(checked("class A extends B { } class B extends A { }"), TypeError);
  CHECK_THROWS_AS(checked("class A { void m() { int x = 1; int x = 2; } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { static void m() { this.m(); } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { void m() { throw 3; } }"), TypeError);
  try {
    checked("class A {\n void m() {\n  int y = \"s\";\n }\n}");
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(e.span().line == 3);
    CHECK(e.message().find("cannot assign") != std::string::npos);
  }
}

TEST_CASE("reserved prefix is rejected in user code") {
  CHECK_THROWS_AS(checked("class A { void m() { int __npefix_x = 1; } }"), TypeError);
  CHECK_THROWS_AS(checked("class A { void m() { __npefix_freeId(); } }"), TypeError);
  CHECK_NOTHROW(checked("class A { void m() { int __npefix_x = __npefix_freeId(); } }", "T.mj", true));
}

TEST_CASE("type table: builtin exception hierarchy") {
  auto p = checked("class MyEx extends NullPointerException { }");
  const auto& t = p->types;
  CHECK(t.is_subtype("NullPointerException", "Exception"));
  CHECK(t.is_subtype("AssertionError", "Exception"));
  CHECK(t.is_subtype("MyEx", "Exception"));
  CHECK(t.is_subtype("MyEx", "MyEx"));
  CHECK_FALSE(t.is_subtype("Exception", "MyEx"));
  CHECK_FALSE(t.is_subtype(std::string(kForceReturnError), "Exception"));
}

TEST_CASE("type table: subtypes through interfaces and abstract classes") {
  auto p = checked(R"(
interface Shape { int area(); }
abstract class Base implements Shape { }
class Sq extends Base { int area() { return 4; } }
class Circle implements Shape { int area() { return 3; } }
)");
  const auto& t = p->types;
  CHECK(t.is_subtype("Sq", "Shape"));
  CHECK(t.is_assignable("Sq", "Base"));
  CHECK(t.is_assignable("null", "Shape"));
  CHECK_FALSE(t.is_assignable("null", "int"));
  CHECK(t.concrete_subtypes("Shape") == std::vector<std::string>{"Sq", "Circle"});
  CHECK(t.concrete_subtypes("Sq") == std::vector<std::string>{"Sq"});
  CHECK(t.concrete_subtypes("Base") == std::vector<std::string>{"Sq"});
}

TEST_CASE("print: empty class") {
  auto p = parsed("class A { }");
  CHECK(print_program(p) == "class A {\n}\n");
}

TEST_CASE("print/parse round trip on a feature-rich program") {
  const char* src = R"(
interface Named extends Other { String name(); }
interface Other { }
abstract class Base implements Named { abstract int size(); }
class Impl extends Base {
  static int counter = 1 + 2 * 3;
  Impl next;
  Impl() { counter = counter + 1; }
  Impl(Impl n) { next = n; }
  String name() { return "impl\t\"q\"\n"; }
  int size() { if (next == null) return 1; else if (next.next != null) { return 3; } return 1 + next.size(); }
  static void main() {
    Impl a = new Impl(new Impl());
    int i = 0;
    while (i < 3 && !(i == 2 || false)) i = i + 1;
    try { a.next.size(); } catch (NullPointerException e) { print("npe"); } catch (Exception e2) { } finally { print(-i - (2 - 1)); }
    try { throw new Exception("x"); } finally { }
    { print(a.name() + i); }
  }
}
)";
  Program first = parsed(src);
  std::string printed = print_program(first);
  Program second = parsed(printed);
  CHECK(first == second);
  CHECK(print_program(second) == printed);
  CHECK_NOTHROW(check_program(second));
}

TEST_CASE("structural equality ignores spans but not content") {
  CHECK(parsed("class A { void m() { int x = 1; } }") ==
        parsed("class A {\n\n void m() {\n   int x = 1;\n }\n}"));
  CHECK_FALSE(parsed("class A { void m() { int x = 1; } }") ==
              parsed("class A { void m() { int x = 2; } }"));
}

TEST_CASE("every node span lies within the source text") {
  std::string src = "class B { B b; B get() { return b; } }\nclass A { void m(B x) { x.get().get(); } }";
  Program p = parsed(src);
  for (const auto& cls : p.units[0].classes) {
    CHECK(cls.span.end <= src.size());
    for (const auto& m : cls.methods) {
      CHECK(m.span.begin < m.span.end);
      CHECK(m.span.end <= src.size());
    }
  }
}

TEST_CASE("enumerate_dereferences: skippability categories") {
  auto q = checked(R"(
class E extends Exception { }
class B { B next; bool ok() { return true; } B self() { return this; } void f() { } E mk() { return new E(); } }
class A {
  B field;
  B ret(B b) { return b.self(); }
  B retLater(B b, bool c) { if (c) { return b.self(); } return null; }
  void loop(B b) { while (b.ok()) { } }
  void cond(B b) { if (b.ok()) { } }
  void plain(B b) { b.f(); }
  void assign(B b) { field = b.next; }
  void declUsed(B b) { B x = b.self(); x.f(); }
  void declUnused(B b) { B x = b.self(); }
  void voidThrow(B b) { throw b.mk(); }
  void own() { this.field.f(); }
  static void st() { A.helper(); }
  static void helper() { }
}
)");
  auto sites = enumerate_dereferences(q->program);
  std::map<std::string, std::vector<bool>> by_method;
  for (const auto& s : sites) by_method[s.method_signature].push_back(s.skippable);
  CHECK(by_method["A.ret(B)"] == std::vector<bool>{false});
  CHECK(by_method["A.retLater(B,bool)"] == std::vector<bool>{true});
  CHECK(by_method["A.loop(B)"] == std::vector<bool>{false});
  CHECK(by_method["A.cond(B)"] == std::vector<bool>{false});
  CHECK(by_method["A.plain(B)"] == std::vector<bool>{true});
  CHECK(by_method["A.assign(B)"] == std::vector<bool>{true});
  CHECK(by_method["A.declUsed(B)"] == std::vector<bool>{false, true});
  CHECK(by_method["A.declUnused(B)"] == std::vector<bool>{true});
  CHECK(by_method["A.voidThrow(B)"] == std::vector<bool>{true});
  // this.field is not instrumented, but field.f() on the result is.
  CHECK(by_method["A.own()"] == std::vector<bool>{true});
  CHECK(by_method.count("A.st()") == 0);
}

TEST_CASE("crash-point keys are injective; chained calls give two sites") {
  auto p = checked(R"(class B { B b() { return this; } void c() { } }
class A { void m(B a) { a.b().c(); a.b().b().c(); } })");
  auto sites = enumerate_dereferences(p->program);
  REQUIRE(sites.size() == 5);
  std::set<std::string> keys;
  for (const auto& s : sites) keys.insert(s.key);
  CHECK(keys.size() == sites.size());
}
