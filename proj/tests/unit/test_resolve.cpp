#include <doctest.h>

#include "corpus.hpp"
#include "mlidl/idl/parser.hpp"
#include "mlidl/idl/resolve.hpp"

using namespace mlidl::idl;
using mlidl::test::corpus;

namespace {

IdlErrorKind resolve_error(const std::string& text) {
    IdlUnit unit = parse_text(text);
    try {
        resolve(unit);
    } catch (const IdlError& e) {
        return e.kind();
    }
    FAIL("resolve accepted: " << text);
    return IdlErrorKind::lex;
}

}  // namespace

TEST_CASE("Time unit resolves unchanged") {
    IdlUnit parsed = parse_text(corpus("time.idl"));
    CHECK(resolve(parsed) == parsed);
}

TEST_CASE("unknown parent interface is a resolve error") {
    CHECK(resolve_error("interface X : Y { }") == IdlErrorKind::unresolved_type);
    CHECK_NOTHROW(resolve(parse_text("interface X : IUnknown { }")));
    CHECK_NOTHROW(resolve(parse_text("interface X : IDispatch { }")));
}

TEST_CASE("unknown types are reported") {
    CHECK(resolve_error("typedef MISSING T;") == IdlErrorKind::unresolved_type);
    CHECK(resolve_error("interface I { void f ([in] NOPE a); }") == IdlErrorKind::unresolved_type);
    CHECK(resolve_error("typedef A B; typedef B A;") == IdlErrorKind::unresolved_type);
}

TEST_CASE("size_is and iid_is targets are checked") {
    CHECK(resolve_error("typedef struct { int x; } P; interface I { void f ([in,size_is (cNames)] P *a); }") ==
          IdlErrorKind::bad_attr_target);
    CHECK(resolve_error("typedef struct { int x; } P; "
                        "interface I { void f ([in,size_is (n)] P *a, [in] boolean n); }") ==
          IdlErrorKind::bad_attr_target);
    CHECK(resolve_error("interface I { void f ([out,iid_is (riid)] void **ppv, [in] const IID& riid); }") ==
          IdlErrorKind::bad_attr_target);
    CHECK(resolve_error("interface I { void f ([in] int riid, [out,iid_is (riid)] void **ppv); }") ==
          IdlErrorKind::bad_attr_target);
    CHECK_NOTHROW(resolve(parse_text(
        "typedef struct { int x; } P; interface I { void f ([in,size_is (n)] P *a, [in] UINT n); }")));
}

TEST_CASE("inheritance cycles are rejected") {
    CHECK(resolve_error("interface A : B { } interface B : A { }") == IdlErrorKind::inheritance_cycle);
    CHECK(resolve_error("interface A : A { }") == IdlErrorKind::inheritance_cycle);
}

TEST_CASE("HRESULT is accepted both predeclared and user-typedef'd") {
    CHECK_NOTHROW(resolve(parse_text("interface I { HRESULT f (); }")));
    CHECK_NOTHROW(resolve(parse_text("typedef int HRESULT; interface I { HRESULT f (); }")));
}

TEST_CASE("symbol table follows alias chains") {
    IdlUnit unit = load_unit(corpus("appendix_a.idl"));
    SymbolTable symbols(unit);
    CHECK(symbols.strip_aliases(IdlType::named_type("HWND")) == IdlType::of_base(BaseType::int_));
    CHECK(symbols.is_integer(IdlType::named_type("INT")));
    CHECK(symbols.is_integer(IdlType::named_type("UINT")));
    CHECK_FALSE(symbols.is_integer(IdlType::named_type("BOOL")));
    CHECK(symbols.find_type("tagPOINT"));
}
