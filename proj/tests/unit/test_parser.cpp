#include <doctest.h>

#include "corpus.hpp"
#include "mlidl/idl/parser.hpp"
#include "mlidl/idl/printer.hpp"
#include "mlidl/idl/resolve.hpp"

using namespace mlidl::idl;
using mlidl::test::corpus;

namespace {

std::vector<std::string> op_names(const InterfaceDecl& i) {
    std::vector<std::string> out;
    for (const auto& op : i.ops) out.push_back(op.name);
    return out;
}

IdlErrorKind error_kind(const std::string& text) {
    try {
        load_unit(text);
    } catch (const IdlError& e) {
        return e.kind();
    }
    FAIL("no error raised for: " << text);
    return IdlErrorKind::lex;
}

}  // namespace

TEST_CASE("Time unit parses into one interface with a nested record") {
    IdlUnit unit = load_unit(corpus("time.idl"), "time.idl");
    REQUIRE(unit.decls.size() == 1);
    const auto* time = unit.find_interface("Time");
    REQUIRE(time);
    REQUIRE(time->members.size() == 1);
    const auto& rec = std::get<RecordDecl>(time->members[0]);
    CHECK(rec.name == "timeval_t");
    REQUIRE(rec.fields.size() == 2);
    CHECK(rec.fields[0].type == IdlType::of_base(BaseType::long_));
    CHECK(op_names(*time) == std::vector<std::string>{"gettime", "timeofday"});
    REQUIRE(time->ops[0].params.size() == 3);
    for (const auto& p : time->ops[0].params) CHECK(p.dir == Direction::out);
    CHECK(time->ops[1].params.size() == 1);
    CHECK(time->ops[0].ret.is_void());
}

TEST_CASE("win32 extract corpus parses with the expected interfaces") {
    IdlUnit unit = load_unit(corpus("appendix_a.idl"), "appendix_a.idl");
    CHECK(unit.sml_name() == "W32");
    const auto* user = unit.find_interface("User");
    const auto* gdi = unit.find_interface("Gdi");
    REQUIRE(user);
    REQUIRE(gdi);
    CHECK(op_names(*user) == std::vector<std::string>{"RegisterClassExA", "UnregisterClassA", "CreateWindowExA",
                                                      "ShowWindow", "UpdateWindow", "BeginPaint", "EndPaint",
                                                      "LoadIconA"});
    CHECK(op_names(*gdi) == std::vector<std::string>{"LineTo", "PolyLineTo"});
    CHECK(user->sml_source == "user32.dll");

    const OpDecl& reg = user->ops[0];
    REQUIRE(reg.params.size() == 1);
    CHECK(reg.params[0].dir == Direction::in);
    CHECK(reg.params[0].attrs.ref);

    const ParamDecl& lppt = gdi->ops[1].params[1];
    CHECK(lppt.type.kind == IdlType::Kind::array);
    CHECK(lppt.type.name == "cPoints");
    CHECK(lppt.type.pointee() == IdlType::named_type("POINT"));
}

TEST_CASE("enum values survive as exact 32-bit words, aliases allowed") {
    IdlUnit unit = load_unit(corpus("appendix_a.idl"));
    const EnumDecl* opts = nullptr;
    const EnumDecl* consts = nullptr;
    for (const auto& d : unit.decls) {
        if (const auto* e = std::get_if<EnumDecl>(&d)) {
            if (e->name == "OPTS") opts = e;
            if (e->name == "CONSTS") consts = e;
        }
    }
    REQUIRE(opts);
    REQUIRE(consts);
    auto value_of = [](const EnumDecl& e, const std::string& n) {
        for (const auto& v : e.variants)
            if (v.name == n) return v.value;
        FAIL("missing " << n);
        return 0u;
    };
    CHECK(value_of(*opts, "WS_POPUP") == 0x80000000u);
    CHECK(value_of(*opts, "CW_USEDEFAULT") == 0x80000000u);
    CHECK(value_of(*opts, "CS_HREDRAW") == 2);
    CHECK(value_of(*consts, "SW_NORMAL") == value_of(*consts, "SW_SHOWNORMAL"));
}

TEST_CASE("string constants are stored verbatim") {
    IdlUnit unit = load_unit(corpus("appendix_a.idl"));
    int seen = 0;
    for (const auto& d : unit.decls) {
        if (const auto* c = std::get_if<ConstDecl>(&d)) {
            ++seen;
            if (c->name == "IDI_HAND") CHECK(std::get<std::string>(c->value) == "#32513");
        }
    }
    CHECK(seen == 8);
}

TEST_CASE("callback typedef becomes a function type") {
    IdlUnit unit = load_unit(corpus("appendix_a.idl"));
    for (const auto& d : unit.decls) {
        if (const auto* t = std::get_if<TypedefDecl>(&d); t && t->name == "WNDPROC") {
            CHECK(t->type.kind == IdlType::Kind::func);
            CHECK(t->type.params.size() == 4);
            CHECK(t->type.inner.front() == IdlType::of_base(BaseType::int_));
            return;
        }
    }
    FAIL("WNDPROC missing");
}

TEST_CASE("IUnknown-shaped interface with references and iid_is parses") {
    IdlUnit unit = load_unit(R"(
        interface IFoo {
            HRESULT QueryInterface ([in] const IID& iid, [out,iid_is (iid)] void **ppv);
            unsigned long AddRef ();
            unsigned long Release ();
        }
    )");
    const auto* foo = unit.find_interface("IFoo");
    REQUIRE(foo);
    const ParamDecl& iid = foo->ops[0].params[0];
    CHECK(iid.type.kind == IdlType::Kind::ptr);
    CHECK(iid.type.is_ref);
    CHECK(iid.type.pointee().is_const);
    CHECK(foo->ops[0].params[1].type.pointer_depth() == 2);
    CHECK(foo->ops[0].params[1].attrs.iid_is == "iid");
    CHECK(foo->ops[1].ret == IdlType::of_base(BaseType::unsigned_long));
}

TEST_CASE("pretty-print round trip is structurally stable on golden inputs") {
    for (const char* name : {"appendix_a.idl", "time.idl", "win32.idl", "bar.idl", "calc.idl"}) {
        CAPTURE(name);
        IdlUnit first = load_unit(corpus(name), name);
        std::string printed = pretty_print(first);
        IdlUnit second = load_unit(printed, "printed");
        CHECK(first == second);
        CHECK(pretty_print(second) == printed);
    }
}

TEST_CASE("parse errors name the expected tokens and location") {
    try {
        parse_text("interface X {\n  void f ([in] int a b);\n}");
        FAIL("expected error");
    } catch (const IdlError& e) {
        CHECK(e.kind() == IdlErrorKind::parse);
        CHECK(e.loc().line == 2);
        CHECK(std::string(e.what()).find("expected one of {','") != std::string::npos);
    }
    CHECK(error_kind("typedef int A; typedef int A;") == IdlErrorKind::duplicate_name);
    CHECK(error_kind("typedef enum { A = 1 } E; const int A = 2;") == IdlErrorKind::duplicate_name);
    CHECK(error_kind("interface I { void f(); void f(); }") == IdlErrorKind::duplicate_name);
    CHECK(error_kind("sml_name (\"a\"); sml_name (\"b\");") == IdlErrorKind::duplicate_name);
    CHECK(error_kind("typedef float F;") == IdlErrorKind::parse);
    CHECK(error_kind("typedef int ***P;") == IdlErrorKind::parse);
    CHECK(error_kind("interface I { void f ([out] int x); }") == IdlErrorKind::parse);
}

TEST_CASE("RPC-only attributes are rejected with a diagnostic") {
    try {
        parse_text("[uuid (abc)] interface I { }");
        FAIL("expected error");
    } catch (const IdlError& e) {
        CHECK(e.kind() == IdlErrorKind::parse);
        CHECK(std::string(e.what()).find("RPC") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_text("interface I { void f ([in, idempotent] int a); }"), IdlError);
    CHECK_THROWS_AS(parse_text("[endpoint (\"x\")] interface I { }"), IdlError);
}

TEST_CASE("decimal and word enum values mix; implicit values count up") {
    IdlUnit unit = load_unit("typedef enum { A, B, C = 0wx10, D, E = -1 } X;");
    const auto& e = std::get<EnumDecl>(unit.decls[0]);
    CHECK(e.variants[0].value == 0);
    CHECK(e.variants[1].value == 1);
    CHECK(e.variants[2].value == 0x10);
    CHECK(e.variants[3].value == 0x11);
    CHECK(e.variants[4].value == 0xFFFFFFFFu);
}
