#include <doctest.h>

#include "corpus.hpp"
#include "mlidl/binding/emit.hpp"
#include "mlidl/idl/parser.hpp"
#include "oracles/layout_oracle.hpp"

using namespace mlidl;
using namespace mlidl::binding;
using mlidl::test::corpus;
using mlidl::test::read_file;

namespace {

std::string golden(const std::string& name) { return read_file(std::string(MLIDL_GOLDEN_DIR) + "/" + name); }

BindingDesc build(const std::string& file, Mode mode = Mode::static_, Level level = Level::auto_) {
    Manifest m;
    if (mode == Mode::com) {
        std::string stem = file.substr(0, file.find('.'));
        m = parse_manifest(corpus(stem + ".manifest.json"));
    }
    return build_binding(idl::load_unit(corpus(file), file), mode, level, m);
}

BindingDesc build_text(const std::string& text, Mode mode = Mode::static_, const Manifest& m = {}) {
    return build_binding(idl::load_unit(text), mode, Level::auto_, m);
}

bool contains_line(const std::string& text, const std::string& line) {
    return text.find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST_CASE("signature goldens match byte for byte") {
    CHECK(emit_sig_text(build("appendix_a.idl")) == golden("appendix_a.sig"));
    CHECK(emit_sig_text(build("time.idl")) == golden("time.sig"));
    CHECK(emit_sig_text(build("bar.idl", Mode::com)) == golden("bar.sig"));
}

TEST_CASE("lifted signatures from the corpus") {
    std::string w32 = emit_sig_text(build("appendix_a.idl"));
    CHECK(contains_line(w32, "      val BeginPaint : HWND -> (PAINTSTRUCT * HDC)"));
    CHECK(contains_line(w32, "      val ShowWindow : (HWND * INT) -> BOOL"));
    CHECK(contains_line(w32, "      val RegisterClassExA : WNDCLASSEX -> Int32.int"));
    CHECK(contains_line(w32, "      val PolyLineTo : (HDC * POINT list * INT) -> BOOL"));
    CHECK(contains_line(w32, "    type WNDPROC = ((HWND * INT * INT * INT) -> Int32.int)"));
    CHECK(contains_line(w32, "      val fromInt : Int32.int -> OPTS option"));

    std::string time = emit_sig_text(build("time.idl"));
    CHECK(contains_line(time, "      val gettime : unit -> (timeval_t * timeval_t * timeval_t)"));
    CHECK(contains_line(time, "      val timeofday : unit -> timeval_t"));
}

TEST_CASE("gettime lifts three out records and no ins") {
    BindingDesc d = build("time.idl");
    const LiftedSig* g = d.find_interface("Time")->method("gettime");
    REQUIRE(g);
    CHECK(g->in_params().empty());
    auto results = g->results();
    REQUIRE(results.size() == 3);
    for (const auto& r : results) CHECK(r == SemType::of(SemType::Kind::record, "timeval_t"));
}

TEST_CASE("in,ref records stay in-params passed by address") {
    BindingDesc d = build("appendix_a.idl");
    const LiftedSig* reg = d.find_interface("User")->method("RegisterClassExA");
    REQUIRE(reg->in_params().size() == 1);
    CHECK(reg->params[0].by_ref);
    CHECK(reg->results().size() == 1);
}

TEST_CASE("result count equals outs plus non-void return for every op") {
    for (const char* file : {"appendix_a.idl", "time.idl", "win32.idl"}) {
        idl::IdlUnit unit = idl::load_unit(corpus(file), file);
        BindingDesc d = build_binding(unit, Mode::static_, Level::auto_);
        for (const auto& decl : unit.decls) {
            const auto* iface = std::get_if<idl::InterfaceDecl>(&decl);
            if (!iface) continue;
            for (const auto& op : iface->ops) {
                std::size_t outs = 0;
                for (const auto& p : op.params) outs += p.dir != idl::Direction::in;
                const LiftedSig* sig = d.find_interface(iface->name)->method(op.name);
                REQUIRE(sig);
                CHECK(sig->results().size() == outs + (op.ret.is_void() ? 0 : 1));
                CHECK(sig->in_params().size() + outs == op.params.size());
            }
        }
    }
}

TEST_CASE("empty unit emits header and pervasives only") {
    std::string text = emit_sig_text(build_text(""));
    CHECK(text.find("This file was automatically generated by ml-idl") != std::string::npos);
    CHECK(text.find("signature IDL_SIG =\n  sig\n") != std::string::npos);
    CHECK(text.find("    val free : 'a pointer -> unit\n\n  end\n") != std::string::npos);
}

TEST_CASE("emission is deterministic and carries a content hash") {
    BindingDesc a = build("win32.idl");
    CHECK(emit_sig_text(a) == emit_sig_text(build("win32.idl")));
    CHECK(emit_binding_file(a) == emit_binding_file(build("win32.idl")));
    char hash[32];
    std::snprintf(hash, sizeof hash, "(content hash %016llx)", static_cast<unsigned long long>(content_hash(a)));
    CHECK(emit_sig_text(a).find(hash) != std::string::npos);
    CHECK(content_hash(a) != content_hash(build("appendix_a.idl")));
}

TEST_CASE("com mode synthesizes QueryInterface and omits AddRef/Release") {
    BindingDesc d = build("bar.idl", Mode::com);
    const InterfaceDesc* ix = d.find_interface("IX");
    REQUIRE(ix);
    REQUIRE(ix->methods.size() == 2);
    CHECK(ix->methods[0].name == "QueryInterface");
    CHECK(ix->methods[0].slot == 0);
    CHECK(ix->methods[1].name == "FooX");
    CHECK(ix->methods[1].slot == 3);
    CHECK(ix->parent == "IUnknown");
    CHECK(ix->iid == "{32BB8320-B41B-11CF-A6BB-0080C7B2D682}");
    CHECK_FALSE(ix->method("AddRef"));
    CHECK_FALSE(ix->method("Release"));
    REQUIRE(d.find_const("BarCLSID"));

    BindingDesc calc = build("calc.idl", Mode::com);
    CHECK(calc.find_interface("ICalc")->method("Add")->slot == 7);
}

TEST_CASE("com mode without an IID is an error") {
    try {
        build_text("interface IZ { void f (); }", Mode::com);
        FAIL("expected missing-iid");
    } catch (const BindingError& e) {
        CHECK(e.kind() == BindingErrorKind::missing_iid);
    }
    CHECK_NOTHROW(build_text("interface IZ { void f (); }", Mode::static_));
}

TEST_CASE("out parameter of callback type is unsupported") {
    try {
        build_text("typedef int *CB ([in] int x); interface I { void f ([out] CB *cb); }");
        FAIL("expected unsupported");
    } catch (const BindingError& e) {
        CHECK(e.kind() == BindingErrorKind::unsupported);
    }
}

TEST_CASE("HRESULT-returning com methods hand the code to the call driver") {
    Manifest m;
    m.iids["IH"] = "{00000000-0000-0000-0000-0000000000AB}";
    BindingDesc d = build_text("interface IH { HRESULT Get ([out] int *v); }", Mode::com, m);
    const LiftedSig* get = d.find_interface("IH")->method("Get");
    CHECK(get->hresult);
    CHECK(get->results() == std::vector<SemType>{SemType::of(SemType::Kind::int32)});
}

TEST_CASE("enum maps: fromInt is a right inverse of toInt, aliases pick the first variant") {
    BindingDesc d = build("appendix_a.idl");
    for (const auto& e : d.enums) {
        for (const auto& [name, value] : e.variants) {
            auto back = e.from_int(value);
            REQUIRE(back);
            CHECK(e.to_int(*back) == value);
        }
    }
    const EnumMap* consts = d.find_enum("CONSTS");
    CHECK(consts->from_int(1) == "SW_SHOWNORMAL");
    CHECK(consts->from_int(3) == "SW_SHOWMAXIMIZED");
    CHECK(consts->from_int(99) == std::nullopt);
    CHECK(d.find_enum("OPTS")->to_int("WS_POPUP") == 0x80000000u);
    CHECK(d.find_enum("OPTS")->from_int(2) == "CS_HREDRAW");
}

TEST_CASE("record layouts agree with the byte-layout oracle") {
    for (const char* file : {"appendix_a.idl", "time.idl", "win32.idl"}) {
        idl::IdlUnit unit = idl::load_unit(corpus(file), file);
        BindingDesc d = build_binding(unit, Mode::static_, Level::auto_);
        for (const auto& r : d.records) {
            CAPTURE(r.name);
            CHECK(r.size * 4 == mlidl::test::oracle_record_bytes(unit, r.name));
            std::uint32_t expect = 0;
            for (const auto& f : r.fields) {
                CHECK(f.offset == expect);
                expect += word_size(f.type, d);
            }
        }
    }
    BindingDesc w32 = build("appendix_a.idl");
    CHECK(w32.find_record("WNDCLASSEX")->size == 12);
    CHECK(w32.find_record("POINT")->size == 2);
    CHECK(build("time.idl").find_record("timeval_t")->size == 2);
}

TEST_CASE("binding file round trips") {
    for (const char* file : {"appendix_a.idl", "time.idl", "win32.idl"}) {
        BindingDesc d = build(file);
        CHECK(load_binding_file(emit_binding_file(d)) == d);
        BindingDesc a = build(file, Mode::dynamic, Level::abstract);
        CHECK(load_binding_file(emit_binding_file(a)) == a);
    }
    for (const char* file : {"bar.idl", "calc.idl"}) {
        BindingDesc d = build(file, Mode::com);
        CHECK(load_binding_file(emit_binding_file(d)) == d);
    }
}

TEST_CASE("binding file schema") {
    std::string text = emit_binding_file(build("time.idl"));
    CHECK(text.find("\"name\": \"timeval_t\"") != std::string::npos);
    CHECK(text.find("\"size\": 2") != std::string::npos);

    std::string w32 = emit_binding_file(build("appendix_a.idl"));
    CHECK(w32.find("\"value\": \"0x80000000\"") != std::string::npos);

    auto violation_path = [](const std::string& bad) -> std::string {
        try {
            load_binding_file(bad);
        } catch (const BindingError& e) {
            CHECK(e.kind() == BindingErrorKind::schema_violation);
            return e.what();
        }
        FAIL("accepted: " << bad);
        return {};
    };
    std::string bad = text;
    bad.replace(bad.find("\"kind\": \"int32\""), 15, "\"kind\": \"int64\"");
    CHECK(violation_path(bad).find("$.records[0].fields[0].type.kind") != std::string::npos);
    CHECK(violation_path("{}").find("$.module") != std::string::npos);
    CHECK(violation_path("not json").find("$") != std::string::npos);

    // Aliased enum values are legal.
    std::string dup = R"({"module":"M","mode":"static","level":"auto","interfaces":[],
        "enums":[{"name":"E","scope":"","variants":[{"name":"A","value":"0x00000001"},{"name":"B","value":"0x00000001"}]}],
        "records":[],"consts":[],"callbacks":[]})";
    BindingDesc loaded = load_binding_file(dup);
    CHECK(loaded.find_enum("E")->from_int(1) == "A");
}

TEST_CASE("abstract level emits abstract types and converters") {
    std::string text = emit_sig_text(build("appendix_a.idl", Mode::static_, Level::abstract));
    CHECK(contains_line(text, "    type POINT"));
    CHECK(contains_line(text, "      val make : {x:INT,y:INT} -> POINT"));
    CHECK(contains_line(text, "    val cstring : String.string -> cstring"));
    CHECK(contains_line(text, "      val PolyLineTo : (HDC * POINT pointer * INT) -> BOOL"));
    CHECK(contains_line(text, "    type STRING = cstring"));
}

TEST_CASE("module name falls back to the source file stem") {
    CHECK(build("time.idl").module == "time");
    CHECK(build("appendix_a.idl").module == "W32");
}

TEST_CASE("manifest validation") {
    CHECK_THROWS_AS(parse_manifest(R"({"iids":{"IX":"not-a-guid"}})"), BindingError);
    CHECK_THROWS_AS(parse_manifest("[1]"), BindingError);
    Manifest m = parse_manifest(R"({"iids":{"IX":"{32bb8320-b41b-11cf-a6bb-0080c7b2d682}"}})");
    CHECK(m.iids["IX"] == "{32BB8320-B41B-11CF-A6BB-0080C7B2D682}");
}
