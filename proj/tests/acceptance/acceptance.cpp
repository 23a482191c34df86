// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "mlidl/binding/emit.hpp"
#include "mlidl/cli/cli.hpp"
#include "mlidl/idl/parser.hpp"
#include "mlidl/winsim/bounce.hpp"
#include "oracles/gen.hpp"
#include "oracles/layout_oracle.hpp"
#include "oracles/reference_pump.hpp"
#include "support/bounce_checks.hpp"
#include "support/calc.hpp"
#include "unit/corpus.hpp"

using namespace mlidl;
using marshal::Value;
using test::corpus;
using test::Rng;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

std::string golden(const std::string& name) { return test::read_file(std::string(MLIDL_GOLDEN_DIR) + "/" + name); }

binding::BindingDesc build(const std::string& file, binding::Mode mode) {
    binding::Manifest m;
    if (mode == binding::Mode::com) m = binding::parse_manifest(corpus(file.substr(0, file.find('.')) + ".manifest.json"));
    return binding::build_binding(idl::load_unit(corpus(file), file), mode, binding::Level::auto_, m);
}

std::vector<std::string> op_names(const idl::InterfaceDecl& d) {
    std::vector<std::string> out;
    for (const auto& op : d.ops) out.push_back(op.name);
    return out;
}

// Some line of text equals `line` once leading blanks are dropped.
bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l.substr(std::min(l.find_first_not_of(' '), l.size())) == line) return true;
    return false;
}

template <typename E, typename K>
bool raises(const std::function<void()>& f, K kind) {
    try {
        f();
    } catch (const E& e) {
        return e.kind() == kind;
    }
    return false;
}

struct Cli {
    int code;
    std::string out;
    std::string err;
};

Cli cli_run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

fs::path scratch(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("mlidl_acceptance_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// 1 ---------------------------------------------------------------------
Outcome parser_golden() {
    Outcome o;
    idl::IdlUnit unit;
    try {
        unit = idl::load_unit(corpus("appendix_a.idl"), "appendix_a.idl");
    } catch (const std::exception& e) {
        o.require(false, std::string("parse failed: ") + e.what());
        return o;
    }
    const auto* user = unit.find_interface("User");
    const auto* gdi = unit.find_interface("Gdi");
    o.require(user && gdi, "User or Gdi missing");
    if (!o.pass) return o;
    o.require(op_names(*user) == std::vector<std::string>{"RegisterClassExA", "UnregisterClassA", "CreateWindowExA",
                                                          "ShowWindow", "UpdateWindow", "BeginPaint", "EndPaint",
                                                          "LoadIconA"},
              "User operations differ");
    o.require(op_names(*gdi) == std::vector<std::string>{"LineTo", "PolyLineTo"}, "Gdi operations differ");
    o.detail = o.pass ? "User 8 ops, Gdi 2 ops" : o.detail;
    return o;
}

// 2 ---------------------------------------------------------------------
Outcome codegen_golden() {
    Outcome o;
    std::string a = binding::emit_sig_text(build("appendix_a.idl", binding::Mode::static_));
    std::string t = binding::emit_sig_text(build("time.idl", binding::Mode::static_));
    o.require(a == golden("appendix_a.sig"), "appendix_a.sig differs from golden");
    o.require(t == golden("time.sig"), "time.sig differs from golden");
    o.require(has_line(a, "val BeginPaint : HWND -> (PAINTSTRUCT * HDC)"), "BeginPaint line missing");
    o.require(has_line(t, "val gettime : unit -> (timeval_t * timeval_t * timeval_t)"), "gettime line missing");
    if (o.pass) o.detail = "byte-identical, BeginPaint and gettime present";
    return o;
}

// 3 ---------------------------------------------------------------------
Outcome layout() {
    Outcome o;
    idl::IdlUnit unit = idl::load_unit(corpus("appendix_a.idl"), "appendix_a.idl");
    binding::BindingDesc desc = binding::build_binding(unit, binding::Mode::static_, binding::Level::auto_);
    wordmem::World w;
    marshal::Marshaller m(w, desc);
    using K = binding::SemType::Kind;
    auto wc = m.layout_of(binding::SemType::of(K::record, "WNDCLASSEX"));
    auto pt = m.layout_of(binding::SemType::of(K::record, "POINT"));
    o.require(wc == 12, "WNDCLASSEX is " + std::to_string(wc) + " words");
    o.require(wc * 4 == 48 && test::oracle_record_bytes(unit, "WNDCLASSEX") == 48, "WNDCLASSEX bytes disagree");
    o.require(pt == 2 && test::oracle_record_bytes(unit, "POINT") == 8, "POINT layout disagrees");
    for (const auto& r : desc.records)
        o.require(m.layout_of(binding::SemType::of(K::record, r.name)) * 4 == test::oracle_record_bytes(unit, r.name),
                  r.name + " disagrees with the oracle");
    if (o.pass) o.detail = "WNDCLASSEX 12 words / 48 bytes, POINT 2 words, all records match the oracle";
    return o;
}

// 4 ---------------------------------------------------------------------
Outcome wordmem_properties() {
    using wordmem::Addr;
    using wordmem::MemError;
    using wordmem::MemErrorKind;
    using wordmem::World;
    Outcome o;
    Rng rng(4004);
    World w;
    std::vector<std::pair<Addr, std::uint32_t>> blocks;
    for (int i = 0; i < 200; ++i) {
        std::uint32_t n = 1 + rng() % 32;
        blocks.emplace_back(w.alloc(n), n);
    }
    int round_trips = 0;
    for (int i = 0; i < 10000; ++i) {
        auto [base, size] = blocks[rng() % blocks.size()];
        std::uint32_t at = rng() % size;
        auto ws = test::any_words(rng, 1, size - at);
        Addr a = World::offset(base, at);
        w.store(a, ws);
        if (w.read(a, static_cast<std::int64_t>(ws.size())) == ws) ++round_trips;
    }
    o.require(round_trips == 10000, "store/read round trips: " + std::to_string(round_trips) + "/10000");

    int identical = 0;
    std::set<wordmem::Word> addrs;
    for (int i = 0; i < 1000; ++i) {
        test::RandomFn f = test::any_fn(rng);
        Addr a = w.fun_to_addr(f);
        addrs.insert(a.value);
        auto args = test::any_words(rng, 0, 6);
        if (w.addr_to_fun(a)(args) == f(args)) ++identical;
    }
    o.require(identical == 1000 && addrs.size() == 1000, "closure identity: " + std::to_string(identical) + "/1000");

    World n;
    Addr a = n.alloc(2);
    Addr f = n.fun_to_addr([](const std::vector<wordmem::Word>&) { return wordmem::Word{0}; });
    n.register_library("k.dll", {{"two", [](const std::vector<wordmem::Word>&) { return wordmem::Word{0}; }, 2}});
    int negatives = 0;
    auto neg = [&](const char* what, MemErrorKind k, const std::function<void()>& g) {
        if (raises<MemError>(g, k)) ++negatives;
        else o.require(false, std::string("negative case failed: ") + what);
    };
    neg("alloc 0", MemErrorKind::bad_size, [&] { n.alloc(0); });
    neg("read past end", MemErrorKind::out_of_bounds, [&] { n.read(World::offset(a, 2), 1); });
    neg("read unmapped", MemErrorKind::out_of_bounds, [&] { n.read(Addr{0x00F00000}, 1); });
    neg("free null", MemErrorKind::bad_region, [&] { n.free(wordmem::kNull); });
    neg("free closure", MemErrorKind::bad_region, [&] { n.free(f); });
    neg("call heap", MemErrorKind::not_callable, [&] { n.call(a, {}); });
    neg("unknown library", MemErrorKind::unknown_library, [&] { n.open_library("nope.dll"); });
    neg("unknown symbol", MemErrorKind::unknown_symbol, [&] { n.get_function(n.open_library("k.dll"), "three"); });
    neg("arity", MemErrorKind::arity_mismatch,
        [&] { n.call(n.get_function(n.open_library("k.dll"), "two"), {1}); });
    n.free(a);
    neg("double free", MemErrorKind::double_free, [&] { n.free(a); });
    neg("use after free", MemErrorKind::use_after_free, [&] { n.read(a, 1); });
    if (o.pass)
        o.detail = "10000 round trips, 1000 closures, " + std::to_string(negatives) + " negative cases raise as specified";
    return o;
}

// Object with IUnknown, IX and IY built straight on the runtime.
struct ThreeFaces {
    wordmem::World world;
    com::Runtime rt{world};
    com::Iid ix{com::Guid{0x11111111, 1, 2, {1, 2, 3, 4, 5, 6, 7, 8}}, "IX"};
    com::Iid iy{com::Guid{0x22222222, 1, 2, {1, 2, 3, 4, 5, 6, 7, 8}}, "IY"};

    com::ObjectId build() {
        com::ObjectId o = rt.create_object({com::Guid{}, "Three"});
        rt.make_interface(o, com::iid_unknown(), {});
        rt.make_interface(o, ix, {[](const std::vector<wordmem::Word>&) { return wordmem::Word{0}; }});
        rt.make_interface(o, iy, {[](const std::vector<wordmem::Word>&) { return wordmem::Word{0}; }});
        return o;
    }
};

// 5 ---------------------------------------------------------------------
Outcome com_invariants() {
    Outcome o;
    ThreeFaces f;
    const com::Iid ids[] = {com::iid_unknown(), f.ix, f.iy};

    com::ObjectId obj = f.build();
    com::InterfaceRef first = f.rt.activate(obj, f.ix);
    std::vector<com::InterfaceRef> faces;
    for (const auto& id : ids) faces.push_back(f.rt.query_interface(first, id));
    for (const auto& a : faces)
        for (const auto& b : faces)
            o.require(f.rt.query_interface(a, com::iid_unknown()).addr == f.rt.query_interface(b, com::iid_unknown()).addr,
                      "IUnknown identity differs between " + a.iid.name + " and " + b.iid.name);
    try {
        f.rt.query_interface(first, {com::Guid{0xDEAD, 0, 0, {}}, "IZ"});
        o.require(false, "unknown IID answered");
    } catch (const com::ComError& e) {
        o.require(e.hresult() == 0x80004002u, "unknown IID gave " + wordmem::hex(e.hresult()));
    }

    Rng rng(5005);
    for (int round = 0; round < 1000 && o.pass; ++round) {
        com::ObjectId x = f.build();
        std::size_t before = f.world.live_count() - f.rt.block_count(x);
        com::InterfaceRef r0 = f.rt.activate(x, f.ix);
        std::vector<com::InterfaceRef> held;
        int steps = 1 + static_cast<int>(rng() % 12);
        for (int s = 0; s < steps; ++s) {
            com::InterfaceRef from = held.empty() ? r0 : held[rng() % held.size()];
            if (rng() % 2) {
                held.push_back(f.rt.query_interface(from, ids[rng() % 3]));
            } else {
                f.rt.add_ref(from);
                held.push_back(from);
            }
        }
        o.require(f.rt.ref_count(x) == 1 + held.size(), "count not conserved in round " + std::to_string(round));
        std::shuffle(held.begin(), held.end(), rng);
        for (const auto& r : held) f.rt.release(r);
        o.require(f.rt.ref_count(x) == 1, "count not restored in round " + std::to_string(round));
        o.require(f.rt.release(r0) == 0 && !f.rt.is_alive(x), "object survived in round " + std::to_string(round));
        o.require(f.world.live_count() == before, "blocks leaked in round " + std::to_string(round));
    }
    if (o.pass) o.detail = "identity over 9 pairs, 1000 balanced sequences, exact destruction, E_NOINTERFACE 0x80004002";
    return o;
}

// 6 ---------------------------------------------------------------------
Outcome raw_abi() {
    Outcome o;
    ThreeFaces f;
    Rng rng(6006);
    com::ObjectId obj = f.build();
    com::InterfaceRef root = f.rt.activate(obj, com::iid_unknown());
    std::vector<com::InterfaceRef> faces{root, f.rt.query_interface(root, f.ix), f.rt.query_interface(root, f.iy)};
    auto& w = f.world;
    int agreed = 0;
    for (int i = 0; i < 100; ++i) {
        const com::InterfaceRef& from = faces[rng() % 3];
        com::Iid want;
        switch (rng() % 4) {
        case 0: want = com::iid_unknown(); break;
        case 1: want = f.ix; break;
        case 2: want = f.iy; break;
        default: want = {com::Guid{static_cast<std::uint32_t>(rng()), 7, 7, {}}, "IRandom"}; break;
        }
        // Raw: this -> vtable -> slot 0, arguments laid out by hand.
        wordmem::Addr iid = w.alloc(4);
        auto g = want.guid.to_words();
        w.store(iid, {g.begin(), g.end()});
        wordmem::Addr out = w.alloc(1);
        wordmem::Addr vtable{w.read1(from.addr)};
        wordmem::Word hr = w.call(wordmem::Addr{w.read1(vtable)}, {from.addr.value, iid.value, out.value});
        wordmem::Word got = w.read1(out);
        w.free(iid);
        w.free(out);

        bool same = false;
        try {
            com::InterfaceRef r = f.rt.query_interface(from, want);
            same = hr == com::S_OK && got == r.addr.value;
            f.rt.release(r);
            f.rt.release(com::InterfaceRef{wordmem::Addr{got}, want, obj});
        } catch (const com::ComError& e) {
            same = hr == e.hresult() && got == 0;
        }
        agreed += same ? 1 : 0;
    }
    o.require(agreed == 100, std::to_string(agreed) + "/100 raw calls agree");
    if (o.pass) o.detail = "100/100 raw slot-0 calls agree with query_interface";
    return o;
}

// 7 ---------------------------------------------------------------------
Outcome dual_equivalence() {
    using automation::DispErrorKind;
    using automation::Variant;
    using K = binding::SemType::Kind;
    Outcome o;
    auto desc = [] { return test::calc_desc(corpus("calc.idl"), corpus("calc.manifest.json")); };
    test::CalcWorld direct(desc()), dispatched(desc());
    auto dv = direct.make();
    auto dd = dispatched.make();
    Rng rng(7007);
    const char* names[] = {"Add", "Mask", "IsPositive", "Accumulate", "Length"};
    int matched = 0;
    for (int i = 0; i < 100; ++i) {
        std::string name = names[rng() % 5];
        const auto& sig = direct.b.method("ICalc", name);
        std::vector<Value> values;
        std::vector<Variant> variants;
        for (const auto* p : sig.in_params()) {
            Variant v;
            switch (p->type.kind) {
            case K::int32: v = Variant::i4(static_cast<std::int32_t>(test::any_word(rng))); break;
            case K::word32: v = Variant::ui4(test::any_word(rng)); break;
            default: v = Variant::bstr(std::string(rng() % 9, 'q')); break;
            }
            values.push_back(automation::coerce(v, p->type, direct.desc));
            variants.push_back(v);
        }
        auto rs = direct.b.call(dv.ref, name, values);
        Variant expect = rs.empty() ? Variant::empty() : automation::to_variant(rs.back(), sig.ret, direct.desc);
        auto id = automation::get_ids_of_names(dispatched.rt, dd.ref, name);
        if (automation::invoke(dispatched.rt, dd.ref, id, variants) == expect) ++matched;
    }
    o.require(matched == 100, std::to_string(matched) + "/100 Invoke results match");
    o.require(direct.effects == dispatched.effects, "effect traces differ");

    auto disp_error = [&](const std::vector<Variant>& args, const char* method, DispErrorKind want,
                          std::uint32_t index) {
        std::size_t effects = dispatched.effects.size();
        try {
            automation::invoke(dispatched.rt, dd.ref, automation::get_ids_of_names(dispatched.rt, dd.ref, method), args);
        } catch (const automation::DispError& e) {
            return e.kind() == want && e.arg_index() == index && dispatched.effects.size() == effects;
        }
        return false;
    };
    o.require(disp_error({Variant::i4(1), Variant::i4(2)}, "Accumulate", DispErrorKind::bad_param_count, 0),
              "bad param count not reported");
    o.require(disp_error({Variant::i4(1), Variant::bstr("x")}, "Add", DispErrorKind::type_mismatch, 1),
              "type mismatch not reported at argument 1");
    o.require(automation::DispError(DispErrorKind::bad_param_count, "").hresult() == automation::DISP_E_BADPARAMCOUNT &&
                  automation::DispError(DispErrorKind::type_mismatch, "").hresult() == automation::DISP_E_TYPEMISMATCH,
              "dispatch error codes wrong");
    if (o.pass) o.detail = "100/100 Invoke calls match vtable calls; bad-param-count and type-mismatch reported";
    return o;
}

// 8 ---------------------------------------------------------------------
Outcome bounce_integration() {
    Outcome o;
    fs::path dir = scratch("bounce");
    std::string path = (dir / "t.log").string();
    Cli r = cli_run({"run-demo", "bounce", "--ticks", "500", "--trace", path});
    o.require(r.code == 0, "run-demo exited " + std::to_string(r.code) + ": " + r.err);
    if (!o.pass) return o;
    auto trace = lines_of(test::read_file(path));
    auto expected = test::reference_bounce_trace(500);
    if (trace != expected) {
        std::size_t i = 0;
        while (i < trace.size() && i < expected.size() && trace[i] == expected[i]) ++i;
        o.require(false, "trace differs from the reference at line " + std::to_string(i + 1));
    }
    auto bs = test::blits(trace);
    o.require(bs.size() == 500, std::to_string(bs.size()) + " blits");
    std::string why = test::check_displacement(bs);
    o.require(why.empty(), why);
    why = test::check_bounces(bs, 500, 300);
    o.require(why.empty(), why);
    why = test::check_lifecycle(test::messages(trace), 500);
    o.require(why.empty(), why);
    fs::remove_all(dir);
    if (o.pass) o.detail = std::to_string(trace.size()) + " lines equal the reference; displacement, bounce and lifecycle hold";
    return o;
}

// 9 ---------------------------------------------------------------------
Outcome queue_equivalence() {
    Outcome o;
    Cli direct = cli_run({"run-demo", "bounce", "--ticks", "500", "--handler", "direct"});
    Cli queued = cli_run({"run-demo", "bounce", "--ticks", "500", "--handler", "queue"});
    o.require(direct.code == 0 && queued.code == 0, "run-demo failed: " + direct.err + queued.err);
    o.require(!direct.out.empty() && direct.out == queued.out, "queued trace differs from the direct trace");
    if (o.pass) o.detail = "queued and direct traces identical (" + std::to_string(direct.out.size()) + " bytes)";
    return o;
}

// 10 --------------------------------------------------------------------
Outcome determinism() {
    Outcome o;
    struct Job {
        std::string file;
        std::vector<std::string> flags;
    };
    std::vector<Job> jobs;
    for (const char* f : {"appendix_a.idl", "time.idl", "win32.idl"})
        for (const char* mode : {"static", "dynamic"})
            for (const char* level : {"auto", "abstract"}) jobs.push_back({f, {"--mode", mode, "--level", level}});
    for (const char* f : {"bar", "calc"})
        jobs.push_back({std::string(f) + ".idl",
                        {"--mode", "com", "--manifest", std::string(MLIDL_IDL_DIR) + "/" + f + ".manifest.json"}});

    auto emit_all = [&](const fs::path& dir) {
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            fs::path sub = dir / std::to_string(i);
            std::vector<std::string> args{"compile", std::string(MLIDL_IDL_DIR) + "/" + jobs[i].file, "--emit",
                                          "sig,binding", "-o", sub.string()};
            args.insert(args.end(), jobs[i].flags.begin(), jobs[i].flags.end());
            Cli r = cli_run(args);
            o.require(r.code == 0, "compile " + jobs[i].file + " failed: " + r.err);
            std::string stem = fs::path(jobs[i].file).stem().string();
            texts.push_back(test::read_file((sub / (stem + ".sig")).string()));
            texts.push_back(test::read_file((sub / (stem + ".binding.json")).string()));
        }
        for (const char* handler : {"direct", "queue"}) {
            std::string path = (dir / (std::string(handler) + ".log")).string();
            Cli r = cli_run({"run-demo", "bounce", "--ticks", "500", "--handler", handler, "--trace", path});
            o.require(r.code == 0, "run-demo failed: " + r.err);
            texts.push_back(test::read_file(path));
        }
        return texts;
    };
    fs::path a = scratch("det_a"), b = scratch("det_b");
    auto first = emit_all(a);
    auto second = emit_all(b);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) differing += first[i] != second[i] ? 1 : 0;
    o.require(first.size() == second.size() && differing == 0, std::to_string(differing) + " artifacts differ");
    fs::remove_all(a);
    fs::remove_all(b);
    if (o.pass) o.detail = std::to_string(first.size()) + " emissions and traces byte-identical across two runs";
    return o;
}

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;  // 0 = no limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "parser golden", 1.0, parser_golden},
        {2, "codegen golden", 1.0, codegen_golden},
        {3, "record layout", 0, layout},
        {4, "wordmem properties", 5.0, wordmem_properties},
        {5, "COM invariants", 2.0, com_invariants},
        {6, "raw slot-0 QueryInterface", 0, raw_abi},
        {7, "dual interface equivalence", 0, dual_equivalence},
        {8, "bounce integration", 2.0, bounce_integration},
        {9, "queue adapter equivalence", 0, queue_equivalence},
        {10, "determinism", 0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs >= c.budget_seconds && o.pass) {
            o.pass = false;
            o.detail = "over the " + std::to_string(c.budget_seconds).substr(0, 3) + " s budget";
        }
        failed += o.pass ? 0 : 1;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3f s", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.number << "] " << c.name << ": " << o.detail << " ("
                  << timing << ")\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
