#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlidl/binding/emit.hpp"
#include "mlidl/cli/cli.hpp"
#include "mlidl/idl/error.hpp"
#include "mlidl/idl/parser.hpp"
#include "mlidl/winsim/bounce.hpp"

namespace mlidl::cli {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string message;
};

std::string read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{exit_compile, path + ": file not found or unreadable"};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Failure{exit_runtime, path.string() + ": cannot write"};
}

bool trace_requested() {
    const char* v = std::getenv("MLIDL_TRACE");
    return v && std::string(v) == "1";
}

struct CompileArgs {
    std::string input;
    std::string mode = "static";
    std::string level = "auto";
    std::vector<std::string> emit{"sig"};
    std::string out_dir = ".";
    std::string manifest;
};

int compile(const CompileArgs& a, std::ostream& out) {
    std::string text = read_input(a.input);
    binding::Manifest manifest;
    if (!a.manifest.empty()) manifest = binding::parse_manifest(read_input(a.manifest));
    auto desc = binding::build_binding(idl::load_unit(text, a.input), *binding::mode_from_string(a.mode),
                                       *binding::level_from_string(a.level), manifest);
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw Failure{exit_runtime, a.out_dir + ": " + ec.message()};
    const std::string stem = fs::path(a.input).stem().string();
    for (const auto& e : a.emit) {
        fs::path target = fs::path(a.out_dir) / (stem + (e == "sig" ? ".sig" : ".binding.json"));
        write_output(target, e == "sig" ? binding::emit_sig_text(desc) : binding::emit_binding_file(desc));
        out << "wrote " << target.string() << "\n";
    }
    return exit_ok;
}

int check(const std::vector<std::string>& inputs, std::ostream& out, std::ostream& err) {
    int code = exit_ok;
    for (const auto& path : inputs) {
        try {
            auto unit = idl::load_unit(read_input(path), path);
            std::size_t interfaces = 0;
            for (const auto& d : unit.decls) interfaces += std::holds_alternative<idl::InterfaceDecl>(d) ? 1 : 0;
            out << path << ": ok, " << interfaces << " interfaces\n";
        } catch (const Failure& f) {
            err << f.message << "\n";
            code = exit_compile;
        } catch (const idl::IdlError& e) {
            err << e.what() << "\n";
            code = exit_compile;
        }
    }
    return code;
}

struct DemoArgs {
    std::string demo;
    std::uint64_t ticks = 500;
    std::string trace;
    std::string mode = "dynamic";
    std::string handler = "direct";
};

int run_demo(const DemoArgs& a, std::ostream& out, std::ostream& err) {
    winsim::BounceOptions opts;
    opts.ticks = a.ticks;
    opts.mode = *binding::mode_from_string(a.mode);
    opts.handler = a.handler == "queue" ? winsim::Handler::queued : winsim::Handler::ref_cells;
    if (trace_requested()) opts.memory_trace = &err;
    winsim::BounceRun run;
    try {
        run = winsim::run_bounce(opts);
    } catch (const std::exception& e) {
        throw Failure{exit_runtime, std::string("bounce: ") + e.what()};
    }
    if (!run.exit_code) throw Failure{exit_runtime, "bounce: message loop did not quit"};
    if (a.trace.empty()) {
        out << run.trace_text();
    } else {
        write_output(a.trace, run.trace_text());
        out << "bounce: " << a.ticks << " ticks, exit code " << *run.exit_code << ", " << run.trace.size()
            << " trace lines written to " << a.trace << "\n";
    }
    return *run.exit_code == 0 ? exit_ok : exit_runtime;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ML-IDL interface compiler and runtime simulator", "mlidl"};
    app.require_subcommand(1);

    CompileArgs ca;
    auto* c = app.add_subcommand("compile", "Generate bindings from one IDL file");
    c->add_option("input", ca.input, "IDL file")->required();
    c->add_option("--mode", ca.mode, "Binding mode")->check(CLI::IsMember({"static", "dynamic", "com"}))->capture_default_str();
    c->add_option("--level", ca.level, "Binding level")->check(CLI::IsMember({"abstract", "auto"}))->capture_default_str();
    c->add_option("--emit", ca.emit, "Artifacts to write")
        ->delimiter(',')
        ->check(CLI::IsMember({"sig", "binding"}))
        ->capture_default_str();
    c->add_option("-o,--out", ca.out_dir, "Output directory")->capture_default_str();
    c->add_option("--manifest", ca.manifest, "IID/CLSID manifest (JSON) for com mode");

    std::vector<std::string> check_inputs;
    auto* k = app.add_subcommand("check", "Parse and resolve IDL files");
    k->add_option("inputs", check_inputs, "IDL files")->required();

    DemoArgs da;
    auto* r = app.add_subcommand("run-demo", "Run a demo program in the simulated window system");
    r->add_option("demo", da.demo, "Demo name")->required()->check(CLI::IsMember({"bounce"}));
    r->add_option("--ticks", da.ticks, "Message-loop ticks before the window is closed")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{10000000}))
        ->capture_default_str();
    r->add_option("--trace", da.trace, "Write the trace here instead of standard output");
    r->add_option("--mode", da.mode, "Binding mode")->check(CLI::IsMember({"static", "dynamic"}))->capture_default_str();
    r->add_option("--handler", da.handler, "Window procedure: direct, or queue (worker thread)")
        ->check(CLI::IsMember({"direct", "queue"}))
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return exit_usage;
    }

    try {
        if (c->parsed()) return compile(ca, out);
        if (k->parsed()) return check(check_inputs, out, err);
        return run_demo(da, out, err);
    } catch (const Failure& f) {
        err << f.message << "\n";
        return f.code;
    } catch (const idl::IdlError& e) {
        err << e.what() << "\n";
        return exit_compile;
    } catch (const binding::BindingError& e) {
        err << e.what() << "\n";
        return exit_compile;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}

}  // namespace mlidl::cli
