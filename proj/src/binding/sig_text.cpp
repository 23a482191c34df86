#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "mlidl/binding/emit.hpp"

namespace mlidl::binding {

namespace {

constexpr std::size_t kWidth = 72;

using K = SemType::Kind;

std::string rstrip(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

// Text built from plain pieces and parenthesized tuples; only tuples wrap.
struct Part {
    std::string text;
    std::vector<std::string> tuple;

    static Part plain(std::string s) { return {std::move(s), {}}; }
    static Part of_list(std::vector<std::string> items) {
        if (items.size() == 1) return plain(std::move(items.front()));
        return {{}, std::move(items)};
    }
};

class Sink {
public:
    void line(const std::string& s) { out_ += rstrip(s) + "\n"; }
    void blank() {
        if (out_.size() >= 2 && out_.compare(out_.size() - 2, 2, "\n\n") != 0) out_ += "\n";
    }

    void parts(const std::string& head, const std::vector<Part>& ps) {
        std::string cur = head;
        for (const Part& p : ps) {
            if (p.tuple.empty()) {
                cur += p.text;
                continue;
            }
            std::size_t open = cur.size();
            cur += "(";
            bool fresh = true;
            for (std::size_t i = 0; i < p.tuple.size(); ++i) {
                bool last = i + 1 == p.tuple.size();
                std::string piece = p.tuple[i] + (last ? ")" : " * ");
                if (!fresh && rstrip(cur + piece).size() > kWidth) {
                    line(cur);
                    cur = std::string(open + 1, ' ');
                }
                cur += piece;
                fresh = false;
            }
        }
        line(cur);
    }

    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class SigWriter {
public:
    explicit SigWriter(const BindingDesc& d) : d_(d) {}

    std::string run() {
        header();
        std::string module = d_.module;
        std::transform(module.begin(), module.end(), module.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        s_.line("signature " + module + "_SIG =");
        s_.line("  sig");
        pervasives("    ");
        s_.blank();
        scope_items("", "    ");
        for (const auto& i : d_.interfaces) {
            interface(i, "    ");
            s_.blank();
        }
        s_.line("  end");
        return s_.take();
    }

private:
    void header() {
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(content_hash(d_)));
        const std::string rule(70, '*');
        s_.line("(" + rule);
        s_.line(" *");
        s_.line(" *  This file was automatically generated by ml-idl");
        s_.line(std::string(" *  (content hash ") + hash + ")");
        s_.line(" *");
        s_.line(" " + rule + ")");
        s_.blank();
    }

    void pervasives(const std::string& in) {
        s_.line(in + "(*");
        s_.line(in + " * Pervasives");
        s_.line(in + " *)");
        s_.line(in + "type 'a pointer");
        s_.line(in + "val null : 'a pointer");
        s_.line(in + "val free : 'a pointer -> unit");
        if (d_.level == Level::abstract) {
            s_.line(in + "val toPointer : 'a list -> 'a pointer");
            s_.line(in + "val fromPointer : 'a pointer * Int32.int -> 'a list");
            s_.line(in + "type cstring");
            s_.line(in + "val cstring : String.string -> cstring");
            s_.line(in + "val fromCString : cstring -> String.string");
            s_.line(in + "type wstring");
            s_.line(in + "val wstring : String.string -> wstring");
            s_.line(in + "val fromWString : wstring -> String.string");
        }
    }

    template <typename T>
    static bool in_scope(const T& x, const std::string& scope) {
        return x.scope == scope;
    }

    void scope_items(const std::string& scope, const std::string& in) {
        bool any = false;
        for (const auto& c : d_.consts) {
            if (!in_scope(c, scope)) continue;
            s_.line(in + "val " + c.name + " : " + display_type(c.type, Level::auto_));
            any = true;
        }
        if (any) s_.blank();

        any = false;
        for (const auto& a : d_.aliases) {
            if (!in_scope(a, scope)) continue;
            s_.line(in + "type " + a.name + " = " + show(a.target));
            any = true;
        }
        if (any) s_.blank();

        any = false;
        for (const auto& c : d_.callbacks) {
            if (!in_scope(c, scope)) continue;
            callback(c, in);
            any = true;
        }
        if (any) s_.blank();

        for (const auto& r : d_.records) {
            if (!in_scope(r, scope)) continue;
            record(r, in);
            s_.blank();
        }
        for (const auto& e : d_.enums) {
            if (!in_scope(e, scope)) continue;
            enumeration(e, in);
            s_.blank();
        }
    }

    std::string show(const SemType& t) const { return display_type(t, d_.level); }

    std::vector<Part> function_parts(const LiftedSig& sig) const {
        std::vector<std::string> ins;
        std::set<std::string> iid_params;
        for (const auto& p : sig.params)
            if (!p.iid_is.empty()) iid_params.insert(p.iid_is);
        for (const AbiParam* p : sig.in_params())
            ins.push_back(iid_params.count(p->name) ? "'a Com.IID" : show(p->type));
        std::vector<std::string> outs;
        for (const auto& p : sig.params)
            if (p.dir != Direction::in) outs.push_back(p.iid_is.empty() ? show(p.type) : "'a Com.interface");
        if (!sig.ret.is_unit()) outs.push_back(show(sig.ret));
        if (ins.empty()) ins.push_back("unit");
        if (outs.empty()) outs.push_back("unit");
        return {Part::of_list(std::move(ins)), Part::plain(" -> "), Part::of_list(std::move(outs))};
    }

    void callback(const CallbackDesc& c, const std::string& in) {
        std::vector<Part> ps = function_parts(c.sig);
        if (d_.level == Level::abstract) {
            s_.line(in + "type " + c.name);
            ps.insert(ps.begin(), Part::plain("("));
            ps.push_back(Part::plain(") -> " + c.name));
            s_.parts(in + "val " + c.name + " : ", ps);
            return;
        }
        ps.insert(ps.begin(), Part::plain("("));
        ps.push_back(Part::plain(")"));
        s_.parts(in + "type " + c.name + " = ", ps);
    }

    // `{a:T,b:U}` on one line when it fits, otherwise one field per line
    // aligned after the brace.
    void braces(const std::string& head, const RecordLayout& r, const std::string& tail) {
        std::string one = head + "{";
        for (std::size_t i = 0; i < r.fields.size(); ++i)
            one += (i ? "," : "") + r.fields[i].name + ":" + show(r.fields[i].type);
        one += "}" + tail;
        if (one.size() <= kWidth || r.fields.size() < 2) {
            s_.line(one);
            return;
        }
        std::string pad(head.size() + 1, ' ');
        for (std::size_t i = 0; i < r.fields.size(); ++i) {
            bool last = i + 1 == r.fields.size();
            std::string f = r.fields[i].name + ":" + show(r.fields[i].type) + (last ? "}" + tail : ",");
            s_.line((i == 0 ? head + "{" : pad) + f);
        }
    }

    void record(const RecordLayout& r, const std::string& in) {
        if (d_.level == Level::abstract) {
            s_.line(in + "type " + r.name);
            s_.line(in + "structure " + r.name + " : sig");
            braces(in + "  val make : ", r, " -> " + r.name);
            braces(in + "  val get : " + r.name + " -> ", r, "");
            s_.line(in + "end");
            return;
        }
        braces(in + "datatype " + r.name + " = " + r.name + " of ", r, "");
    }

    void enumeration(const EnumMap& e, const std::string& in) {
        if (e.variants.empty()) {
            s_.line(in + "type " + e.name);
        } else {
            std::string head = in + "datatype " + e.name + " = ";
            std::string pad(head.size() - 2, ' ');
            for (std::size_t i = 0; i < e.variants.size(); ++i)
                s_.line((i == 0 ? head : pad + "| ") + e.variants[i].first);
        }
        s_.line(in + "structure " + e.name + " : sig");
        s_.line(in + "  val toInt : " + e.name + " -> Int32.int");
        s_.line(in + "  val fromInt : Int32.int -> " + e.name + " option");
        s_.line(in + "end");
    }

    void interface(const InterfaceDesc& i, const std::string& in) {
        s_.line(in + "structure " + i.name + " : sig");
        std::string inner = in + "  ";
        bool com = d_.mode == Mode::com;
        if (com) {
            s_.line(inner + "type " + i.name);
            s_.line(inner + "val " + i.name + " : " + i.name + " Com.IID");
            s_.blank();
        }
        scope_items(i.name, inner);
        for (const auto& m : i.methods) {
            std::vector<Part> ps = function_parts(m);
            if (com) ps.insert(ps.begin(), Part::plain(i.name + " Com.interface -> "));
            s_.parts(inner + "val " + m.name + " : ", ps);
        }
        s_.line(in + "end");
    }

    const BindingDesc& d_;
    Sink s_;
};

}  // namespace

std::string display_type(const SemType& t, Level level) {
    if (t.kind == K::guid) return t.alias == "CLSID" ? "Com.CLSID" : "Com.IID";
    if (t.kind == K::handle) return t.alias.empty() ? "Word32.word" : t.alias + " Com.interface";
    if (!t.alias.empty()) return t.alias;
    bool abstract = level == Level::abstract;
    switch (t.kind) {
    case K::unit: return "unit";
    case K::int32: return "Int32.int";
    case K::word32:
    case K::opaque_addr: return "Word32.word";
    case K::bool_: return "Bool.bool";
    case K::string8: return abstract ? "cstring" : "String.string";
    case K::string16: return abstract ? "wstring" : "String.string";
    case K::enum_:
    case K::record:
    case K::callback: return t.ref;
    case K::array: return display_type(t.element(), level) + (abstract ? " pointer" : " list");
    case K::handle:
    case K::guid: break;
    }
    return "?";
}

std::string emit_sig_text(const BindingDesc& desc) { return SigWriter(desc).run(); }

}  // namespace mlidl::binding
