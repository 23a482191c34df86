#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "mlidl/binding/emit.hpp"

namespace mlidl::binding {

using json = nlohmann::ordered_json;

namespace {

std::string hex_word(std::uint32_t w) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", w);
    return buf;
}

// ---- emit ----------------------------------------------------------------

json type_json(const SemType& t) {
    json j;
    j["kind"] = to_string(t.kind);
    if (!t.ref.empty()) j["ref"] = t.ref;
    if (!t.alias.empty()) j["alias"] = t.alias;
    if (!t.len_from.empty()) j["len_from"] = t.len_from;
    if (!t.elem.empty()) j["elem"] = type_json(t.element());
    return j;
}

json sig_json(const LiftedSig& s) {
    json params = json::array();
    for (const auto& p : s.params) {
        json pj;
        pj["name"] = p.name;
        pj["type"] = type_json(p.type);
        pj["dir"] = idl::to_string(p.dir);
        pj["by_ref"] = p.by_ref;
        if (!p.iid_is.empty()) pj["iid_is"] = p.iid_is;
        params.push_back(std::move(pj));
    }
    json j;
    j["name"] = s.name;
    j["params"] = std::move(params);
    j["ret"] = type_json(s.ret);
    j["callback"] = s.callback;
    j["slot"] = s.slot;
    j["hresult"] = s.hresult;
    return j;
}

json desc_json(const BindingDesc& d) {
    json j;
    j["module"] = d.module;
    j["mode"] = to_string(d.mode);
    j["level"] = to_string(d.level);

    j["interfaces"] = json::array();
    for (const auto& i : d.interfaces) {
        json ij;
        ij["name"] = i.name;
        ij["source_lib"] = i.source_lib;
        ij["parent"] = i.parent;
        ij["iid"] = i.iid;
        ij["methods"] = json::array();
        for (const auto& m : i.methods) ij["methods"].push_back(sig_json(m));
        j["interfaces"].push_back(std::move(ij));
    }

    j["enums"] = json::array();
    for (const auto& e : d.enums) {
        json ej;
        ej["name"] = e.name;
        ej["scope"] = e.scope;
        ej["variants"] = json::array();
        for (const auto& [n, v] : e.variants) ej["variants"].push_back(json{{"name", n}, {"value", hex_word(v)}});
        j["enums"].push_back(std::move(ej));
    }

    j["records"] = json::array();
    for (const auto& r : d.records) {
        json rj;
        rj["name"] = r.name;
        rj["scope"] = r.scope;
        rj["size"] = r.size;
        rj["fields"] = json::array();
        for (const auto& f : r.fields)
            rj["fields"].push_back(json{{"name", f.name}, {"type", type_json(f.type)}, {"offset", f.offset}});
        j["records"].push_back(std::move(rj));
    }

    j["consts"] = json::array();
    for (const auto& c : d.consts) {
        json cj;
        cj["name"] = c.name;
        cj["scope"] = c.scope;
        cj["type"] = type_json(c.type);
        std::visit([&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::uint32_t>)
                cj["value"] = hex_word(v);
            else
                cj["value"] = v;
        }, c.value);
        j["consts"].push_back(std::move(cj));
    }

    j["callbacks"] = json::array();
    for (const auto& c : d.callbacks) {
        json cj;
        cj["name"] = c.name;
        cj["scope"] = c.scope;
        cj["sig"] = sig_json(c.sig);
        j["callbacks"].push_back(std::move(cj));
    }

    j["aliases"] = json::array();
    for (const auto& a : d.aliases)
        j["aliases"].push_back(json{{"name", a.name}, {"scope", a.scope}, {"target", type_json(a.target)}});
    return j;
}

// ---- load ----------------------------------------------------------------

[[noreturn]] void violation(const std::string& path, const std::string& what) {
    throw BindingError(BindingErrorKind::schema_violation, path + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) violation(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) violation(path + "." + key, "missing");
    return *it;
}

std::string str(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_string()) violation(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string opt_str(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) violation(path, "expected an object");
    return j.contains(key) ? str(j, key, path) : std::string{};
}

bool boolean(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_boolean()) violation(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::int64_t integer(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_number_integer()) violation(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::uint32_t word(const json& v, const std::string& path) {
    if (!v.is_string()) violation(path, "expected a \"0x...\" word string");
    std::string s = v.get<std::string>();
    std::uint32_t w = 0;
    if (s.size() < 3 || s[0] != '0' || s[1] != 'x') violation(path, "expected a \"0x...\" word string");
    auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), w, 16);
    if (ec != std::errc{} || p != s.data() + s.size()) violation(path, "malformed word '" + s + "'");
    return w;
}

const json& array(const json& j, const char* key, const std::string& path) {
    const json& v = field(j, key, path);
    if (!v.is_array()) violation(path + "." + key, "expected an array");
    return v;
}

std::string at(const std::string& path, const char* key, std::size_t i) {
    return path + "." + key + "[" + std::to_string(i) + "]";
}

SemType load_type(const json& j, const std::string& path) {
    auto kind = kind_from_string(str(j, "kind", path));
    if (!kind) violation(path + ".kind", "unknown semantic type '" + str(j, "kind", path) + "'");
    SemType t = SemType::of(*kind, opt_str(j, "ref", path));
    t.alias = opt_str(j, "alias", path);
    t.len_from = opt_str(j, "len_from", path);
    bool needs_ref = *kind == SemType::Kind::enum_ || *kind == SemType::Kind::record || *kind == SemType::Kind::callback;
    if (needs_ref && t.ref.empty()) violation(path + ".ref", "missing");
    if (*kind == SemType::Kind::array) {
        t.elem.push_back(load_type(field(j, "elem", path), path + ".elem"));
        if (t.len_from.empty()) violation(path + ".len_from", "missing");
    }
    return t;
}

Direction load_dir(const json& j, const std::string& path) {
    std::string d = str(j, "dir", path);
    if (d == "in") return Direction::in;
    if (d == "out") return Direction::out;
    if (d == "inout") return Direction::inout;
    violation(path + ".dir", "unknown direction '" + d + "'");
}

LiftedSig load_sig(const json& j, const std::string& path) {
    LiftedSig s;
    s.name = str(j, "name", path);
    const json& params = array(j, "params", path);
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::string pp = at(path, "params", i);
        AbiParam p;
        p.name = str(params[i], "name", pp);
        p.type = load_type(field(params[i], "type", pp), pp + ".type");
        p.dir = load_dir(params[i], pp);
        p.by_ref = boolean(params[i], "by_ref", pp);
        p.iid_is = opt_str(params[i], "iid_is", pp);
        s.params.push_back(std::move(p));
    }
    s.ret = load_type(field(j, "ret", path), path + ".ret");
    s.callback = boolean(j, "callback", path);
    s.slot = static_cast<int>(integer(j, "slot", path));
    s.hresult = boolean(j, "hresult", path);
    return s;
}

BindingDesc load_desc(const json& j) {
    const std::string root = "$";
    BindingDesc d;
    d.module = str(j, "module", root);
    auto mode = mode_from_string(str(j, "mode", root));
    if (!mode) violation("$.mode", "unknown mode");
    d.mode = *mode;
    auto level = level_from_string(str(j, "level", root));
    if (!level) violation("$.level", "unknown level");
    d.level = *level;

    const json& ifaces = array(j, "interfaces", root);
    for (std::size_t i = 0; i < ifaces.size(); ++i) {
        std::string p = at(root, "interfaces", i);
        InterfaceDesc out;
        out.name = str(ifaces[i], "name", p);
        out.source_lib = str(ifaces[i], "source_lib", p);
        out.parent = str(ifaces[i], "parent", p);
        out.iid = str(ifaces[i], "iid", p);
        const json& methods = array(ifaces[i], "methods", p);
        for (std::size_t m = 0; m < methods.size(); ++m) out.methods.push_back(load_sig(methods[m], at(p, "methods", m)));
        d.interfaces.push_back(std::move(out));
    }

    const json& enums = array(j, "enums", root);
    for (std::size_t i = 0; i < enums.size(); ++i) {
        std::string p = at(root, "enums", i);
        EnumMap e;
        e.name = str(enums[i], "name", p);
        e.scope = str(enums[i], "scope", p);
        const json& vs = array(enums[i], "variants", p);
        for (std::size_t v = 0; v < vs.size(); ++v) {
            std::string vp = at(p, "variants", v);
            e.variants.emplace_back(str(vs[v], "name", vp), word(field(vs[v], "value", vp), vp + ".value"));
        }
        d.enums.push_back(std::move(e));
    }

    const json& records = array(j, "records", root);
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::string p = at(root, "records", i);
        RecordLayout r;
        r.name = str(records[i], "name", p);
        r.scope = str(records[i], "scope", p);
        std::int64_t size = integer(records[i], "size", p);
        if (size < 0) violation(p + ".size", "negative size");
        r.size = static_cast<std::uint32_t>(size);
        const json& fs = array(records[i], "fields", p);
        for (std::size_t f = 0; f < fs.size(); ++f) {
            std::string fp = at(p, "fields", f);
            FieldLayout fl;
            fl.name = str(fs[f], "name", fp);
            fl.type = load_type(field(fs[f], "type", fp), fp + ".type");
            std::int64_t off = integer(fs[f], "offset", fp);
            if (off < 0) violation(fp + ".offset", "negative offset");
            fl.offset = static_cast<std::uint32_t>(off);
            r.fields.push_back(std::move(fl));
        }
        d.records.push_back(std::move(r));
    }

    const json& consts = array(j, "consts", root);
    for (std::size_t i = 0; i < consts.size(); ++i) {
        std::string p = at(root, "consts", i);
        ConstDesc c;
        c.name = str(consts[i], "name", p);
        c.scope = str(consts[i], "scope", p);
        c.type = load_type(field(consts[i], "type", p), p + ".type");
        const json& v = field(consts[i], "value", p);
        switch (c.type.kind) {
        case SemType::Kind::word32: c.value = word(v, p + ".value"); break;
        case SemType::Kind::int32: c.value = integer(consts[i], "value", p); break;
        case SemType::Kind::string8:
        case SemType::Kind::guid: c.value = str(consts[i], "value", p); break;
        default: violation(p + ".type", "constants must be int32, word32, string8 or guid");
        }
        d.consts.push_back(std::move(c));
    }

    const json& callbacks = array(j, "callbacks", root);
    for (std::size_t i = 0; i < callbacks.size(); ++i) {
        std::string p = at(root, "callbacks", i);
        CallbackDesc c;
        c.name = str(callbacks[i], "name", p);
        c.scope = str(callbacks[i], "scope", p);
        c.sig = load_sig(field(callbacks[i], "sig", p), p + ".sig");
        d.callbacks.push_back(std::move(c));
    }

    if (j.contains("aliases")) {
        const json& aliases = array(j, "aliases", root);
        for (std::size_t i = 0; i < aliases.size(); ++i) {
            std::string p = at(root, "aliases", i);
            d.aliases.push_back({str(aliases[i], "name", p), load_type(field(aliases[i], "target", p), p + ".target"),
                                 str(aliases[i], "scope", p)});
        }
    }
    return d;
}

}  // namespace

std::string emit_binding_file(const BindingDesc& desc) { return desc_json(desc).dump(2) + "\n"; }

BindingDesc load_binding_file(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        violation("$", e.what());
    }
    return load_desc(j);
}

std::uint64_t content_hash(const BindingDesc& desc) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : emit_binding_file(desc)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace mlidl::binding
