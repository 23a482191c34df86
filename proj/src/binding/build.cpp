#include <algorithm>
#include <set>

#include <json.hpp>

#include "mlidl/binding/binding.hpp"
#include "mlidl/com/guid.hpp"
#include "mlidl/idl/resolve.hpp"

namespace mlidl::binding {

using idl::BaseType;
using idl::IdlType;

namespace {

using K = SemType::Kind;

class Builder {
public:
    Builder(const idl::IdlUnit& unit, Mode mode, Level level, const Manifest& manifest)
        : unit_(unit), symbols_(unit), manifest_(manifest) {
        desc_.mode = mode;
        desc_.level = level;
    }

    BindingDesc run() {
        desc_.module = module_name();
        for (const auto& d : unit_.decls) {
            std::visit([&](const auto& x) { global(x); }, d);
        }
        if (desc_.mode == Mode::com) add_clsids();
        for (auto& r : desc_.records) r.size = word_size(SemType::of(K::record, r.name), desc_);
        for (auto& r : desc_.records) {
            std::uint32_t off = 0;
            for (auto& f : r.fields) {
                f.offset = off;
                off += word_size(f.type, desc_);
            }
        }
        return std::move(desc_);
    }

private:
    std::string module_name() const {
        if (auto n = unit_.sml_name()) return *n;
        std::string stem = unit_.source_name;
        if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos) stem = stem.substr(slash + 1);
        if (auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
        if (stem.empty() || stem.front() == '<') return "IDL";
        return stem;
    }

    // ---- declarations -----------------------------------------------------

    void global(const idl::AnnotationDecl&) {}
    void global(const idl::TypedefDecl& d) { member(d, ""); }
    void global(const idl::RecordDecl& d) { member(d, ""); }
    void global(const idl::EnumDecl& d) { member(d, ""); }
    void global(const idl::ConstDecl& d) { member(d, ""); }

    void global(const idl::InterfaceDecl& d) {
        for (const auto& m : d.members) std::visit([&](const auto& x) { member(x, d.name); }, m);

        InterfaceDesc out;
        out.name = d.name;
        out.source_lib = d.sml_source.value_or("");
        out.parent = d.parent.value_or("");
        int slot = -1;
        if (desc_.mode == Mode::com) {
            if (out.parent.empty()) out.parent = "IUnknown";
            auto it = manifest_.iids.find(d.name);
            if (it == manifest_.iids.end())
                throw BindingError(BindingErrorKind::missing_iid,
                                   "interface '" + d.name + "' has no IID in the manifest");
            out.iid = it->second;
            out.methods.push_back(query_interface());
            slot = first_slot(d);
        }
        for (const auto& op : d.ops) {
            LiftedSig sig = lift(op.name, op.params, op.ret, false);
            if (slot >= 0) {
                sig.slot = slot++;
                if (sig.ret.alias == "HRESULT") {
                    sig.hresult = true;
                    sig.ret = SemType::of(K::unit);
                }
            }
            out.methods.push_back(std::move(sig));
        }
        desc_.interfaces.push_back(std::move(out));
    }

    // First vtable slot for the interface's own methods.
    int first_slot(const idl::InterfaceDecl& d) const {
        if (!d.parent || *d.parent == "IUnknown") return 3;
        if (*d.parent == "IDispatch") return 7;
        const idl::InterfaceDecl* p = symbols_.find_interface(*d.parent);
        return first_slot(*p) + static_cast<int>(p->ops.size());
    }

    static LiftedSig query_interface() {
        LiftedSig qi;
        qi.name = "QueryInterface";
        qi.slot = 0;
        qi.hresult = true;
        AbiParam iid{"iid", SemType::of(K::guid), Direction::in, true, ""};
        iid.type.alias = "IID";
        AbiParam ppv{"ppv", SemType::of(K::handle), Direction::out, true, "iid"};
        qi.params = {iid, ppv};
        return qi;
    }

    void add_clsids() {
        for (const auto& [name, text] : manifest_.clsids) {
            ConstDesc c;
            c.name = name + "CLSID";
            c.type = SemType::of(K::guid);
            c.type.alias = "CLSID";
            c.value = text;
            desc_.consts.push_back(std::move(c));
        }
    }

    void member(const idl::TypedefDecl& d, const std::string& scope) {
        if (d.type.kind == IdlType::Kind::func) {
            LiftedSig sig = lift(d.name, d.type.params, d.type.inner.front(), true);
            desc_.callbacks.push_back({d.name, std::move(sig), scope});
            return;
        }
        desc_.aliases.push_back({d.name, lower(d.type, false), scope});
    }

    void member(const idl::RecordDecl& d, const std::string& scope) {
        RecordLayout r;
        r.name = d.name;
        r.scope = scope;
        for (const auto& f : d.fields) r.fields.push_back({f.name, lower(f.type, false), 0});
        desc_.records.push_back(std::move(r));
    }

    void member(const idl::EnumDecl& d, const std::string& scope) {
        EnumMap e;
        e.name = d.name;
        e.scope = scope;
        for (const auto& v : d.variants) e.variants.emplace_back(v.name, v.value);
        desc_.enums.push_back(std::move(e));
    }

    void member(const idl::ConstDecl& d, const std::string& scope) {
        ConstDesc c;
        c.name = d.name;
        c.scope = scope;
        c.value = d.value;
        if (std::holds_alternative<std::string>(d.value)) {
            c.type = SemType::of(K::string8);
        } else if (std::holds_alternative<std::uint32_t>(d.value)) {
            c.type = SemType::of(K::word32);
        } else {
            c.type = lower(d.type, false);
            if (c.type.kind != K::int32 && c.type.kind != K::word32) c.type = SemType::of(K::int32);
            if (c.type.kind == K::word32) c.value = static_cast<std::uint32_t>(std::get<std::int64_t>(d.value));
        }
        desc_.consts.push_back(std::move(c));
    }

    // ---- signatures -------------------------------------------------------

    LiftedSig lift(const std::string& name, const std::vector<idl::ParamDecl>& params, const IdlType& ret,
                   bool callback) {
        LiftedSig sig;
        sig.name = name;
        sig.callback = callback;
        sig.ret = lower(ret, false);
        for (const auto& p : params) sig.params.push_back(lift_param(name, p));
        return sig;
    }

    AbiParam lift_param(const std::string& op, const idl::ParamDecl& p) {
        AbiParam out;
        out.name = p.name;
        out.dir = p.dir;
        out.iid_is = p.attrs.iid_is.value_or("");
        const IdlType& t = p.type;
        bool string = p.attrs.string || t.is_string;

        if (t.kind == IdlType::Kind::array) {
            out.type = SemType::array_of(lower(t.pointee(), false), t.name);
        } else if (t.kind == IdlType::Kind::ptr && string && p.dir == Direction::in) {
            out.type = lower(t, true);
        } else if (t.kind == IdlType::Kind::ptr &&
                   (p.dir != Direction::in || p.attrs.ref || t.is_ref || pointee_is_record(t))) {
            out.by_ref = true;
            const IdlType& inner = t.pointee();
            if (inner.kind == IdlType::Kind::ptr && strip(inner.pointee()).is_void())
                out.type = SemType::of(K::handle);
            else
                out.type = lower(inner, string);
        } else if (p.dir != Direction::in) {
            out.by_ref = true;
            out.type = lower(t, string);
        } else {
            out.type = lower(t, string);
        }

        if (p.dir != Direction::in && out.type.kind == K::callback)
            throw BindingError(BindingErrorKind::unsupported,
                               op + ": out parameter '" + p.name + "' of callback type is not supported");
        return out;
    }

    const IdlType& strip(const IdlType& t) const { return symbols_.strip_aliases(t); }

    bool pointee_is_record(const IdlType& t) const {
        const IdlType& s = strip(t.pointee());
        if (s.kind != IdlType::Kind::named) return false;
        auto e = symbols_.find_type(s.name);
        return e && std::holds_alternative<const idl::RecordDecl*>(*e);
    }

    // ---- type lowering ----------------------------------------------------

    SemType lower(const IdlType& t, bool string) {
        switch (t.kind) {
        case IdlType::Kind::base:
            return lower_base(t.base);
        case IdlType::Kind::named:
            return lower_named(t.name);
        case IdlType::Kind::array:
            return SemType::array_of(lower(t.pointee(), false), t.name);
        case IdlType::Kind::func:
            throw BindingError(BindingErrorKind::unsupported, "anonymous function type");
        case IdlType::Kind::ptr:
            break;
        }
        const IdlType& inner = strip(t.pointee());
        if ((string || t.is_string) && inner.kind == IdlType::Kind::base) {
            if (inner.base == BaseType::char_) return SemType::of(K::string8);
            if (inner.base == BaseType::wchar) return SemType::of(K::string16);
        }
        if (inner.kind == IdlType::Kind::named && symbols_.find_interface(inner.name)) {
            SemType h = SemType::of(K::handle);
            h.alias = inner.name;
            return h;
        }
        return SemType::of(K::opaque_addr);
    }

    static SemType lower_base(BaseType b) {
        switch (b) {
        case BaseType::void_: return SemType::of(K::unit);
        case BaseType::boolean: return SemType::of(K::bool_);
        case BaseType::unsigned_long: return SemType::of(K::word32);
        default: return SemType::of(K::int32);
        }
    }

    SemType lower_named(const std::string& name) {
        if (auto e = symbols_.find_type(name)) {
            if (auto td = std::get_if<const idl::TypedefDecl*>(&*e)) {
                if ((*td)->type.kind == IdlType::Kind::func) {
                    SemType cb = SemType::of(K::callback, (*td)->name);
                    cb.alias = (*td)->name;
                    return cb;
                }
                SemType s = lower((*td)->type, false);
                s.alias = name;
                return s;
            }
            if (auto r = std::get_if<const idl::RecordDecl*>(&*e)) return SemType::of(K::record, (*r)->name);
            if (auto en = std::get_if<const idl::EnumDecl*>(&*e)) return SemType::of(K::enum_, (*en)->name);
            SemType h = SemType::of(K::handle);
            h.alias = name;
            return h;
        }
        SemType s;
        switch (*idl::predeclared(name)) {
        case idl::Predeclared::uint:
        case idl::Predeclared::dword:
        case idl::Predeclared::hresult: s = SemType::of(K::word32); break;
        case idl::Predeclared::lpvoid: s = SemType::of(K::opaque_addr); break;
        case idl::Predeclared::iid:
        case idl::Predeclared::clsid: s = SemType::of(K::guid); break;
        case idl::Predeclared::iunknown:
        case idl::Predeclared::idispatch: s = SemType::of(K::handle); break;
        }
        s.alias = name;
        return s;
    }

    const idl::IdlUnit& unit_;
    idl::SymbolTable symbols_;
    const Manifest& manifest_;
    BindingDesc desc_;
};

}  // namespace

Manifest parse_manifest(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw BindingError(BindingErrorKind::bad_manifest, e.what());
    }
    Manifest m;
    auto section = [&](const char* key, std::map<std::string, std::string>& into) {
        if (!j.contains(key)) return;
        if (!j[key].is_object()) throw BindingError(BindingErrorKind::bad_manifest, std::string(key) + " must be an object");
        for (auto& [name, v] : j[key].items()) {
            std::optional<com::Guid> g = v.is_string() ? com::Guid::parse(v.get<std::string>()) : std::nullopt;
            if (!g) throw BindingError(BindingErrorKind::bad_manifest, std::string(key) + "." + name + " is not a GUID");
            into[name] = g->to_string();
        }
    };
    if (!j.is_object()) throw BindingError(BindingErrorKind::bad_manifest, "manifest must be an object");
    section("iids", m.iids);
    section("clsids", m.clsids);
    return m;
}

BindingDesc build_binding(const idl::IdlUnit& unit, Mode mode, Level level, const Manifest& manifest) {
    return Builder(unit, mode, level, manifest).run();
}

namespace {

std::uint32_t word_size_impl(const SemType& t, const BindingDesc& desc, std::set<std::string>& open) {
    if (t.kind == K::unit) return 0;
    if (t.kind == K::guid) return 4;
    if (t.kind != K::record) return 1;
    const RecordLayout* r = desc.find_record(t.ref);
    if (!r) throw BindingError(BindingErrorKind::unknown_type, "unknown record '" + t.ref + "'");
    if (!open.insert(r->name).second)
        throw BindingError(BindingErrorKind::unsupported, "record '" + r->name + "' contains itself");
    std::uint32_t n = 0;
    for (const auto& f : r->fields) n += word_size_impl(f.type, desc, open);
    open.erase(r->name);
    return n;
}

}  // namespace

std::uint32_t word_size(const SemType& t, const BindingDesc& desc) {
    std::set<std::string> open;
    return word_size_impl(t, desc, open);
}

}  // namespace mlidl::binding
