#include <algorithm>
#include <cctype>

#include "mlidl/automation/automation.hpp"

namespace mlidl::automation {

using K = SemType::Kind;
using marshal::TempBlocks;
using wordmem::World;

const char* to_string(VarType vt) {
    switch (vt) {
    case VarType::empty: return "VT_EMPTY";
    case VarType::i4: return "VT_I4";
    case VarType::bstr: return "VT_BSTR";
    case VarType::dispatch: return "VT_DISPATCH";
    case VarType::bool_: return "VT_BOOL";
    case VarType::unknown: return "VT_UNKNOWN";
    case VarType::ui4: return "VT_UI4";
    }
    return "VT_?";
}

std::string to_string(const Variant& v) {
    std::string payload = std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, bool>) return p ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return "\"" + p + "\"";
            else if constexpr (std::is_same_v<T, std::uint32_t>) return wordmem::hex(p);
            else return std::to_string(p);
        },
        v.payload);
    return std::string(to_string(v.vt)) + (payload.empty() ? "" : "(" + payload + ")");
}

const char* to_string(DispErrorKind k) {
    switch (k) {
    case DispErrorKind::unknown_name: return "unknown-name";
    case DispErrorKind::member_not_found: return "member-not-found";
    case DispErrorKind::bad_param_count: return "bad-param-count";
    case DispErrorKind::type_mismatch: return "type-mismatch";
    case DispErrorKind::no_named_args: return "no-named-args";
    }
    return "disp-error";
}

DispError::DispError(DispErrorKind kind, const std::string& message, std::uint32_t arg_index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), arg_index_(arg_index) {}

Word DispError::hresult() const {
    switch (kind_) {
    case DispErrorKind::unknown_name: return DISP_E_UNKNOWNNAME;
    case DispErrorKind::member_not_found: return DISP_E_MEMBERNOTFOUND;
    case DispErrorKind::bad_param_count: return DISP_E_BADPARAMCOUNT;
    case DispErrorKind::type_mismatch: return DISP_E_TYPEMISMATCH;
    case DispErrorKind::no_named_args: return DISP_E_NONAMEDARGS;
    }
    return com::E_FAIL;
}

DispErrorKind disp_error_kind(Word hr) {
    switch (hr) {
    case DISP_E_UNKNOWNNAME: return DispErrorKind::unknown_name;
    case DISP_E_MEMBERNOTFOUND: return DispErrorKind::member_not_found;
    case DISP_E_BADPARAMCOUNT: return DispErrorKind::bad_param_count;
    case DISP_E_TYPEMISMATCH: return DispErrorKind::type_mismatch;
    case DISP_E_NONAMEDARGS: return DispErrorKind::no_named_args;
    }
    throw com::ComError(com::ComErrorKind::failed, "dispatch call failed with " + wordmem::hex(hr), hr);
}

// ---- coercion ------------------------------------------------------------------

Value coerce(const Variant& v, const SemType& t, const binding::BindingDesc& desc, std::uint32_t arg_index) {
    auto fail = [&]() -> Value {
        throw DispError(DispErrorKind::type_mismatch,
                        "argument " + std::to_string(arg_index) + ": cannot coerce " + to_string(v) + " to " +
                            binding::to_string(t.kind),
                        arg_index);
    };
    auto bits = [&]() -> std::optional<std::uint32_t> {
        if (v.vt == VarType::i4) return static_cast<std::uint32_t>(std::get<std::int32_t>(v.payload));
        if (v.vt == VarType::ui4) return std::get<std::uint32_t>(v.payload);
        return std::nullopt;
    };
    switch (t.kind) {
    case K::unit:
        if (v.vt == VarType::empty) return Value::unit();
        return fail();
    case K::int32:
        if (auto b = bits()) return Value::i32(static_cast<std::int32_t>(*b));
        return fail();
    case K::word32:
        if (auto b = bits()) return Value::word(*b);
        return fail();
    case K::bool_:
        if (v.vt == VarType::bool_) return Value::boolean(std::get<bool>(v.payload));
        return fail();
    case K::string8:
    case K::string16:
        if (v.vt == VarType::bstr) return Value::text(std::get<std::string>(v.payload));
        return fail();
    case K::handle:
        if (v.vt == VarType::dispatch || v.vt == VarType::unknown) return Value::word(std::get<std::uint32_t>(v.payload));
        return fail();
    case K::enum_: {
        const auto* e = desc.find_enum(t.ref);
        auto b = bits();
        if (!e || !b) return fail();
        auto name = e->from_int(*b);
        if (!name) return fail();
        return Value::enum_of(*name);
    }
    default: return fail();
    }
}

Variant to_variant(const Value& v, const SemType& t, const binding::BindingDesc& desc) {
    switch (t.kind) {
    case K::unit: return Variant::empty();
    case K::int32: return Variant::i4(v.as_i32());
    case K::word32: return Variant::ui4(v.as_word());
    case K::bool_: return Variant::boolean(v.as_bool());
    case K::string8:
    case K::string16: return v.is<std::string>() ? Variant::bstr(v.as_text()) : Variant::empty();
    case K::handle: return Variant::unknown(v.as_word());
    case K::enum_:
        if (const auto* e = desc.find_enum(t.ref)) return Variant::i4(static_cast<std::int32_t>(e->to_int(v.as<marshal::EnumValue>().variant)));
        break;
    default: break;
    }
    throw DispError(DispErrorKind::type_mismatch, std::string("no VARIANT form for ") + binding::to_string(t.kind));
}

// ---- memory layout ---------------------------------------------------------------

std::vector<Word> encode_variant(const Variant& v, TempBlocks& strings) {
    Word payload = 0;
    switch (v.vt) {
    case VarType::empty: break;
    case VarType::i4: payload = static_cast<Word>(std::get<std::int32_t>(v.payload)); break;
    case VarType::ui4:
    case VarType::dispatch:
    case VarType::unknown: payload = std::get<std::uint32_t>(v.payload); break;
    case VarType::bool_: payload = std::get<bool>(v.payload) ? 0xFFFF : 0; break;
    case VarType::bstr: {
        auto ws = marshal::Marshaller::pack_string16(std::get<std::string>(v.payload));
        Addr a = strings.alloc(static_cast<std::int64_t>(ws.size()));
        strings.world().store(a, ws);
        payload = a.value;
        break;
    }
    }
    return {static_cast<Word>(v.vt), 0, payload, 0};
}

Variant decode_variant(const World& w, const std::vector<Word>& ws) {
    Word payload = ws.at(2);
    switch (static_cast<VarType>(ws.at(0) & 0xFFFF)) {
    case VarType::empty: return Variant::empty();
    case VarType::i4: return Variant::i4(static_cast<std::int32_t>(payload));
    case VarType::ui4: return Variant::ui4(payload);
    case VarType::bool_: return Variant::boolean((payload & 0xFFFF) != 0);
    case VarType::dispatch: return Variant::dispatch(payload);
    case VarType::unknown: return Variant::unknown(payload);
    case VarType::bstr: return Variant::bstr(payload ? marshal::read_string16(w, Addr{payload}) : std::string());
    }
    throw DispError(DispErrorKind::type_mismatch, "unsupported VARIANT type " + std::to_string(ws[0] & 0xFFFF));
}

// ---- dispatch table ---------------------------------------------------------------

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

DispTable::DispTable(const binding::InterfaceDesc& itf) {
    for (const auto& m : itf.methods) {
        if (m.slot < 3) continue;
        for (const auto& p : m.params)
            if (p.dir != idl::Direction::in)
                throw com::ComError(com::ComErrorKind::failed, itf.name + "::" + m.name + " has out parameters; not dispatchable");
        methods_.push_back(&m);
    }
}

DispId DispTable::id_of(std::string_view name) const {
    std::string key = lower(name);
    for (std::size_t i = 0; i < methods_.size(); ++i)
        if (lower(methods_[i]->name) == key) return static_cast<DispId>(i + 1);
    throw DispError(DispErrorKind::unknown_name, "no member named '" + std::string(name) + "'");
}

const binding::LiftedSig& DispTable::method(DispId id) const {
    if (id < 1 || static_cast<std::size_t>(id) > methods_.size())
        throw DispError(DispErrorKind::member_not_found, "no member with DISPID " + std::to_string(id));
    return *methods_[static_cast<std::size_t>(id - 1)];
}

Variant Dispatcher::invoke(const InterfaceRef& self, DispId id, const std::vector<Variant>& args) {
    const binding::LiftedSig& sig = table_.method(id);
    auto in = sig.in_params();
    if (args.size() != in.size())
        throw DispError(DispErrorKind::bad_param_count,
                        sig.name + " takes " + std::to_string(in.size()) + " arguments, got " + std::to_string(args.size()));
    std::vector<Value> values;
    for (std::size_t i = 0; i < args.size(); ++i)
        values.push_back(coerce(args[i], in[i]->type, b_.desc(), static_cast<std::uint32_t>(i)));
    auto rs = b_.marshaller().call(sig, b_.runtime().get_method(self, static_cast<std::size_t>(sig.slot)), values,
                                   self.addr.value);
    if (rs.empty()) return Variant::empty();
    return to_variant(rs.back(), sig.ret, b_.desc());
}

// ---- dual interfaces ----------------------------------------------------------------

DualInterface make_dual(com::Bound& b, com::ObjectId obj, std::string_view interface_name,
                        const std::map<std::string, marshal::Impl>& impls) {
    const auto* itf = b.desc().find_interface(interface_name);
    if (!itf) throw com::ComError(com::ComErrorKind::witness_mismatch, "binding has no interface '" + std::string(interface_name) + "'");
    auto disp = std::make_shared<Dispatcher>(b, *itf);
    World& w = b.runtime().world();
    com::Iid iid = b.iid(interface_name);

    std::vector<wordmem::WordFn> slots;
    slots.push_back([&w](const std::vector<Word>& a) -> Word {
        if (a.size() != 2) throw wordmem::MemError(wordmem::MemErrorKind::arity_mismatch, "GetTypeInfoCount takes 2 words");
        if (!a[1]) return com::E_POINTER;
        w.store(Addr{a[1]}, {0});
        return com::S_OK;
    });
    slots.push_back([&w](const std::vector<Word>& a) -> Word {
        if (a.size() != 4) throw wordmem::MemError(wordmem::MemErrorKind::arity_mismatch, "GetTypeInfo takes 4 words");
        if (a[3]) w.store(Addr{a[3]}, {0});
        return com::E_NOTIMPL;
    });
    slots.push_back([&w, disp](const std::vector<Word>& a) -> Word {
        if (a.size() != 6) throw wordmem::MemError(wordmem::MemErrorKind::arity_mismatch, "GetIDsOfNames takes 6 words");
        Word hr = com::S_OK;
        for (Word k = 0; k < a[3]; ++k) {
            DispId id = DISPID_UNKNOWN;
            // Only the member name is resolved; parameter names are not supported.
            if (k == 0) {
                try {
                    id = disp->table().id_of(marshal::read_string16(w, Addr{w.read1(World::offset(Addr{a[2]}, k))}));
                } catch (const DispError&) {
                }
            }
            if (id == DISPID_UNKNOWN) hr = DISP_E_UNKNOWNNAME;
            w.store(World::offset(Addr{a[5]}, k), {static_cast<Word>(id)});
        }
        return hr;
    });
    slots.push_back([&w, disp, iid, obj](const std::vector<Word>& a) -> Word {
        if (a.size() != 9) throw wordmem::MemError(wordmem::MemErrorKind::arity_mismatch, "Invoke takes 9 words");
        auto dp = w.read(Addr{a[5]}, 4);
        if (dp[3] != 0) return DISP_E_NONAMEDARGS;
        std::vector<Variant> args;
        for (Word k = 0; k < dp[2]; ++k) args.push_back(decode_variant(w, w.read(World::offset(Addr{dp[0]}, 4 * k), 4)));
        try {
            Variant r = disp->invoke({Addr{a[0]}, iid, obj}, static_cast<DispId>(a[1]), args);
            if (a[6]) {
                TempBlocks owned(w);
                w.store(Addr{a[6]}, encode_variant(r, owned));
                owned.release_all();
            }
            return com::S_OK;
        } catch (const DispError& e) {
            if (e.kind() == DispErrorKind::type_mismatch && a[8]) w.store(Addr{a[8]}, {e.arg_index()});
            return e.hresult();
        }
    });
    for (auto& m : b.methods(interface_name, impls)) slots.push_back(std::move(m));
    InterfaceRef ref = b.runtime().make_interface(obj, iid, std::move(slots), {com::iid_dispatch()});
    return {ref, disp};
}

// ---- client side ------------------------------------------------------------------------

std::uint32_t get_type_info_count(com::Runtime& rt, const InterfaceRef& d) {
    TempBlocks temps(rt.world());
    Addr out = temps.alloc(1);
    Word hr = rt.get_method(d, 3)({d.addr.value, out.value});
    if (com::failed(hr)) throw com::ComError(com::ComErrorKind::failed, "GetTypeInfoCount failed", hr);
    return rt.world().read1(out);
}

DispId get_ids_of_names(com::Runtime& rt, const InterfaceRef& d, const std::string& name) {
    World& w = rt.world();
    TempBlocks temps(w);
    auto ws = marshal::Marshaller::pack_string16(name);
    Addr text = temps.alloc(static_cast<std::int64_t>(ws.size()));
    w.store(text, ws);
    Addr names = temps.alloc(1);
    w.store(names, {text.value});
    Addr out = temps.alloc(1);
    Word hr = rt.get_method(d, 5)({d.addr.value, 0, names.value, 1, 0, out.value});
    if (com::failed(hr)) throw DispError(disp_error_kind(hr), "GetIDsOfNames(\"" + name + "\") failed");
    return static_cast<DispId>(w.read1(out));
}

Variant invoke(com::Runtime& rt, const InterfaceRef& d, DispId id, const std::vector<Variant>& args) {
    World& w = rt.world();
    TempBlocks temps(w);
    Word rgvarg = 0;
    if (!args.empty()) {
        std::vector<Word> body;
        for (const auto& v : args) {
            auto ws = encode_variant(v, temps);
            body.insert(body.end(), ws.begin(), ws.end());
        }
        Addr a = temps.alloc(static_cast<std::int64_t>(body.size()));
        w.store(a, body);
        rgvarg = a.value;
    }
    Addr dp = temps.alloc(4);
    w.store(dp, {rgvarg, 0, static_cast<Word>(args.size()), 0});
    Addr result = temps.alloc(4);
    Addr argerr = temps.alloc(1);
    Word hr = rt.get_method(d, 6)({d.addr.value, static_cast<Word>(id), 0, 0, DISPATCH_METHOD, dp.value, result.value, 0,
                                   argerr.value});
    if (com::failed(hr))
        throw DispError(disp_error_kind(hr), "Invoke(" + std::to_string(id) + ") failed", w.read1(argerr));
    auto ws = w.read(result, 4);
    Variant r = decode_variant(w, ws);
    if (r.vt == VarType::bstr && ws[2]) w.free(Addr{ws[2]});
    return r;
}

}  // namespace mlidl::automation
