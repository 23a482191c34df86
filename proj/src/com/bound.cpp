#include <algorithm>

#include "mlidl/com/bound.hpp"

namespace mlidl::com {

using marshal::MarshalError;
using marshal::MarshalErrorKind;
using marshal::Value;

namespace {

Guid parse_or_throw(const std::string& text, std::string_view what) {
    auto g = Guid::parse(text);
    if (!g) throw ComError(ComErrorKind::failed, "bad GUID for " + std::string(what) + ": " + text);
    return *g;
}

}  // namespace

const binding::InterfaceDesc& Bound::interface(std::string_view name) const {
    const auto* d = desc().find_interface(name);
    if (!d) throw ComError(ComErrorKind::witness_mismatch, "binding has no interface '" + std::string(name) + "'");
    return *d;
}

Iid Bound::iid(std::string_view interface_name) const {
    if (interface_name == "IUnknown") return iid_unknown();
    if (interface_name == "IDispatch") return iid_dispatch();
    const auto& d = interface(interface_name);
    return {parse_or_throw(d.iid, interface_name), d.name};
}

Clsid Bound::clsid(std::string_view class_name) const {
    const auto* c = desc().find_const(std::string(class_name) + "CLSID");
    if (!c || !std::holds_alternative<std::string>(c->value))
        throw ComError(ComErrorKind::class_not_registered, "binding has no class id for '" + std::string(class_name) + "'",
                       REGDB_E_CLASSNOTREG);
    return {parse_or_throw(std::get<std::string>(c->value), class_name), std::string(class_name)};
}

const binding::LiftedSig& Bound::method(std::string_view interface_name, std::string_view name) const {
    for (const auto* d = &interface(interface_name);;) {
        if (const auto* s = d->method(name)) return *s;
        if (d->parent.empty() || d->parent == "IUnknown" || d->parent == "IDispatch") break;
        d = &interface(d->parent);
    }
    throw ComError(ComErrorKind::out_of_range, std::string(interface_name) + " has no method '" + std::string(name) + "'");
}

std::vector<Value> Bound::call(const InterfaceRef& i, std::string_view name, const std::vector<Value>& ins) {
    const binding::LiftedSig& sig = method(i.iid.name, name);
    return m_.call(sig, rt_.get_method(i, static_cast<std::size_t>(sig.slot)), ins, i.addr.value);
}

InterfaceRef Bound::query(const InterfaceRef& i, std::string_view interface_name) {
    Iid want = iid(interface_name);
    std::vector<Value> rs;
    try {
        rs = call(i, "QueryInterface", {Value::guid(want.guid)});
    } catch (const MarshalError& e) {
        if (e.kind() != MarshalErrorKind::failed_hresult) throw;
        throw ComError(ComErrorKind::no_interface, "QueryInterface for " + want.name + " failed", e.hresult());
    }
    return {Addr{rs.at(0).as_word()}, want, i.owner};
}

std::vector<WordFn> Bound::methods(std::string_view interface_name, const std::map<std::string, marshal::Impl>& impls) {
    const auto& d = interface(interface_name);
    std::vector<WordFn> out;
    if (!d.parent.empty() && d.parent != "IUnknown" && d.parent != "IDispatch") out = methods(d.parent, impls);
    std::vector<const binding::LiftedSig*> own;
    for (const auto& s : d.methods)
        if (s.slot >= 3) own.push_back(&s);
    std::sort(own.begin(), own.end(), [](auto* a, auto* b) { return a->slot < b->slot; });
    for (const auto* s : own) {
        auto it = impls.find(s->name);
        if (it == impls.end())
            throw ComError(ComErrorKind::failed, d.name + "::" + s->name + " has no implementation", E_NOTIMPL);
        out.push_back(m_.skeleton(*s, it->second, true));
    }
    return out;
}

InterfaceRef Bound::implement(ObjectId obj, std::string_view interface_name,
                              const std::map<std::string, marshal::Impl>& impls, std::vector<Iid> also) {
    return rt_.make_interface(obj, iid(interface_name), methods(interface_name, impls), std::move(also));
}

}  // namespace mlidl::com
