#include "mlidl/marshal/api.hpp"

namespace mlidl::marshal {

namespace {

std::string key(std::string_view itf, std::string_view fn) { return std::string(itf) + "." + std::string(fn); }

}  // namespace

Api::Api(Marshaller& m) : m_(m) {
    if (m.desc().mode == binding::Mode::com)
        throw MarshalError(MarshalErrorKind::unknown_type, "com-mode bindings are called through interfaces");
    if (m.desc().mode == binding::Mode::static_)
        for (const auto& itf : m.desc().interfaces)
            for (const auto& s : itf.methods) resolve(itf.name, s.name);
}

const binding::InterfaceDesc& Api::interface(std::string_view name) const {
    const auto* d = m_.desc().find_interface(name);
    if (!d) throw MarshalError(MarshalErrorKind::unknown_type, "binding has no interface '" + std::string(name) + "'");
    return *d;
}

Addr Api::resolve(std::string_view interface_name, std::string_view function) {
    std::string k = key(interface_name, function);
    if (auto it = symbols_.find(k); it != symbols_.end()) return it->second;
    const auto& itf = interface(interface_name);
    if (!itf.method(function))
        throw MarshalError(MarshalErrorKind::unknown_type, itf.name + " has no function '" + std::string(function) + "'");
    auto& w = m_.world();
    Addr a;
    if (!itf.source_lib.empty()) {
        a = w.get_function(w.open_library(itf.source_lib), function);
    } else {
        // No library named: first registered library exporting the symbol.
        bool found = false;
        for (const auto& [name, lib] : w.libraries())
            if (lib.symbols.count(function)) {
                a = w.get_function(lib, function);
                found = true;
                break;
            }
        if (!found)
            throw wordmem::MemError(wordmem::MemErrorKind::unknown_symbol, "no library exports '" + std::string(function) + "'");
    }
    symbols_.emplace(std::move(k), a);
    return a;
}

std::vector<Value> Api::call(std::string_view interface_name, std::string_view function, const std::vector<Value>& ins) {
    Addr a = resolve(interface_name, function);
    return m_.call(*interface(interface_name).method(function), m_.world().addr_to_fun(a), ins);
}

Value Api::call1(std::string_view interface_name, std::string_view function, const std::vector<Value>& ins) {
    auto rs = call(interface_name, function, ins);
    return rs.empty() ? Value::unit() : rs.back();
}

}  // namespace mlidl::marshal
