#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mlidl/binding/binding.hpp"
#include "mlidl/com/com.hpp"
#include "mlidl/marshal/marshal.hpp"

namespace mlidl::com {

/// COM through a com-mode binding: ids come from the binding's manifest
/// data, calls are marshalled per the lifted signatures, and server vtables
/// are built from high-level implementations.
class Bound {
public:
    Bound(Runtime& rt, marshal::Marshaller& m) : rt_(rt), m_(m) {}

    Runtime& runtime() const { return rt_; }
    marshal::Marshaller& marshaller() const { return m_; }
    const binding::BindingDesc& desc() const { return m_.desc(); }

    Iid iid(std::string_view interface_name) const;
    /// From the `<name>CLSID` constant.
    Clsid clsid(std::string_view class_name) const;

    /// Looks the method up on the interface `i` witnesses (or its parents)
    /// and calls its vtable slot with `i` as the receiver.
    std::vector<marshal::Value> call(const InterfaceRef& i, std::string_view method,
                                     const std::vector<marshal::Value>& ins);

    /// Through the generated QueryInterface signature.
    InterfaceRef query(const InterfaceRef& i, std::string_view interface_name);

    /// Vtable entries after the IUnknown triple: inherited methods first.
    /// Each implementation receives the receiver word followed by the ins.
    std::vector<WordFn> methods(std::string_view interface_name, const std::map<std::string, marshal::Impl>& impls);

    InterfaceRef implement(ObjectId obj, std::string_view interface_name,
                           const std::map<std::string, marshal::Impl>& impls, std::vector<Iid> also = {});

    const binding::LiftedSig& method(std::string_view interface_name, std::string_view method) const;

private:
    const binding::InterfaceDesc& interface(std::string_view name) const;

    Runtime& rt_;
    marshal::Marshaller& m_;
};

}  // namespace mlidl::com
