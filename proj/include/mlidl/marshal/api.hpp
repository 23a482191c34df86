#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mlidl/marshal/marshal.hpp"

namespace mlidl::marshal {

/// Calls the functions of a static or dynamic binding through the libraries
/// registered in the marshaller's world. Static mode resolves every symbol
/// when constructed; dynamic mode resolves each one on first use.
class Api {
public:
    explicit Api(Marshaller& m);

    std::vector<Value> call(std::string_view interface_name, std::string_view function, const std::vector<Value>& ins);
    /// The single result, or unit for functions without one.
    Value call1(std::string_view interface_name, std::string_view function, const std::vector<Value>& ins);

    Addr resolve(std::string_view interface_name, std::string_view function);
    Marshaller& marshaller() const { return m_; }

private:
    const binding::InterfaceDesc& interface(std::string_view name) const;

    Marshaller& m_;
    std::map<std::string, Addr, std::less<>> symbols_;
};

}  // namespace mlidl::marshal
