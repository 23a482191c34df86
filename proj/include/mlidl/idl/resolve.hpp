#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "mlidl/idl/ast.hpp"

namespace mlidl::idl {

/// Names every unit may use without declaring them.
enum class Predeclared {
    uint,       // UINT
    dword,      // DWORD
    lpvoid,     // LPVOID
    hresult,    // HRESULT
    iid,        // IID, REFIID
    clsid,      // CLSID
    iunknown,   // interface IUnknown
    idispatch,  // interface IDispatch
};

std::optional<Predeclared> predeclared(std::string_view name);

/// Name lookup over one unit. User declarations shadow predeclared names.
class SymbolTable {
public:
    using TypeEntry = std::variant<const TypedefDecl*, const RecordDecl*, const EnumDecl*, const InterfaceDecl*>;

    explicit SymbolTable(const IdlUnit& unit);

    /// Looks up a type name (typedef, record or enum name/tag, interface).
    std::optional<TypeEntry> find_type(std::string_view name) const;
    const InterfaceDecl* find_interface(std::string_view name) const;

    /// Follows typedef aliases until a non-typedef type is reached.
    const IdlType& strip_aliases(const IdlType& t) const;

    bool is_integer(const IdlType& t) const;
    bool is_iid(const IdlType& t) const;

private:
    std::map<std::string, TypeEntry, std::less<>> types_;
    std::map<std::string, const InterfaceDecl*, std::less<>> interfaces_;
};

/// Verifies that every named type resolves, that size_is/iid_is name a
/// suitable sibling parameter, and that interface inheritance is acyclic.
/// Returns the unit unchanged on success.
IdlUnit resolve(const IdlUnit& unit);

}  // namespace mlidl::idl
