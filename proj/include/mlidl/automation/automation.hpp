#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mlidl/com/bound.hpp"

namespace mlidl::automation {

using binding::SemType;
using com::InterfaceRef;
using marshal::Value;
using wordmem::Addr;
using wordmem::Word;

enum class VarType : std::uint16_t { empty = 0, i4 = 3, bstr = 8, dispatch = 9, bool_ = 11, unknown = 13, ui4 = 19 };

const char* to_string(VarType vt);

struct Variant {
    using Payload = std::variant<std::monostate, std::int32_t, std::uint32_t, bool, std::string>;

    VarType vt = VarType::empty;
    Payload payload;  // dispatch/unknown carry the interface address as a word

    static Variant empty() { return {}; }
    static Variant i4(std::int32_t v) { return {VarType::i4, v}; }
    static Variant ui4(std::uint32_t v) { return {VarType::ui4, v}; }
    static Variant boolean(bool v) { return {VarType::bool_, v}; }
    static Variant bstr(std::string s) { return {VarType::bstr, std::move(s)}; }
    static Variant dispatch(Word itf) { return {VarType::dispatch, itf}; }
    static Variant unknown(Word itf) { return {VarType::unknown, itf}; }

    bool operator==(const Variant&) const = default;
};

std::string to_string(const Variant& v);

inline constexpr Word DISP_E_MEMBERNOTFOUND = 0x80020003;
inline constexpr Word DISP_E_TYPEMISMATCH = 0x80020005;
inline constexpr Word DISP_E_UNKNOWNNAME = 0x80020006;
inline constexpr Word DISP_E_NONAMEDARGS = 0x80020007;
inline constexpr Word DISP_E_BADPARAMCOUNT = 0x8002000E;
inline constexpr std::int32_t DISPID_UNKNOWN = -1;
inline constexpr Word DISPATCH_METHOD = 1;

enum class DispErrorKind { unknown_name, member_not_found, bad_param_count, type_mismatch, no_named_args };

const char* to_string(DispErrorKind k);

class DispError : public std::runtime_error {
public:
    DispError(DispErrorKind kind, const std::string& message, std::uint32_t arg_index = 0);

    DispErrorKind kind() const { return kind_; }
    Word hresult() const;
    /// 0-based argument position for type_mismatch.
    std::uint32_t arg_index() const { return arg_index_; }

private:
    DispErrorKind kind_;
    std::uint32_t arg_index_;
};

DispErrorKind disp_error_kind(Word hresult);

/// Exact tags convert directly, I4 and UI4 reinterpret bits, nothing else.
Value coerce(const Variant& v, const SemType& t, const binding::BindingDesc& desc, std::uint32_t arg_index = 0);
Variant to_variant(const Value& v, const SemType& t, const binding::BindingDesc& desc);

using DispId = std::int32_t;

/// Methods of one interface, numbered densely from 1 in declaration order.
class DispTable {
public:
    explicit DispTable(const binding::InterfaceDesc& itf);

    /// Case-insensitive.
    DispId id_of(std::string_view name) const;
    const binding::LiftedSig& method(DispId id) const;
    std::size_t size() const { return methods_.size(); }

private:
    std::vector<const binding::LiftedSig*> methods_;
};

/// Dispatch side of a dual interface: coerces arguments and calls the same
/// vtable slot a direct client would.
class Dispatcher {
public:
    Dispatcher(com::Bound& b, const binding::InterfaceDesc& itf) : b_(b), table_(itf) {}

    const DispTable& table() const { return table_; }
    Variant invoke(const InterfaceRef& self, DispId id, const std::vector<Variant>& args);

private:
    com::Bound& b_;
    DispTable table_;
};

struct DualInterface {
    InterfaceRef ref;
    std::shared_ptr<Dispatcher> dispatcher;
};

/// Vtable = IUnknown triple, GetTypeInfoCount, GetTypeInfo, GetIDsOfNames,
/// Invoke, then the interface's methods. Answers both its own IID and
/// IID_IDispatch.
DualInterface make_dual(com::Bound& b, com::ObjectId obj, std::string_view interface_name,
                        const std::map<std::string, marshal::Impl>& impls);

/// VARIANT is 4 words: vt, reserved, payload, reserved. A BSTR payload is
/// the address of a NUL-terminated UTF-16 block.
std::vector<Word> encode_variant(const Variant& v, marshal::TempBlocks& strings);
Variant decode_variant(const wordmem::World& w, const std::vector<Word>& ws);

/// Client calls through the raw IDispatch slots, using memory alone.
std::uint32_t get_type_info_count(com::Runtime& rt, const InterfaceRef& d);
DispId get_ids_of_names(com::Runtime& rt, const InterfaceRef& d, const std::string& name);
Variant invoke(com::Runtime& rt, const InterfaceRef& d, DispId id, const std::vector<Variant>& args);

}  // namespace mlidl::automation
