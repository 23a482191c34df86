#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mlidl/idl/ast.hpp"

namespace mlidl::binding {

using idl::Direction;

/// Semantic type of a value crossing the boundary.
struct SemType {
    enum class Kind { unit, int32, word32, bool_, string8, string16, handle, enum_, record, array, callback, opaque_addr, guid };

    Kind kind = Kind::unit;
    std::string ref;       // enum_, record, callback: declaration name
    std::string alias;     // typedef name used for display, if any
    std::string len_from;  // array: sibling parameter carrying the length
    std::vector<SemType> elem;  // array: element type

    static SemType of(Kind k, std::string ref = {}) {
        SemType t;
        t.kind = k;
        t.ref = std::move(ref);
        return t;
    }
    static SemType array_of(SemType e, std::string len) {
        SemType t;
        t.kind = Kind::array;
        t.len_from = std::move(len);
        t.elem.push_back(std::move(e));
        return t;
    }

    bool is_unit() const { return kind == Kind::unit; }
    const SemType& element() const { return elem.front(); }

    bool operator==(const SemType&) const = default;
};

const char* to_string(SemType::Kind k);
std::optional<SemType::Kind> kind_from_string(std::string_view s);

enum class Mode { static_, dynamic, com };
enum class Level { abstract, auto_ };

const char* to_string(Mode m);
const char* to_string(Level l);
std::optional<Mode> mode_from_string(std::string_view s);
std::optional<Level> level_from_string(std::string_view s);

struct AbiParam {
    std::string name;
    SemType type;
    Direction dir = Direction::in;
    bool by_ref = false;   // passed as the address of a block holding the value
    std::string iid_is;    // names the in-param carrying this interface's IID

    bool operator==(const AbiParam&) const = default;
};

/// A function signature after lifting: out params become results.
struct LiftedSig {
    std::string name;
    std::vector<AbiParam> params;  // ABI order = declaration order
    SemType ret;                   // unit for void (and for HRESULT methods)
    bool callback = false;
    int slot = -1;                 // vtable index in com mode
    bool hresult = false;          // ABI return is an HRESULT checked by the caller

    std::vector<const AbiParam*> in_params() const;
    /// Out/inout params in declaration order, then the return value.
    std::vector<SemType> results() const;
    std::size_t abi_arity() const { return params.size() + (slot >= 0 ? 1 : 0); }

    bool operator==(const LiftedSig&) const = default;
};

struct EnumMap {
    std::string name;
    std::vector<std::pair<std::string, std::uint32_t>> variants;
    std::string scope;

    std::uint32_t to_int(const std::string& variant) const;
    /// First-declared variant carrying `value`.
    std::optional<std::string> from_int(std::uint32_t value) const;

    bool operator==(const EnumMap&) const = default;
};

struct FieldLayout {
    std::string name;
    SemType type;
    std::uint32_t offset = 0;  // in words

    bool operator==(const FieldLayout&) const = default;
};

struct RecordLayout {
    std::string name;
    std::vector<FieldLayout> fields;
    std::uint32_t size = 0;  // in words
    std::string scope;

    const FieldLayout* field(std::string_view n) const;

    bool operator==(const RecordLayout&) const = default;
};

struct ConstDesc {
    using Value = std::variant<std::string, std::int64_t, std::uint32_t>;

    std::string name;
    SemType type;
    Value value;  // string8 and guid: text; int32: integer; word32: word
    std::string scope;

    bool operator==(const ConstDesc&) const = default;
};

struct AliasDesc {
    std::string name;
    SemType target;
    std::string scope;

    bool operator==(const AliasDesc&) const = default;
};

struct CallbackDesc {
    std::string name;
    LiftedSig sig;
    std::string scope;

    bool operator==(const CallbackDesc&) const = default;
};

struct InterfaceDesc {
    std::string name;
    std::string source_lib;
    std::string parent;
    std::string iid;  // com mode only
    std::vector<LiftedSig> methods;

    const LiftedSig* method(std::string_view n) const;

    bool operator==(const InterfaceDesc&) const = default;
};

struct BindingDesc {
    std::string module;
    Mode mode = Mode::static_;
    Level level = Level::auto_;
    std::vector<InterfaceDesc> interfaces;
    std::vector<EnumMap> enums;
    std::vector<RecordLayout> records;
    std::vector<ConstDesc> consts;
    std::vector<CallbackDesc> callbacks;
    std::vector<AliasDesc> aliases;

    const InterfaceDesc* find_interface(std::string_view n) const;
    const EnumMap* find_enum(std::string_view n) const;
    const RecordLayout* find_record(std::string_view n) const;
    const CallbackDesc* find_callback(std::string_view n) const;
    const ConstDesc* find_const(std::string_view n) const;

    bool operator==(const BindingDesc&) const = default;
};

/// IIDs and CLSIDs for com mode, keyed by interface / class name.
struct Manifest {
    std::map<std::string, std::string> iids;
    std::map<std::string, std::string> clsids;
};

enum class BindingErrorKind { missing_iid, unsupported, unknown_type, schema_violation, bad_manifest };

const char* to_string(BindingErrorKind k);

class BindingError : public std::runtime_error {
public:
    BindingError(BindingErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    BindingErrorKind kind() const { return kind_; }

private:
    BindingErrorKind kind_;
};

Manifest parse_manifest(std::string_view json_text);

BindingDesc build_binding(const idl::IdlUnit& unit, Mode mode, Level level, const Manifest& manifest = {});

/// Word count of a value of type t laid out inline.
std::uint32_t word_size(const SemType& t, const BindingDesc& desc);

}  // namespace mlidl::binding
