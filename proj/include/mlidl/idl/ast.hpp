#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlidl/idl/error.hpp"

namespace mlidl::idl {

enum class BaseType { void_, int_, long_, boolean, char_, wchar, unsigned_long };

const char* to_string(BaseType base);

enum class Direction { in, out, inout };

const char* to_string(Direction dir);

struct ParamDecl;

/// Type expression. `inner` holds the pointee (ptr, array) or the return type
/// (func); `params` is only used by func.
struct IdlType {
    enum class Kind { base, named, ptr, array, func };

    Kind kind = Kind::base;
    BaseType base = BaseType::void_;
    std::string name;        // named: referenced name; array: length parameter
    bool is_const = false;
    bool is_string = false;  // ptr carrying the [string] attribute
    bool is_ref = false;     // ptr written as a C++ reference `&`
    std::vector<IdlType> inner;
    std::vector<ParamDecl> params;

    static IdlType of_base(BaseType b);
    static IdlType named_type(std::string n);
    static IdlType pointer_to(IdlType pointee);
    static IdlType array_of(IdlType elem, std::string length_param);
    static IdlType function(IdlType ret, std::vector<ParamDecl> params);

    const IdlType& pointee() const { return inner.front(); }
    bool is_void() const { return kind == Kind::base && base == BaseType::void_; }
    int pointer_depth() const;

    bool operator==(const IdlType& other) const;
};

struct ParamAttrs {
    bool ref = false;
    bool string = false;
    std::optional<std::string> size_is;
    std::optional<std::string> iid_is;

    bool operator==(const ParamAttrs&) const = default;
};

struct ParamDecl {
    std::string name;
    IdlType type;
    Direction dir = Direction::in;
    ParamAttrs attrs;
    SourceLoc loc;

    bool operator==(const ParamDecl&) const = default;
};

struct FieldDecl {
    std::string name;
    IdlType type;
    SourceLoc loc;

    bool operator==(const FieldDecl&) const = default;
};

struct Enumerator {
    std::string name;
    std::uint32_t value = 0;
    bool explicit_value = false;
    bool word_form = false;  // written as 0wx...

    bool operator==(const Enumerator&) const = default;
};

struct TypedefDecl {
    std::string name;
    IdlType type;
    SourceLoc loc;

    bool operator==(const TypedefDecl&) const = default;
};

struct RecordDecl {
    std::string name;
    std::string tag;  // optional struct tag
    std::vector<FieldDecl> fields;
    SourceLoc loc;

    bool operator==(const RecordDecl&) const = default;
};

struct EnumDecl {
    std::string name;
    std::string tag;
    std::vector<Enumerator> variants;
    SourceLoc loc;

    bool operator==(const EnumDecl&) const = default;
};

struct ConstDecl {
    using Literal = std::variant<std::string, std::int64_t, std::uint32_t>;  // text | int | word

    std::string name;
    IdlType type;
    Literal value;
    SourceLoc loc;

    bool operator==(const ConstDecl&) const = default;
};

using TypeDecl = std::variant<TypedefDecl, RecordDecl, EnumDecl, ConstDecl>;

struct OpDecl {
    std::string name;
    IdlType ret;
    std::vector<ParamDecl> params;
    SourceLoc loc;

    bool operator==(const OpDecl&) const = default;
};

struct InterfaceDecl {
    std::string name;
    std::optional<std::string> parent;
    std::optional<std::string> sml_source;
    std::vector<TypeDecl> members;  // types and consts scoped to the interface body
    std::vector<OpDecl> ops;
    SourceLoc loc;

    bool operator==(const InterfaceDecl&) const = default;
};

struct AnnotationDecl {
    std::string key;  // only "sml_name" today
    std::string value;
    SourceLoc loc;

    bool operator==(const AnnotationDecl&) const = default;
};

using Decl = std::variant<TypedefDecl, RecordDecl, EnumDecl, ConstDecl, InterfaceDecl, AnnotationDecl>;

struct IdlUnit {
    std::vector<Decl> decls;
    std::string source_name;

    std::optional<std::string> sml_name() const;
    const InterfaceDecl* find_interface(std::string_view name) const;

    bool operator==(const IdlUnit& other) const { return decls == other.decls; }
};

const std::string& decl_name(const Decl& d);
const std::string& decl_name(const TypeDecl& d);
SourceLoc decl_loc(const Decl& d);
SourceLoc decl_loc(const TypeDecl& d);

}  // namespace mlidl::idl
