#include "mlidl/idl/ast.hpp"

#include <sstream>

namespace mlidl::idl {

const char* to_string(IdlErrorKind kind) {
    switch (kind) {
    case IdlErrorKind::lex: return "lex-error";
    case IdlErrorKind::parse: return "parse-error";
    case IdlErrorKind::duplicate_name: return "duplicate-name";
    case IdlErrorKind::unresolved_type: return "unresolved-type";
    case IdlErrorKind::bad_attr_target: return "bad-attr-target";
    case IdlErrorKind::inheritance_cycle: return "inheritance-cycle";
    }
    return "error";
}

namespace {

std::string render(const SourceLoc& loc, const std::string& message) {
    std::ostringstream out;
    out << loc.file << ':' << loc.line << ':' << loc.col << ": " << message;
    return out.str();
}

}  // namespace

IdlError::IdlError(IdlErrorKind kind, SourceLoc loc, const std::string& message)
    : std::runtime_error(render(loc, message)), kind_(kind), loc_(std::move(loc)), message_(message) {}

const char* to_string(BaseType base) {
    switch (base) {
    case BaseType::void_: return "void";
    case BaseType::int_: return "int";
    case BaseType::long_: return "long";
    case BaseType::boolean: return "boolean";
    case BaseType::char_: return "char";
    case BaseType::wchar: return "wchar_t";
    case BaseType::unsigned_long: return "unsigned long";
    }
    return "?";
}

const char* to_string(Direction dir) {
    switch (dir) {
    case Direction::in: return "in";
    case Direction::out: return "out";
    case Direction::inout: return "inout";
    }
    return "?";
}

IdlType IdlType::of_base(BaseType b) {
    IdlType t;
    t.kind = Kind::base;
    t.base = b;
    return t;
}

IdlType IdlType::named_type(std::string n) {
    IdlType t;
    t.kind = Kind::named;
    t.name = std::move(n);
    return t;
}

IdlType IdlType::pointer_to(IdlType pointee) {
    IdlType t;
    t.kind = Kind::ptr;
    t.inner.push_back(std::move(pointee));
    return t;
}

IdlType IdlType::array_of(IdlType elem, std::string length_param) {
    IdlType t;
    t.kind = Kind::array;
    t.name = std::move(length_param);
    t.inner.push_back(std::move(elem));
    return t;
}

IdlType IdlType::function(IdlType ret, std::vector<ParamDecl> params) {
    IdlType t;
    t.kind = Kind::func;
    t.inner.push_back(std::move(ret));
    t.params = std::move(params);
    return t;
}

int IdlType::pointer_depth() const {
    int depth = 0;
    const IdlType* t = this;
    while (t->kind == Kind::ptr) {
        ++depth;
        t = &t->pointee();
    }
    return depth;
}

bool IdlType::operator==(const IdlType& other) const {
    return kind == other.kind && base == other.base && name == other.name && is_const == other.is_const &&
           is_string == other.is_string && is_ref == other.is_ref && inner == other.inner &&
           params == other.params;
}

std::optional<std::string> IdlUnit::sml_name() const {
    for (const auto& d : decls) {
        if (const auto* a = std::get_if<AnnotationDecl>(&d); a && a->key == "sml_name") return a->value;
    }
    return std::nullopt;
}

const InterfaceDecl* IdlUnit::find_interface(std::string_view name) const {
    for (const auto& d : decls) {
        if (const auto* i = std::get_if<InterfaceDecl>(&d); i && i->name == name) return i;
    }
    return nullptr;
}

const std::string& decl_name(const Decl& d) {
    return std::visit([](const auto& x) -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, AnnotationDecl>)
            return x.key;
        else
            return x.name;
    }, d);
}

const std::string& decl_name(const TypeDecl& d) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

SourceLoc decl_loc(const Decl& d) {
    return std::visit([](const auto& x) { return x.loc; }, d);
}

SourceLoc decl_loc(const TypeDecl& d) {
    return std::visit([](const auto& x) { return x.loc; }, d);
}

}  // namespace mlidl::idl
