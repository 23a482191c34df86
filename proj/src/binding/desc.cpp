#include <array>

#include "mlidl/binding/binding.hpp"

namespace mlidl::binding {

namespace {

constexpr std::array<std::pair<SemType::Kind, const char*>, 13> kKinds{{
    {SemType::Kind::unit, "unit"},
    {SemType::Kind::int32, "int32"},
    {SemType::Kind::word32, "word32"},
    {SemType::Kind::bool_, "bool"},
    {SemType::Kind::string8, "string8"},
    {SemType::Kind::string16, "string16"},
    {SemType::Kind::handle, "handle"},
    {SemType::Kind::enum_, "enum"},
    {SemType::Kind::record, "record"},
    {SemType::Kind::array, "array"},
    {SemType::Kind::callback, "callback"},
    {SemType::Kind::opaque_addr, "opaque_addr"},
    {SemType::Kind::guid, "guid"},
}};

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
    for (const auto& i : items)
        if (i.name == name) return &i;
    return nullptr;
}

}  // namespace

const char* to_string(SemType::Kind k) {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "?";
}

std::optional<SemType::Kind> kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKinds)
        if (s == name) return kind;
    return std::nullopt;
}

const char* to_string(Mode m) {
    switch (m) {
    case Mode::static_: return "static";
    case Mode::dynamic: return "dynamic";
    case Mode::com: return "com";
    }
    return "?";
}

const char* to_string(Level l) { return l == Level::abstract ? "abstract" : "auto"; }

std::optional<Mode> mode_from_string(std::string_view s) {
    if (s == "static") return Mode::static_;
    if (s == "dynamic") return Mode::dynamic;
    if (s == "com") return Mode::com;
    return std::nullopt;
}

std::optional<Level> level_from_string(std::string_view s) {
    if (s == "abstract") return Level::abstract;
    if (s == "auto") return Level::auto_;
    return std::nullopt;
}

const char* to_string(BindingErrorKind k) {
    switch (k) {
    case BindingErrorKind::missing_iid: return "missing-iid";
    case BindingErrorKind::unsupported: return "unsupported";
    case BindingErrorKind::unknown_type: return "unknown-type";
    case BindingErrorKind::schema_violation: return "schema-violation";
    case BindingErrorKind::bad_manifest: return "bad-manifest";
    }
    return "binding-error";
}

std::vector<const AbiParam*> LiftedSig::in_params() const {
    std::vector<const AbiParam*> out;
    for (const auto& p : params)
        if (p.dir != Direction::out) out.push_back(&p);
    return out;
}

std::vector<SemType> LiftedSig::results() const {
    std::vector<SemType> out;
    for (const auto& p : params)
        if (p.dir != Direction::in) out.push_back(p.type);
    if (!ret.is_unit()) out.push_back(ret);
    return out;
}

std::uint32_t EnumMap::to_int(const std::string& variant) const {
    for (const auto& [n, v] : variants)
        if (n == variant) return v;
    throw BindingError(BindingErrorKind::unknown_type, "enum " + name + " has no variant '" + variant + "'");
}

std::optional<std::string> EnumMap::from_int(std::uint32_t value) const {
    for (const auto& [n, v] : variants)
        if (v == value) return n;
    return std::nullopt;
}

const FieldLayout* RecordLayout::field(std::string_view n) const { return find_named(fields, n); }

const LiftedSig* InterfaceDesc::method(std::string_view n) const { return find_named(methods, n); }

const InterfaceDesc* BindingDesc::find_interface(std::string_view n) const { return find_named(interfaces, n); }
const EnumMap* BindingDesc::find_enum(std::string_view n) const { return find_named(enums, n); }
const RecordLayout* BindingDesc::find_record(std::string_view n) const { return find_named(records, n); }
const CallbackDesc* BindingDesc::find_callback(std::string_view n) const { return find_named(callbacks, n); }
const ConstDesc* BindingDesc::find_const(std::string_view n) const { return find_named(consts, n); }

}  // namespace mlidl::binding
