#include <stdexcept>

#include "mlidl/marshal/value.hpp"

namespace mlidl::marshal {

const Value* RecordValue::find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return &values[i];
    return nullptr;
}

const Value& RecordValue::at(std::string_view name) const {
    if (const Value* v = find(name)) return *v;
    throw std::out_of_range("record has no field '" + std::string(name) + "'");
}

RecordValue& RecordValue::set(std::string name, Value v) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) {
            values[i] = std::move(v);
            return *this;
        }
    names.push_back(std::move(name));
    values.push_back(std::move(v));
    return *this;
}

bool RecordValue::operator==(const RecordValue& other) const {
    if (names.size() != other.names.size()) return false;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const Value* v = other.find(names[i]);
        if (!v || !(*v == values[i])) return false;
    }
    return true;
}

bool ListValue::operator==(const ListValue& other) const { return items == other.items; }

namespace {

struct Render {
    std::string operator()(std::monostate) const { return "()"; }
    std::string operator()(std::int32_t v) const { return std::to_string(v); }
    std::string operator()(std::uint32_t v) const { return wordmem::hex(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const EnumValue& e) const { return e.variant; }
    std::string operator()(const RecordValue& r) const {
        std::string out = "{";
        for (std::size_t i = 0; i < r.names.size(); ++i)
            out += (i ? "," : "") + r.names[i] + "=" + to_string(r.values[i]);
        return out + "}";
    }
    std::string operator()(const ListValue& l) const {
        std::string out = "[";
        for (std::size_t i = 0; i < l.items.size(); ++i) out += (i ? "," : "") + to_string(l.items[i]);
        return out + "]";
    }
    std::string operator()(const CallbackValue& c) const { return c.fn ? "<fn>" : "<null fn>"; }
    std::string operator()(wordmem::Addr a) const { return "@" + wordmem::hex(a.value); }
    std::string operator()(const com::Guid& g) const { return g.to_string(); }
};

}  // namespace

std::string to_string(const Value& v) { return std::visit(Render{}, v.data); }

}  // namespace mlidl::marshal
