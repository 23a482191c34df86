#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mlidl/com/guid.hpp"
#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::marshal {

struct Value;

struct EnumValue {
    std::string variant;
    bool operator==(const EnumValue&) const = default;
};

/// Field map in declaration order; equality ignores order.
struct RecordValue {
    std::vector<std::string> names;
    std::vector<Value> values;

    const Value* find(std::string_view name) const;
    const Value& at(std::string_view name) const;
    RecordValue& set(std::string name, Value v);

    bool operator==(const RecordValue& other) const;
};

struct ListValue {
    std::vector<Value> items;
    bool operator==(const ListValue& other) const;
};

using HighFn = std::function<Value(const std::vector<Value>&)>;

/// High-level callback; identity is the shared pointer.
struct CallbackValue {
    std::shared_ptr<const HighFn> fn;
    bool operator==(const CallbackValue& other) const { return fn == other.fn; }
};

struct Value {
    using Data = std::variant<std::monostate, std::int32_t, std::uint32_t, bool, std::string, EnumValue, RecordValue,
                              ListValue, CallbackValue, wordmem::Addr, com::Guid>;
    Data data;

    Value() = default;
    Value(Data d) : data(std::move(d)) {}

    static Value unit() { return {}; }
    static Value i32(std::int32_t v) { return Data{v}; }
    static Value word(std::uint32_t v) { return Data{v}; }
    static Value boolean(bool v) { return Data{v}; }
    static Value text(std::string s) { return Data{std::move(s)}; }
    static Value enum_of(std::string variant) { return Data{EnumValue{std::move(variant)}}; }
    static Value record(RecordValue r) { return Data{std::move(r)}; }
    static Value list(std::vector<Value> items) { return Data{ListValue{std::move(items)}}; }
    static Value callback(HighFn f) { return Data{CallbackValue{std::make_shared<const HighFn>(std::move(f))}}; }
    static Value addr(wordmem::Addr a) { return Data{a}; }
    static Value guid(const com::Guid& g) { return Data{g}; }

    template <typename T>
    bool is() const { return std::holds_alternative<T>(data); }
    template <typename T>
    const T& as() const { return std::get<T>(data); }

    std::int32_t as_i32() const { return as<std::int32_t>(); }
    std::uint32_t as_word() const { return as<std::uint32_t>(); }
    bool as_bool() const { return as<bool>(); }
    const std::string& as_text() const { return as<std::string>(); }
    const RecordValue& as_record() const { return as<RecordValue>(); }
    const std::vector<Value>& as_list() const { return as<ListValue>().items; }
    wordmem::Addr as_addr() const { return as<wordmem::Addr>(); }

    bool operator==(const Value& other) const { return data == other.data; }
};

/// Short human-readable rendering for diagnostics and traces.
std::string to_string(const Value& v);

}  // namespace mlidl::marshal
