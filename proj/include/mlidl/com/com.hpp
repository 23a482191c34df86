#pragma once

#include <cstdint>
#include <functional>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlidl/com/guid.hpp"
#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::com {

using wordmem::Addr;
using wordmem::Word;
using wordmem::WordFn;

inline constexpr Word S_OK = 0;
inline constexpr Word S_FALSE = 1;
inline constexpr Word E_NOTIMPL = 0x80004001;
inline constexpr Word E_NOINTERFACE = 0x80004002;
inline constexpr Word E_POINTER = 0x80004003;
inline constexpr Word E_FAIL = 0x80004005;
inline constexpr Word REGDB_E_CLASSNOTREG = 0x80040154;

inline bool failed(Word hr) { return (hr & 0x80000000u) != 0; }

struct Iid {
    Guid guid;
    std::string name;  // interface the id witnesses
};

struct Clsid {
    Guid guid;
    std::string name;
};

Iid iid_unknown();
Iid iid_dispatch();

enum class ComErrorKind { no_interface, class_not_registered, duplicate_class, out_of_range, dead_object, witness_mismatch, failed };

const char* to_string(ComErrorKind k);

class ComError : public std::runtime_error {
public:
    ComError(ComErrorKind kind, const std::string& message, Word hresult = E_FAIL)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), hresult_(hresult) {}

    ComErrorKind kind() const { return kind_; }
    Word hresult() const { return hresult_; }

private:
    ComErrorKind kind_;
    Word hresult_;
};

using ObjectId = std::uint32_t;

/// `addr` is a one-word block holding the vtable address.
struct InterfaceRef {
    Addr addr;
    Iid iid;
    ObjectId owner = 0;
};

/// Objects, their vtables and reference counts over one world. Closures it
/// registers refer back to it, so it must outlive every call through them.
class Runtime {
public:
    explicit Runtime(wordmem::World& world) : world_(world) {}
    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    wordmem::World& world() const { return world_; }

    /// New object with count 0; interfaces are added with make_interface and
    /// the first reference is taken by activate.
    ObjectId create_object(const Clsid& clsid);

    /// Vtable = [QueryInterface, AddRef, Release] ++ methods. The interface
    /// answers QueryInterface for `iid` and for every id in `also`. The first
    /// interface made is the object's identity.
    InterfaceRef make_interface(ObjectId obj, const Iid& iid, std::vector<WordFn> methods, std::vector<Iid> also = {});

    /// Frees `a` together with the object's own blocks.
    void adopt_block(ObjectId obj, Addr a);
    void on_destroy(ObjectId obj, std::function<void()> f);

    /// First reference to a freshly built object for `iid`; an unsupported
    /// iid destroys the object and raises no_interface.
    InterfaceRef activate(ObjectId obj, const Iid& iid);

    WordFn get_method(const InterfaceRef& i, std::size_t index) const;
    std::size_t slot_count(const InterfaceRef& i) const;

    /// Both go through vtable slots 0..2 via memory.
    InterfaceRef query_interface(const InterfaceRef& i, const Iid& iid);
    std::uint32_t add_ref(const InterfaceRef& i);
    std::uint32_t release(const InterfaceRef& i);

    bool is_alive(ObjectId obj) const;
    std::uint32_t ref_count(ObjectId obj) const;
    std::size_t block_count(ObjectId obj) const;
    InterfaceRef identity(ObjectId obj) const;
    std::size_t object_count() const { return objects_.size(); }

private:
    struct Object {
        Clsid clsid;
        std::uint32_t refs = 0;
        bool live = true;
        Word identity = 0;
        std::map<Guid, Word> by_iid;
        std::map<Word, std::size_t> vtable_size;  // interface addr -> slots
        std::vector<Addr> blocks;
        std::vector<std::function<void()>> destroy_hooks;
        Addr qi, addref, release;
    };

    Object& object(ObjectId id);
    const Object& object(ObjectId id) const;
    Object& live_object(ObjectId id);
    void destroy(Object& o);

    wordmem::World& world_;
    std::deque<Object> objects_;
};

/// Builds an object and returns its first interface for the requested iid.
struct ClassFactory {
    Clsid clsid;
    std::function<InterfaceRef(Runtime&, const Iid&)> create;
};

/// At most one factory per class id.
class Registry {
public:
    void register_class_object(const ClassFactory& f);
    void revoke(const Guid& clsid);
    const ClassFactory& get_class_object(const Guid& clsid) const;
    bool contains(const Guid& clsid) const { return factories_.count(clsid) != 0; }

    /// One `{CLSID} name` line per class, sorted by id.
    std::string dump() const;
    /// Re-registers the classes named in a dump from `catalog` (by name).
    void load(const std::string& text, const std::map<std::string, ClassFactory>& catalog);

private:
    std::map<Guid, ClassFactory> factories_;
};

InterfaceRef create_instance(Runtime& rt, const Registry& reg, const Guid& clsid, const Iid& iid);

/// Compile-time pairing of ids with the interfaces they witness.
template <typename Tag>
struct TypedIid {
    Iid iid;
};

template <typename Tag>
struct TypedInterface {
    InterfaceRef ref;
};

template <typename Tag>
TypedInterface<Tag> query(Runtime& rt, const InterfaceRef& i, const TypedIid<Tag>& iid) {
    return {rt.query_interface(i, iid.iid)};
}

template <typename Tag>
TypedInterface<Tag> create_instance(Runtime& rt, const Registry& reg, const Guid& clsid, const TypedIid<Tag>& iid) {
    return {create_instance(rt, reg, clsid, iid.iid)};
}

}  // namespace mlidl::com
