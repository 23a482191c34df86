#include <algorithm>
#include <sstream>

#include "mlidl/com/com.hpp"

namespace mlidl::com {

using wordmem::MemError;
using wordmem::MemErrorKind;
using wordmem::World;

const char* to_string(ComErrorKind k) {
    switch (k) {
    case ComErrorKind::no_interface: return "no-interface";
    case ComErrorKind::class_not_registered: return "class-not-registered";
    case ComErrorKind::duplicate_class: return "duplicate-class";
    case ComErrorKind::out_of_range: return "out-of-range";
    case ComErrorKind::dead_object: return "dead-object";
    case ComErrorKind::witness_mismatch: return "witness-mismatch";
    case ComErrorKind::failed: return "failed";
    }
    return "com-error";
}

Iid iid_unknown() { return {*Guid::parse("{00000000-0000-0000-C000-000000000046}"), "IUnknown"}; }
Iid iid_dispatch() { return {*Guid::parse("{00020400-0000-0000-C000-000000000046}"), "IDispatch"}; }

Runtime::Object& Runtime::object(ObjectId id) {
    if (id == 0 || id > objects_.size()) throw ComError(ComErrorKind::dead_object, "no object " + std::to_string(id));
    return objects_[id - 1];
}

const Runtime::Object& Runtime::object(ObjectId id) const {
    if (id == 0 || id > objects_.size()) throw ComError(ComErrorKind::dead_object, "no object " + std::to_string(id));
    return objects_[id - 1];
}

Runtime::Object& Runtime::live_object(ObjectId id) {
    Object& o = object(id);
    if (!o.live) throw ComError(ComErrorKind::dead_object, "object " + std::to_string(id) + " was destroyed");
    return o;
}

ObjectId Runtime::create_object(const Clsid& clsid) {
    objects_.emplace_back();
    auto id = static_cast<ObjectId>(objects_.size());
    Object& o = objects_.back();
    o.clsid = clsid;

    // One QueryInterface/AddRef/Release triple per object, shared by all its vtables.
    o.qi = world_.fun_to_addr([this, id](const std::vector<Word>& a) -> Word {
        if (a.size() != 3) throw MemError(MemErrorKind::arity_mismatch, "QueryInterface takes 3 words");
        world_.read1(Addr{a[0]});
        Object& self = object(id);
        if (a[2] == 0) return E_POINTER;
        auto w = world_.read(Addr{a[1]}, 4);
        Guid g = Guid::from_words({w[0], w[1], w[2], w[3]});
        Word found = 0;
        if (g == iid_unknown().guid) found = self.identity;
        else if (auto it = self.by_iid.find(g); it != self.by_iid.end()) found = it->second;
        world_.store(Addr{a[2]}, {found});
        if (!found) return E_NOINTERFACE;
        ++self.refs;
        return S_OK;
    });
    o.addref = world_.fun_to_addr([this, id](const std::vector<Word>& a) -> Word {
        if (a.size() != 1) throw MemError(MemErrorKind::arity_mismatch, "AddRef takes 1 word");
        world_.read1(Addr{a[0]});
        return ++object(id).refs;
    });
    o.release = world_.fun_to_addr([this, id](const std::vector<Word>& a) -> Word {
        if (a.size() != 1) throw MemError(MemErrorKind::arity_mismatch, "Release takes 1 word");
        world_.read1(Addr{a[0]});
        Object& self = object(id);
        if (self.refs == 0) throw ComError(ComErrorKind::dead_object, "release of an unreferenced object");
        Word left = --self.refs;
        if (left == 0) destroy(self);
        return left;
    });
    return id;
}

InterfaceRef Runtime::make_interface(ObjectId obj, const Iid& iid, std::vector<WordFn> methods, std::vector<Iid> also) {
    Object& o = live_object(obj);
    std::vector<Word> slots{o.qi.value, o.addref.value, o.release.value};
    for (auto& m : methods) slots.push_back(world_.fun_to_addr(std::move(m)).value);
    Addr vtable = world_.alloc(static_cast<std::int64_t>(slots.size()));
    world_.store(vtable, slots);
    Addr itf = world_.alloc(1);
    world_.store(itf, {vtable.value});
    o.blocks.push_back(vtable);
    o.blocks.push_back(itf);
    o.vtable_size[itf.value] = slots.size();
    if (!o.identity) o.identity = itf.value;
    o.by_iid.emplace(iid.guid, itf.value);
    for (const auto& extra : also) o.by_iid.emplace(extra.guid, itf.value);
    return {itf, iid, obj};
}

void Runtime::adopt_block(ObjectId obj, Addr a) { live_object(obj).blocks.push_back(a); }

void Runtime::on_destroy(ObjectId obj, std::function<void()> f) { live_object(obj).destroy_hooks.push_back(std::move(f)); }

void Runtime::destroy(Object& o) {
    o.live = false;
    for (Addr b : o.blocks) world_.free(b);
    o.blocks.clear();
    auto hooks = std::move(o.destroy_hooks);
    for (auto& h : hooks) h();
}

InterfaceRef Runtime::activate(ObjectId obj, const Iid& iid) {
    Object& o = live_object(obj);
    Word found = iid.guid == iid_unknown().guid ? o.identity : 0;
    if (auto it = o.by_iid.find(iid.guid); !found && it != o.by_iid.end()) found = it->second;
    if (!found) {
        if (o.refs == 0) destroy(o);
        throw ComError(ComErrorKind::no_interface, "object does not implement " + iid.name, E_NOINTERFACE);
    }
    ++o.refs;
    return {Addr{found}, iid, obj};
}

std::size_t Runtime::slot_count(const InterfaceRef& i) const {
    const Object& o = object(i.owner);
    if (!o.live) throw ComError(ComErrorKind::dead_object, "interface " + wordmem::hex(i.addr.value) + " of a destroyed object");
    auto it = o.vtable_size.find(i.addr.value);
    if (it == o.vtable_size.end())
        throw ComError(ComErrorKind::witness_mismatch, wordmem::hex(i.addr.value) + " is not an interface of its owner");
    return it->second;
}

WordFn Runtime::get_method(const InterfaceRef& i, std::size_t index) const {
    std::size_t n = slot_count(i);
    if (index >= n)
        throw ComError(ComErrorKind::out_of_range, "slot " + std::to_string(index) + " of a " + std::to_string(n) + "-slot vtable");
    Addr vtable{world_.read1(i.addr)};
    return world_.addr_to_fun(Addr{world_.read1(World::offset(vtable, static_cast<std::int64_t>(index)))});
}

InterfaceRef Runtime::query_interface(const InterfaceRef& i, const Iid& iid) {
    Addr id = world_.alloc(4);
    Addr out = world_.alloc(1);
    auto ws = iid.guid.to_words();
    world_.store(id, {ws.begin(), ws.end()});
    Word hr = 0;
    Word got = 0;
    try {
        hr = get_method(i, 0)({i.addr.value, id.value, out.value});
        got = world_.read1(out);
    } catch (...) {
        world_.free(id);
        world_.free(out);
        throw;
    }
    world_.free(id);
    world_.free(out);
    if (failed(hr)) throw ComError(ComErrorKind::no_interface, "QueryInterface for " + iid.name + " failed", hr);
    return {Addr{got}, iid, i.owner};
}

std::uint32_t Runtime::add_ref(const InterfaceRef& i) {
    Addr vtable{world_.read1(i.addr)};
    return world_.call(Addr{world_.read1(World::offset(vtable, 1))}, {i.addr.value});
}

std::uint32_t Runtime::release(const InterfaceRef& i) {
    Addr vtable{world_.read1(i.addr)};
    return world_.call(Addr{world_.read1(World::offset(vtable, 2))}, {i.addr.value});
}

bool Runtime::is_alive(ObjectId obj) const { return obj >= 1 && obj <= objects_.size() && objects_[obj - 1].live; }

std::uint32_t Runtime::ref_count(ObjectId obj) const { return object(obj).refs; }

std::size_t Runtime::block_count(ObjectId obj) const { return object(obj).blocks.size(); }

InterfaceRef Runtime::identity(ObjectId obj) const {
    const Object& o = object(obj);
    return {Addr{o.identity}, iid_unknown(), obj};
}

// ---- registry ------------------------------------------------------------------

void Registry::register_class_object(const ClassFactory& f) {
    if (!factories_.emplace(f.clsid.guid, f).second)
        throw ComError(ComErrorKind::duplicate_class, f.clsid.guid.to_string() + " already registered");
}

void Registry::revoke(const Guid& clsid) {
    if (!factories_.erase(clsid))
        throw ComError(ComErrorKind::class_not_registered, clsid.to_string(), REGDB_E_CLASSNOTREG);
}

const ClassFactory& Registry::get_class_object(const Guid& clsid) const {
    auto it = factories_.find(clsid);
    if (it == factories_.end())
        throw ComError(ComErrorKind::class_not_registered, clsid.to_string() + " is not registered", REGDB_E_CLASSNOTREG);
    return it->second;
}

std::string Registry::dump() const {
    std::string out;
    for (const auto& [id, f] : factories_) out += id.to_string() + " " + f.clsid.name + "\n";
    return out;
}

void Registry::load(const std::string& text, const std::map<std::string, ClassFactory>& catalog) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto sp = line.find(' ');
        auto id = Guid::parse(line.substr(0, sp));
        if (!id || sp == std::string::npos) throw ComError(ComErrorKind::failed, "bad registry line '" + line + "'");
        auto it = catalog.find(line.substr(sp + 1));
        if (it == catalog.end() || it->second.clsid.guid != *id)
            throw ComError(ComErrorKind::class_not_registered, "no factory for '" + line + "'", REGDB_E_CLASSNOTREG);
        register_class_object(it->second);
    }
}

InterfaceRef create_instance(Runtime& rt, const Registry& reg, const Guid& clsid, const Iid& iid) {
    return reg.get_class_object(clsid).create(rt, iid);
}

}  // namespace mlidl::com
