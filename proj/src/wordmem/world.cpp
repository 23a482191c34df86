#include <algorithm>
#include <cstdio>

#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::wordmem {

const char* to_string(MemErrorKind k) {
    switch (k) {
    case MemErrorKind::bad_size: return "bad-size";
    case MemErrorKind::double_free: return "double-free";
    case MemErrorKind::bad_region: return "bad-region";
    case MemErrorKind::out_of_bounds: return "out-of-bounds";
    case MemErrorKind::use_after_free: return "use-after-free";
    case MemErrorKind::not_callable: return "not-callable";
    case MemErrorKind::unknown_library: return "unknown-library";
    case MemErrorKind::unknown_symbol: return "unknown-symbol";
    case MemErrorKind::arity_mismatch: return "arity-mismatch";
    case MemErrorKind::out_of_memory: return "out-of-memory";
    }
    return "mem-error";
}

std::string hex(Word w) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", w);
    return buf;
}

std::string words_text(const std::vector<Word>& ws) {
    std::string out = "[";
    for (std::size_t i = 0; i < ws.size(); ++i) out += (i ? "," : "") + hex(ws[i]);
    return out + "]";
}

Region region_of(Addr a) {
    if (a.is_null()) return Region::null;
    if (a.value >= kHeapBase && a.value < kClosureBase) return Region::heap;
    if (a.value >= kClosureBase && a.value < kClosureLimit) return Region::closure;
    return Region::unmapped;
}

void World::trace(const std::string& line) const {
    if (trace_) *trace_ << line << '\n';
}

Addr World::alloc(std::int64_t words) {
    if (words <= 0) throw MemError(MemErrorKind::bad_size, "alloc of " + std::to_string(words) + " words");
    // One unused guard word between blocks keeps off-by-one accesses detectable.
    std::uint64_t end = next_heap_ + 4ull * static_cast<std::uint64_t>(words);
    if (end + 4 > kClosureBase) throw MemError(MemErrorKind::out_of_memory, "heap exhausted");
    Word start = next_heap_;
    Block b;
    b.size = static_cast<std::uint32_t>(words);
    b.cells.assign(b.size, 0);
    blocks_.emplace(start, std::move(b));
    next_heap_ = static_cast<Word>(end + 4);
    ++live_;
    trace("ALLOC - " + std::to_string(words) + " -> " + hex(start));
    return Addr{start};
}

void World::free(Addr a) {
    if (region_of(a) != Region::heap) throw MemError(MemErrorKind::bad_region, "free of non-heap address " + hex(a.value));
    auto it = blocks_.find(a.value);
    if (it == blocks_.end()) throw MemError(MemErrorKind::bad_region, "free of " + hex(a.value) + " which is not a block start");
    if (!it->second.live) throw MemError(MemErrorKind::double_free, "block " + hex(a.value) + " already freed");
    it->second.live = false;
    it->second.cells.clear();
    it->second.cells.shrink_to_fit();
    --live_;
    trace("FREE " + hex(a.value) + " -> ok");
}

Addr World::offset(Addr a, std::int64_t words) {
    return Addr{static_cast<Word>(a.value + static_cast<Word>(words) * 4u)};
}

const World::Block& World::locate(Addr a, std::int64_t n, const char* op, Word* index) const {
    Region r = region_of(a);
    if (r == Region::null || r == Region::closure)
        throw MemError(MemErrorKind::bad_region, std::string(op) + " at " + (r == Region::null ? "null" : "closure") +
                                                     " address " + hex(a.value));
    if (n < 0) throw MemError(MemErrorKind::bad_size, std::string(op) + " of " + std::to_string(n) + " words");
    if (r != Region::heap || a.value % 4 != 0)
        throw MemError(MemErrorKind::out_of_bounds, std::string(op) + " at unmapped address " + hex(a.value));
    auto it = blocks_.upper_bound(a.value);
    if (it == blocks_.begin()) throw MemError(MemErrorKind::out_of_bounds, std::string(op) + " at " + hex(a.value));
    --it;
    const Block& b = it->second;
    std::uint64_t first = (a.value - it->first) / 4;
    if (first >= b.size) throw MemError(MemErrorKind::out_of_bounds, std::string(op) + " at " + hex(a.value));
    if (!b.live)
        throw MemError(MemErrorKind::use_after_free, std::string(op) + " at " + hex(a.value) + " in freed block " + hex(it->first));
    if (first + static_cast<std::uint64_t>(n) > b.size)
        throw MemError(MemErrorKind::out_of_bounds, std::string(op) + " of " + std::to_string(n) + " words at " +
                                                        hex(a.value) + " runs past block " + hex(it->first));
    *index = static_cast<Word>(first);
    return b;
}

void World::store(Addr a, const std::vector<Word>& ws) {
    Word index = 0;
    Block& b = const_cast<Block&>(locate(a, static_cast<std::int64_t>(ws.size()), "store", &index));
    std::copy(ws.begin(), ws.end(), b.cells.begin() + index);
    trace("STORE " + hex(a.value) + " " + words_text(ws) + " -> ok");
}

std::vector<Word> World::read(Addr a, std::int64_t n) const {
    Word index = 0;
    const Block& b = locate(a, n, "read", &index);
    std::vector<Word> out(b.cells.begin() + index, b.cells.begin() + index + n);
    trace("READ " + hex(a.value) + " " + std::to_string(n) + " -> " + words_text(out));
    return out;
}

std::size_t World::live_words() const {
    std::size_t n = 0;
    for (const auto& [start, b] : blocks_)
        if (b.live) n += b.size;
    return n;
}

bool World::is_live(Addr a) const {
    auto it = blocks_.find(a.value);
    return it != blocks_.end() && it->second.live;
}

Addr World::fun_to_addr(const CallableRef& f) {
    if (auto it = closure_ids_.find(f.get()); it != closure_ids_.end()) return Addr{it->second};
    if (next_closure_ >= kClosureLimit) throw MemError(MemErrorKind::out_of_memory, "closure table exhausted");
    Word a = next_closure_;
    next_closure_ += 4;
    closures_.emplace(a, Closure{f});
    closure_ids_.emplace(f.get(), a);
    trace("FUN - - -> " + hex(a));
    return Addr{a};
}

const World::Closure& World::closure(Addr a) const {
    auto it = closures_.find(a.value);
    if (region_of(a) != Region::closure || it == closures_.end())
        throw MemError(MemErrorKind::not_callable, "address " + hex(a.value) + " is not a function");
    return it->second;
}

WordFn World::addr_to_fun(Addr a) const {
    closure(a);
    return [this, a](const std::vector<Word>& args) { return call(a, args); };
}

Word World::call(Addr a, const std::vector<Word>& args) const {
    const Closure& c = closure(a);
    if (c.checked) {
        bool ok = c.convention == Convention::pascal ? args.size() == c.arity : args.size() >= c.arity;
        if (!ok)
            throw MemError(MemErrorKind::arity_mismatch, "function " + hex(a.value) + " expects " +
                                                             std::to_string(c.arity) + " words, got " +
                                                             std::to_string(args.size()));
    }
    CallableRef keep = c.fn;
    Word r = (*keep)(args);
    trace("CALL " + hex(a.value) + " " + words_text(args) + " -> " + hex(r));
    return r;
}

const Library& World::register_library(const std::string& name, std::vector<Export> exports) {
    Library lib;
    lib.name = name;
    for (auto& e : exports) {
        Addr a = fun_to_addr(std::move(e.fn));
        Closure& c = closures_.at(a.value);
        c.checked = true;
        c.convention = e.convention;
        c.arity = e.arity;
        lib.symbols[e.name] = Symbol{a, e.convention, e.arity};
    }
    return libraries_.insert_or_assign(name, std::move(lib)).first->second;
}

const Library& World::open_library(std::string_view name) const {
    auto it = libraries_.find(name);
    if (it == libraries_.end()) throw MemError(MemErrorKind::unknown_library, "no library named '" + std::string(name) + "'");
    return it->second;
}

Addr World::get_function(const Library& lib, std::string_view symbol) const {
    auto it = lib.symbols.find(symbol);
    if (it == lib.symbols.end())
        throw MemError(MemErrorKind::unknown_symbol, lib.name + " exports no '" + std::string(symbol) + "'");
    return it->second.addr;
}

}  // namespace mlidl::wordmem
