#include <algorithm>

#include "mlidl/marshal/marshal.hpp"

namespace mlidl::marshal {

using K = SemType::Kind;
using idl::Direction;
using wordmem::World;

const char* to_string(MarshalErrorKind k) {
    switch (k) {
    case MarshalErrorKind::type_mismatch: return "type-mismatch";
    case MarshalErrorKind::bad_string: return "bad-string";
    case MarshalErrorKind::arity_mismatch: return "arity-mismatch";
    case MarshalErrorKind::decode_error: return "decode-error";
    case MarshalErrorKind::unknown_type: return "unknown-type";
    case MarshalErrorKind::failed_hresult: return "failed-hresult";
    }
    return "marshal-error";
}

const char* to_string(Action a) {
    switch (a) {
    case Action::pass_word: return "pass-word";
    case Action::pass_addr_of_packed: return "pass-addr-of-packed";
    case Action::alloc_out: return "alloc-out";
    case Action::pack_string: return "pack-string";
    case Action::pack_array: return "pack-array";
    case Action::pack_callback: return "pack-callback";
    }
    return "?";
}

TempBlocks::~TempBlocks() {
    for (Addr a : blocks_)
        if (world_.is_live(a)) world_.free(a);
}

Addr TempBlocks::alloc(std::int64_t words) {
    Addr a = world_.alloc(words);
    blocks_.push_back(a);
    return a;
}

void TempBlocks::release(Addr a) { blocks_.erase(std::remove(blocks_.begin(), blocks_.end(), a), blocks_.end()); }

namespace {

[[noreturn]] void mismatch(const std::string& where, const SemType& t, const Value& v) {
    throw MarshalError(MarshalErrorKind::type_mismatch,
                       where + ": expected " + binding::to_string(t.kind) + (t.ref.empty() ? "" : " " + t.ref) +
                           ", got " + to_string(v));
}

bool is_out(Direction d) { return d == Direction::out; }
bool is_in(Direction d) { return d != Direction::out; }
bool returns_addr(Direction d) { return d != Direction::in; }

// ---- UTF-8 <-> UTF-16 ----------------------------------------------------

std::u16string utf8_to_utf16(const std::string& s) {
    std::u16string out;
    for (std::size_t i = 0; i < s.size();) {
        auto c = static_cast<unsigned char>(s[i]);
        std::uint32_t cp;
        std::size_t n;
        if (c < 0x80) { cp = c; n = 1; }
        else if ((c & 0xE0) == 0xC0) { cp = c & 0x1F; n = 2; }
        else if ((c & 0xF0) == 0xE0) { cp = c & 0x0F; n = 3; }
        else if ((c & 0xF8) == 0xF0) { cp = c & 0x07; n = 4; }
        else throw MarshalError(MarshalErrorKind::bad_string, "invalid UTF-8 lead byte");
        if (i + n > s.size()) throw MarshalError(MarshalErrorKind::bad_string, "truncated UTF-8 sequence");
        for (std::size_t k = 1; k < n; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) throw MarshalError(MarshalErrorKind::bad_string, "invalid UTF-8 continuation");
            cp = cp << 6 | (cc & 0x3F);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw MarshalError(MarshalErrorKind::bad_string, "invalid code point");
        if (cp >= 0x10000) {
            cp -= 0x10000;
            out.push_back(static_cast<char16_t>(0xD800 + (cp >> 10)));
            out.push_back(static_cast<char16_t>(0xDC00 + (cp & 0x3FF)));
        } else {
            out.push_back(static_cast<char16_t>(cp));
        }
        i += n;
    }
    return out;
}

void put_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | cp >> 6);
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | cp >> 12);
        out += static_cast<char>(0x80 | (cp >> 6 & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | cp >> 18);
        out += static_cast<char>(0x80 | (cp >> 12 & 0x3F));
        out += static_cast<char>(0x80 | (cp >> 6 & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string utf16_to_utf8(const std::u16string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::uint32_t u = s[i];
        if (u >= 0xD800 && u <= 0xDBFF && i + 1 < s.size() && s[i + 1] >= 0xDC00 && s[i + 1] <= 0xDFFF) {
            u = 0x10000 + ((u - 0xD800) << 10) + (s[i + 1] - 0xDC00);
            ++i;
        } else if (u >= 0xD800 && u <= 0xDFFF) {
            throw MarshalError(MarshalErrorKind::decode_error, "unpaired UTF-16 surrogate");
        }
        put_utf8(out, u);
    }
    return out;
}

std::size_t count_value(const Value& v, const std::string& name) {
    if (v.is<std::int32_t>() && v.as_i32() >= 0) return static_cast<std::size_t>(v.as_i32());
    if (v.is<std::uint32_t>()) return v.as_word();
    throw MarshalError(MarshalErrorKind::type_mismatch, "length parameter '" + name + "' is not a count: " + to_string(v));
}

}  // namespace

std::size_t array_count(const LiftedSig& sig, const std::string& len_from, const std::vector<Value>& ins) {
    auto in = sig.in_params();
    for (std::size_t i = 0; i < in.size() && i < ins.size(); ++i)
        if (in[i]->name == len_from) return count_value(ins[i], len_from);
    throw MarshalError(MarshalErrorKind::unknown_type, sig.name + ": no in-param '" + len_from + "' for array length");
}

std::uint32_t Marshaller::layout_of(const SemType& t) const {
    try {
        return binding::word_size(t, desc_);
    } catch (const binding::BindingError& e) {
        throw MarshalError(MarshalErrorKind::unknown_type, e.what());
    }
}

// ---- strings ---------------------------------------------------------------

std::vector<Word> Marshaller::pack_string8(const std::string& s) {
    if (s.find('\0') != std::string::npos) throw MarshalError(MarshalErrorKind::bad_string, "string contains NUL");
    std::vector<Word> ws(s.size() / 4 + 1, 0);
    for (std::size_t i = 0; i < s.size(); ++i)
        ws[i / 4] |= Word{static_cast<unsigned char>(s[i])} << (8 * (i % 4));
    return ws;
}

std::vector<Word> Marshaller::pack_string16(const std::string& utf8) {
    if (utf8.find('\0') != std::string::npos) throw MarshalError(MarshalErrorKind::bad_string, "string contains NUL");
    std::u16string u = utf8_to_utf16(utf8);
    std::vector<Word> ws(u.size() / 2 + 1, 0);
    for (std::size_t i = 0; i < u.size(); ++i) ws[i / 2] |= Word{u[i]} << (16 * (i % 2));
    return ws;
}

std::string read_string8(const wordmem::World& world, Addr a) {
    std::string out;
    for (std::int64_t i = 0;; ++i) {
        Word w = world.read1(World::offset(a, i));
        for (int b = 0; b < 4; ++b) {
            char c = static_cast<char>(w >> (8 * b) & 0xFF);
            if (c == '\0') return out;
            out += c;
        }
    }
}

std::string read_string16(const wordmem::World& world, Addr a) {
    std::u16string out;
    for (std::int64_t i = 0;; ++i) {
        Word w = world.read1(World::offset(a, i));
        for (int h = 0; h < 2; ++h) {
            auto c = static_cast<char16_t>(w >> (16 * h) & 0xFFFF);
            if (c == 0) return utf16_to_utf8(out);
            out += c;
        }
    }
}

std::string Marshaller::read_string8(Addr a) const { return marshal::read_string8(world_, a); }

std::string Marshaller::read_string16(Addr a) const { return marshal::read_string16(world_, a); }

// ---- values ------------------------------------------------------------------

const binding::CallbackDesc& Marshaller::callback_desc(const SemType& t) const {
    const binding::CallbackDesc* cb = desc_.find_callback(t.ref);
    if (!cb) throw MarshalError(MarshalErrorKind::unknown_type, "unknown callback type '" + t.ref + "'");
    return *cb;
}

void Marshaller::encode(const Value& v, const SemType& t, TempBlocks& temps, std::vector<Word>& out,
                        const std::string& where) {
    const bool none = v.is<std::monostate>();
    switch (t.kind) {
    case K::unit:
        if (!none) mismatch(where, t, v);
        return;
    case K::int32:
        if (!v.is<std::int32_t>()) mismatch(where, t, v);
        out.push_back(static_cast<Word>(v.as_i32()));
        return;
    case K::word32:
        if (!v.is<std::uint32_t>()) mismatch(where, t, v);
        out.push_back(v.as_word());
        return;
    case K::bool_:
        if (!v.is<bool>()) mismatch(where, t, v);
        out.push_back(v.as_bool() ? 1 : 0);
        return;
    case K::string8:
    case K::string16: {
        if (none) return out.push_back(0);
        if (abstract() && v.is<Addr>()) return out.push_back(v.as_addr().value);
        if (!v.is<std::string>()) mismatch(where, t, v);
        auto ws = t.kind == K::string8 ? pack_string8(v.as_text()) : pack_string16(v.as_text());
        Addr a = temps.alloc(static_cast<std::int64_t>(ws.size()));
        world_.store(a, ws);
        return out.push_back(a.value);
    }
    case K::handle:
        if (none) return out.push_back(0);
        if (v.is<std::uint32_t>()) return out.push_back(v.as_word());
        if (v.is<Addr>()) return out.push_back(v.as_addr().value);
        mismatch(where, t, v);
    case K::enum_: {
        const binding::EnumMap* e = desc_.find_enum(t.ref);
        if (!e) throw MarshalError(MarshalErrorKind::unknown_type, "unknown enum '" + t.ref + "'");
        if (v.is<std::uint32_t>()) return out.push_back(v.as_word());
        if (!v.is<EnumValue>()) mismatch(where, t, v);
        try {
            return out.push_back(e->to_int(v.as<EnumValue>().variant));
        } catch (const std::exception&) {
            mismatch(where, t, v);
        }
    }
    case K::record: {
        const binding::RecordLayout* r = desc_.find_record(t.ref);
        if (!r) throw MarshalError(MarshalErrorKind::unknown_type, "unknown record '" + t.ref + "'");
        if (!v.is<RecordValue>()) mismatch(where, t, v);
        const RecordValue& rv = v.as_record();
        for (const auto& name : rv.names)
            if (!r->field(name))
                throw MarshalError(MarshalErrorKind::type_mismatch, where + ": " + t.ref + " has no field '" + name + "'");
        for (const auto& f : r->fields) {
            const Value* fv = rv.find(f.name);
            if (!fv) throw MarshalError(MarshalErrorKind::type_mismatch, where + ": missing field '" + f.name + "'");
            encode(*fv, f.type, temps, out, where + "." + f.name);
        }
        return;
    }
    case K::array: {
        if (none) return out.push_back(0);
        if (abstract() && v.is<Addr>()) return out.push_back(v.as_addr().value);
        if (!v.is<ListValue>()) mismatch(where, t, v);
        const auto& items = v.as_list();
        if (items.empty()) return out.push_back(0);
        std::vector<Word> body;
        for (std::size_t i = 0; i < items.size(); ++i)
            encode(items[i], t.element(), temps, body, where + "[" + std::to_string(i) + "]");
        if (body.empty()) return out.push_back(0);
        Addr a = temps.alloc(static_cast<std::int64_t>(body.size()));
        world_.store(a, body);
        return out.push_back(a.value);
    }
    case K::callback:
        if (none) return out.push_back(0);
        if (v.is<Addr>()) return out.push_back(v.as_addr().value);
        if (!v.is<CallbackValue>()) mismatch(where, t, v);
        return out.push_back(callback_addr(v.as<CallbackValue>(), t).value);
    case K::opaque_addr:
        if (none) return out.push_back(0);
        if (v.is<Addr>()) return out.push_back(v.as_addr().value);
        if (v.is<std::uint32_t>()) return out.push_back(v.as_word());
        mismatch(where, t, v);
    case K::guid: {
        if (!v.is<com::Guid>()) mismatch(where, t, v);
        auto ws = v.as<com::Guid>().to_words();
        out.insert(out.end(), ws.begin(), ws.end());
        return;
    }
    }
}

std::vector<Word> Marshaller::marshal_value(const Value& v, const SemType& t, TempBlocks& temps) {
    std::vector<Word> out;
    encode(v, t, temps, out, "value");
    return out;
}

Value Marshaller::decode(const Word*& it, const Word* end, const SemType& t, std::size_t count) {
    std::uint32_t need = layout_of(t);
    if (static_cast<std::size_t>(end - it) < need)
        throw MarshalError(MarshalErrorKind::decode_error, "need " + std::to_string(need) + " words for " +
                                                               binding::to_string(t.kind));
    switch (t.kind) {
    case K::unit: return Value::unit();
    case K::int32: return Value::i32(static_cast<std::int32_t>(*it++));
    case K::word32: return Value::word(*it++);
    case K::bool_: return Value::boolean(*it++ != 0);
    case K::handle: return Value::word(*it++);
    case K::opaque_addr: return Value::addr(Addr{*it++});
    case K::string8:
    case K::string16: {
        Addr a{*it++};
        if (a.is_null()) return Value::unit();
        if (abstract()) return Value::addr(a);
        return Value::text(t.kind == K::string8 ? read_string8(a) : read_string16(a));
    }
    case K::enum_: {
        const binding::EnumMap* e = desc_.find_enum(t.ref);
        if (!e) throw MarshalError(MarshalErrorKind::unknown_type, "unknown enum '" + t.ref + "'");
        Word w = *it++;
        auto name = e->from_int(w);
        if (!name) throw MarshalError(MarshalErrorKind::decode_error, t.ref + " has no variant " + wordmem::hex(w));
        return Value::enum_of(*name);
    }
    case K::record: {
        const binding::RecordLayout* r = desc_.find_record(t.ref);
        RecordValue rv;
        for (const auto& f : r->fields) rv.set(f.name, decode(it, end, f.type, 0));
        return Value::record(std::move(rv));
    }
    case K::array: {
        Addr a{*it++};
        if (abstract()) return Value::addr(a);
        std::vector<Value> items;
        if (count == 0) return Value::list(std::move(items));
        if (a.is_null()) throw MarshalError(MarshalErrorKind::decode_error, "null array with " + std::to_string(count) + " elements");
        std::uint32_t esize = layout_of(t.element());
        std::vector<Word> body = world_.read(a, static_cast<std::int64_t>(count * esize));
        const Word* p = body.data();
        for (std::size_t i = 0; i < count; ++i) items.push_back(decode(p, body.data() + body.size(), t.element(), 0));
        return Value::list(std::move(items));
    }
    case K::callback: return callback_value(Addr{*it++}, t);
    case K::guid: {
        std::array<Word, 4> ws{it[0], it[1], it[2], it[3]};
        it += 4;
        return Value::guid(com::Guid::from_words(ws));
    }
    }
    throw MarshalError(MarshalErrorKind::unknown_type, "unhandled kind");
}

Value Marshaller::unmarshal_value(const std::vector<Word>& ws, const SemType& t, std::size_t count) {
    const Word* it = ws.data();
    Value v = decode(it, ws.data() + ws.size(), t, count);
    if (it != ws.data() + ws.size())
        throw MarshalError(MarshalErrorKind::decode_error, std::to_string(ws.data() + ws.size() - it) + " trailing words");
    return v;
}

Value Marshaller::read_value(Addr a, const SemType& t, std::size_t count) {
    std::uint32_t n = layout_of(t);
    return unmarshal_value(n ? world_.read(a, n) : std::vector<Word>{}, t, count);
}

Addr Marshaller::pack(const Value& v, const SemType& t, TempBlocks& temps) {
    std::vector<Word> ws = marshal_value(v, t, temps);
    Addr a = temps.alloc(std::max<std::int64_t>(1, static_cast<std::int64_t>(ws.size())));
    if (!ws.empty()) world_.store(a, ws);
    return a;
}

// ---- callbacks -----------------------------------------------------------------

Addr Marshaller::callback_addr(const CallbackValue& cb, const SemType& t) {
    if (!cb.fn) return wordmem::kNull;
    if (auto it = callbacks_.find(cb.fn.get()); it != callbacks_.end()) return Addr{it->second};
    const LiftedSig& sig = callback_desc(t).sig;
    std::size_t nresults = sig.results().size();
    std::shared_ptr<const HighFn> fn = cb.fn;
    Impl impl = [fn, nresults](const std::vector<Value>& ins) -> std::vector<Value> {
        Value r = (*fn)(ins);
        if (nresults == 0) return {};
        if (nresults == 1) return {r};
        if (!r.is<ListValue>())
            throw MarshalError(MarshalErrorKind::type_mismatch, "callback must return a list of " + std::to_string(nresults));
        return r.as_list();
    };
    Addr a = world_.fun_to_addr(skeleton(sig, std::move(impl)));
    callbacks_.emplace(cb.fn.get(), a.value);
    callback_origin_.emplace(a.value, cb);
    return a;
}

Value Marshaller::callback_value(Addr a, const SemType& t) {
    if (a.is_null()) return Value::unit();
    if (auto it = callback_origin_.find(a.value); it != callback_origin_.end()) return Value{it->second};
    const LiftedSig& sig = callback_desc(t).sig;
    HighFn fn = [this, a, &sig](const std::vector<Value>& ins) {
        std::vector<Value> rs = call(sig, world_.addr_to_fun(a), ins);
        if (rs.empty()) return Value::unit();
        if (rs.size() == 1) return rs.front();
        return Value::list(std::move(rs));
    };
    CallbackValue cb{std::make_shared<const HighFn>(std::move(fn))};
    callbacks_.emplace(cb.fn.get(), a.value);
    callback_origin_.emplace(a.value, cb);
    return Value{cb};
}

// ---- calls -------------------------------------------------------------------

CallPlan Marshaller::plan(const LiftedSig& sig) const {
    CallPlan p;
    p.sig = &sig;
    for (const auto& prm : sig.params) {
        Action a = Action::pass_word;
        std::uint32_t size = 0;
        if (is_out(prm.dir)) {
            a = Action::alloc_out;
            size = prm.type.kind == K::array ? 0 : layout_of(prm.type);
        } else if (prm.by_ref) {
            a = Action::pass_addr_of_packed;
        } else if (prm.type.kind == K::string8 || prm.type.kind == K::string16) {
            a = Action::pack_string;
        } else if (prm.type.kind == K::array) {
            a = Action::pack_array;
        } else if (prm.type.kind == K::callback) {
            a = Action::pack_callback;
        }
        p.actions.push_back(a);
        p.out_sizes.push_back(size);
    }
    return p;
}

std::vector<Value> Marshaller::call(const LiftedSig& sig, const wordmem::WordFn& f, const std::vector<Value>& ins,
                                    std::optional<Word> self) {
    auto in = sig.in_params();
    if (ins.size() != in.size())
        throw MarshalError(MarshalErrorKind::arity_mismatch, sig.name + " takes " + std::to_string(in.size()) +
                                                                 " arguments, got " + std::to_string(ins.size()));
    TempBlocks temps(world_);
    std::vector<Word> args;
    if (self) args.push_back(*self);
    std::vector<Addr> slots(sig.params.size());
    std::vector<std::size_t> counts(sig.params.size(), 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        const auto& p = sig.params[i];
        if (p.type.kind == K::array && !p.type.len_from.empty()) counts[i] = array_count(sig, p.type.len_from, ins);
        if (is_out(p.dir)) {
            std::uint32_t n = p.type.kind == K::array ? static_cast<std::uint32_t>(counts[i] * layout_of(p.type.element()))
                                                      : layout_of(p.type);
            if (p.type.kind == K::array && n == 0) {
                args.push_back(0);
                continue;
            }
            slots[i] = temps.alloc(std::max<std::uint32_t>(n, 1));
            args.push_back(slots[i].value);
            continue;
        }
        const Value& v = ins[k++];
        if (p.type.kind == K::array && v.is<ListValue>() && !p.type.len_from.empty() && v.as_list().size() != counts[i])
            throw MarshalError(MarshalErrorKind::type_mismatch,
                               sig.name + "." + p.name + ": list has " + std::to_string(v.as_list().size()) +
                                   " elements but " + p.type.len_from + " = " + std::to_string(counts[i]));
        if (p.by_ref) {
            if (abstract() && v.is<Addr>()) {
                slots[i] = v.as_addr();
            } else {
                slots[i] = pack(v, p.type, temps);
            }
            args.push_back(slots[i].value);
        } else {
            encode(v, p.type, temps, args, sig.name + "." + p.name);
        }
    }

    Word r = f(args);
    if (sig.hresult && (r & 0x80000000u))
        throw MarshalError(MarshalErrorKind::failed_hresult, sig.name + " returned " + wordmem::hex(r), r);

    std::vector<Value> results;
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        const auto& p = sig.params[i];
        if (!returns_addr(p.dir)) continue;
        if (slots[i].is_null()) {
            results.push_back(p.type.kind == K::array ? Value::list({}) : Value::unit());
        } else if (abstract() && p.type.kind == K::record) {
            temps.release(slots[i]);
            results.push_back(Value::addr(slots[i]));
        } else if (p.type.kind == K::array) {
            Word a = slots[i].value;
            results.push_back(unmarshal_value({a}, p.type, counts[i]));
        } else {
            results.push_back(read_value(slots[i], p.type));
        }
    }
    if (!sig.ret.is_unit()) results.push_back(unmarshal_value({r}, sig.ret));
    return results;
}

wordmem::WordFn Marshaller::skeleton(const LiftedSig& sig, Impl impl, bool with_self) {
    return [this, sig, impl = std::move(impl), with_self](const std::vector<Word>& args) -> Word {
        std::size_t expect = with_self ? 1 : 0;
        for (const auto& p : sig.params) expect += (p.by_ref || is_out(p.dir)) ? 1 : layout_of(p.type);
        if (args.size() != expect)
            throw MarshalError(MarshalErrorKind::arity_mismatch, sig.name + " expects " + std::to_string(expect) +
                                                                     " words, got " + std::to_string(args.size()));
        const Word* it = args.data();
        const Word* end = it + args.size();
        std::vector<Value> ins;
        if (with_self) ins.push_back(Value::word(*it++));
        const std::size_t base = ins.size();

        // Arrays may name a length parameter declared after them.
        struct Slot {
            std::size_t param;
            std::size_t in_index;
            std::vector<Word> words;
        };
        std::vector<Slot> arrays;
        std::vector<Addr> outs(sig.params.size());
        for (std::size_t i = 0; i < sig.params.size(); ++i) {
            const auto& p = sig.params[i];
            if (p.by_ref || is_out(p.dir)) {
                Addr a{*it++};
                outs[i] = a;
                if (!is_in(p.dir)) continue;
                if (abstract() && p.type.kind == K::record) ins.push_back(Value::addr(a));
                else ins.push_back(read_value(a, p.type));
            } else if (p.type.kind == K::array) {
                arrays.push_back({i, ins.size(), {*it++}});
                ins.emplace_back();
            } else {
                ins.push_back(decode(it, end, p.type, 0));
            }
        }
        std::vector<Value> plain(ins.begin() + static_cast<std::ptrdiff_t>(base), ins.end());
        for (const auto& s : arrays) {
            const SemType& t = sig.params[s.param].type;
            std::size_t n = t.len_from.empty() ? 0 : array_count(sig, t.len_from, plain);
            ins[s.in_index] = unmarshal_value(s.words, t, n);
        }

        std::vector<Value> results;
        try {
            results = impl(ins);
        } catch (const MarshalError& e) {
            if (sig.hresult && e.kind() == MarshalErrorKind::failed_hresult) return e.hresult();
            throw;
        }
        if (results.size() != sig.results().size())
            throw MarshalError(MarshalErrorKind::type_mismatch, sig.name + " implementation returned " +
                                                                    std::to_string(results.size()) + " results, expected " +
                                                                    std::to_string(sig.results().size()));
        // Blocks created here belong to the caller.
        TempBlocks kept(world_);
        std::size_t r = 0;
        for (std::size_t i = 0; i < sig.params.size(); ++i) {
            const auto& p = sig.params[i];
            if (!returns_addr(p.dir)) continue;
            const Value& v = results[r++];
            if (outs[i].is_null()) continue;
            std::vector<Word> ws;
            if (p.type.kind == K::array) {
                if (v.is<ListValue>())
                    for (const auto& item : v.as_list()) encode(item, p.type.element(), kept, ws, sig.name + "." + p.name);
            } else {
                encode(v, p.type, kept, ws, sig.name + "." + p.name);
            }
            if (!ws.empty()) world_.store(outs[i], ws);
        }
        Word ret = 0;
        if (!sig.ret.is_unit()) {
            std::vector<Word> ws;
            encode(results[r], sig.ret, kept, ws, sig.name + " result");
            ret = ws.empty() ? 0 : ws.front();
        }
        kept.release_all();
        return ret;
    };
}

}  // namespace mlidl::marshal
