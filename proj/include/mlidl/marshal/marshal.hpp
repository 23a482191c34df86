#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlidl/binding/binding.hpp"
#include "mlidl/marshal/value.hpp"
#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::marshal {

using binding::BindingDesc;
using binding::LiftedSig;
using binding::SemType;
using wordmem::Addr;
using wordmem::Word;

enum class MarshalErrorKind { type_mismatch, bad_string, arity_mismatch, decode_error, unknown_type, failed_hresult };

const char* to_string(MarshalErrorKind k);

class MarshalError : public std::runtime_error {
public:
    MarshalError(MarshalErrorKind kind, const std::string& message, Word hresult = 0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), hresult_(hresult) {}

    MarshalErrorKind kind() const { return kind_; }
    Word hresult() const { return hresult_; }

private:
    MarshalErrorKind kind_;
    Word hresult_;
};

enum class Action { pass_word, pass_addr_of_packed, alloc_out, pack_string, pack_array, pack_callback };

const char* to_string(Action a);

/// One action per ABI parameter, in declaration order.
struct CallPlan {
    const LiftedSig* sig = nullptr;
    std::vector<Action> actions;
    std::vector<std::uint32_t> out_sizes;  // alloc_out only
};

/// Frees the blocks it holds on destruction.
class TempBlocks {
public:
    explicit TempBlocks(wordmem::World& w) : world_(w) {}
    TempBlocks(const TempBlocks&) = delete;
    TempBlocks& operator=(const TempBlocks&) = delete;
    ~TempBlocks();

    Addr alloc(std::int64_t words);
    void release(Addr a);
    void release_all() { blocks_.clear(); }
    std::size_t size() const { return blocks_.size(); }
    wordmem::World& world() const { return world_; }

private:
    wordmem::World& world_;
    std::vector<Addr> blocks_;
};

/// Callee side of a signature: takes the in values, returns results() values.
using Impl = std::function<std::vector<Value>(const std::vector<Value>&)>;

/// Closures it registers in the world refer back to it, so it must outlive
/// any call through them.
class Marshaller {
public:
    Marshaller(wordmem::World& world, const BindingDesc& desc) : world_(world), desc_(desc) {}
    Marshaller(const Marshaller&) = delete;
    Marshaller& operator=(const Marshaller&) = delete;

    wordmem::World& world() const { return world_; }
    const BindingDesc& desc() const { return desc_; }

    std::uint32_t layout_of(const SemType& t) const;

    /// Inline words for v. Strings, arrays and guids-by-address go to fresh
    /// blocks registered in `temps`.
    std::vector<Word> marshal_value(const Value& v, const SemType& t, TempBlocks& temps);
    /// `count` is the element count for arrays.
    Value unmarshal_value(const std::vector<Word>& ws, const SemType& t, std::size_t count = 0);
    Value read_value(Addr a, const SemType& t, std::size_t count = 0);

    /// New block holding v inline; owned by `temps`.
    Addr pack(const Value& v, const SemType& t, TempBlocks& temps);

    static std::vector<Word> pack_string8(const std::string& s);
    static std::vector<Word> pack_string16(const std::string& utf8);
    std::string read_string8(Addr a) const;
    std::string read_string16(Addr a) const;

    CallPlan plan(const LiftedSig& sig) const;

    /// Caller side: marshal ins, allocate outs, invoke f once, check the
    /// HRESULT, decode outs then the return value, free temporaries.
    std::vector<Value> call(const LiftedSig& sig, const wordmem::WordFn& f, const std::vector<Value>& ins,
                            std::optional<Word> self = std::nullopt);

    /// Callee side: word-level function that decodes its arguments, runs
    /// impl, stores outs through the caller's pointers and encodes the
    /// return. With `with_self` the first word is passed to impl as a word.
    wordmem::WordFn skeleton(const LiftedSig& sig, Impl impl, bool with_self = false);

    Addr callback_addr(const CallbackValue& cb, const SemType& t);
    Value callback_value(Addr a, const SemType& t);

private:
    const binding::CallbackDesc& callback_desc(const SemType& t) const;
    void encode(const Value& v, const SemType& t, TempBlocks& temps, std::vector<Word>& out, const std::string& where);
    Value decode(const Word*& it, const Word* end, const SemType& t, std::size_t count);
    bool abstract() const { return desc_.level == binding::Level::abstract; }

    wordmem::World& world_;
    const BindingDesc& desc_;
    std::map<const HighFn*, Word> callbacks_;
    std::map<Word, CallbackValue> callback_origin_;
};

/// NUL-terminated strings as laid out by pack_string8 / pack_string16.
std::string read_string8(const wordmem::World& w, Addr a);
std::string read_string16(const wordmem::World& w, Addr a);

/// Element count carried by in-param `len_from`, given the in values of sig.
std::size_t array_count(const LiftedSig& sig, const std::string& len_from, const std::vector<Value>& ins);

}  // namespace mlidl::marshal
