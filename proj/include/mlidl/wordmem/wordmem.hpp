#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlidl::wordmem {

using Word = std::uint32_t;

/// Byte address; heap addresses are word aligned.
struct Addr {
    Word value = 0;

    constexpr Addr() = default;
    constexpr explicit Addr(Word v) : value(v) {}

    constexpr bool is_null() const { return value == 0; }
    constexpr auto operator<=>(const Addr&) const = default;
};

inline constexpr Addr kNull{};
inline constexpr Word kHeapBase = 0x0001000;
inline constexpr Word kClosureBase = 0x8000000;
inline constexpr Word kClosureLimit = 0xF000000;

enum class Region { null, heap, closure, unmapped };

Region region_of(Addr a);

enum class MemErrorKind {
    bad_size,
    double_free,
    bad_region,
    out_of_bounds,
    use_after_free,
    not_callable,
    unknown_library,
    unknown_symbol,
    arity_mismatch,
    out_of_memory,
};

const char* to_string(MemErrorKind k);

class MemError : public std::runtime_error {
public:
    MemError(MemErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    MemErrorKind kind() const { return kind_; }

private:
    MemErrorKind kind_;
};

using WordFn = std::function<Word(const std::vector<Word>&)>;

/// Function identity: fun_to_addr is idempotent per CallableRef.
using CallableRef = std::shared_ptr<const WordFn>;

inline CallableRef make_callable(WordFn f) { return std::make_shared<const WordFn>(std::move(f)); }

enum class Convention { pascal, cdecl_ };

struct Symbol {
    Addr addr;
    Convention convention = Convention::pascal;
    std::size_t arity = 0;
};

struct Library {
    std::string name;
    std::map<std::string, Symbol, std::less<>> symbols;
};

/// One heap plus closure table plus library registry. Not thread safe;
/// callers serialize access.
class World {
public:
    World() = default;
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    Addr alloc(std::int64_t words);
    void free(Addr a);
    static Addr offset(Addr a, std::int64_t words);
    void store(Addr a, const std::vector<Word>& ws);
    std::vector<Word> read(Addr a, std::int64_t n) const;
    Word read1(Addr a) const { return read(a, 1).front(); }

    Addr fun_to_addr(const CallableRef& f);
    Addr fun_to_addr(WordFn f) { return fun_to_addr(make_callable(std::move(f))); }
    WordFn addr_to_fun(Addr a) const;
    Word call(Addr a, const std::vector<Word>& args) const;

    /// Registers a simulated dynamic library; symbols become closures.
    struct Export {
        std::string name;
        WordFn fn;
        std::size_t arity;
        Convention convention = Convention::pascal;
    };
    const Library& register_library(const std::string& name, std::vector<Export> exports);
    const Library& open_library(std::string_view name) const;
    Addr get_function(const Library& lib, std::string_view symbol) const;
    const std::map<std::string, Library, std::less<>>& libraries() const { return libraries_; }

    std::size_t live_count() const { return live_; }
    std::size_t live_words() const;
    bool is_live(Addr a) const;

    /// One line per operation: `OP addr args -> result`. Null disables.
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Block {
        std::uint32_t size = 0;
        bool live = true;
        std::vector<Word> cells;
    };
    struct Closure {
        CallableRef fn;
        bool checked = false;
        Convention convention = Convention::pascal;
        std::size_t arity = 0;
    };

    // Block containing [a, a + n words), or an error describing why not.
    const Block& locate(Addr a, std::int64_t n, const char* op, Word* index) const;
    const Closure& closure(Addr a) const;
    void trace(const std::string& line) const;

    std::map<Word, Block> blocks_;
    std::map<Word, Closure> closures_;
    std::map<const WordFn*, Word> closure_ids_;
    std::map<std::string, Library, std::less<>> libraries_;
    Word next_heap_ = kHeapBase;
    Word next_closure_ = kClosureBase;
    std::size_t live_ = 0;
    std::ostream* trace_ = nullptr;
};

std::string hex(Word w);
std::string words_text(const std::vector<Word>& ws);

}  // namespace mlidl::wordmem
