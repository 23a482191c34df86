#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::winsim {

using wordmem::Addr;
using wordmem::Word;

inline constexpr std::uint32_t MS_PER_TICK = 20;
inline constexpr Word HINSTANCE = 0x400000;
inline constexpr Word FIRST_ATOM = 0xC000;
inline constexpr Word CW_USEDEFAULT = 0x80000000;
inline constexpr std::uint32_t WNDCLASSEX_BYTES = 48;

namespace wm {
inline constexpr Word null = 0x0;
inline constexpr Word create = 0x1;
inline constexpr Word destroy = 0x2;
inline constexpr Word size = 0x5;
inline constexpr Word paint = 0xf;
inline constexpr Word close = 0x10;
inline constexpr Word timer = 0x113;
}  // namespace wm

struct Msg {
    Word hwnd = 0;
    Word code = 0;
    Word wparam = 0;
    Word lparam = 0;

    bool operator==(const Msg&) const = default;
};

std::string to_string(const Msg& m);

Word util_or(const std::vector<Word>& flags);
constexpr Word lo_word(Word w) { return w & 0xFFFF; }
constexpr Word hi_word(Word w) { return (w >> 16) & 0xFFFF; }
constexpr Word make_lparam(Word lo, Word hi) { return (hi << 16) | (lo & 0xFFFF); }

/// A window procedure failed; carries the message being dispatched.
class SimError : public std::runtime_error {
public:
    SimError(const Msg& m, const std::string& what)
        : std::runtime_error("while dispatching " + to_string(m) + ": " + what), msg_(m) {}

    const Msg& msg() const { return msg_; }

private:
    Msg msg_;
};

struct Asset {
    std::int32_t width = 0;
    std::int32_t height = 0;
};

/// Simulated window manager and GDI. install() registers user32.dll and
/// gdi32.dll in the world; their exports read and write memory like the
/// real ones and append one trace line per call.
///
/// Trace lines: `TICK <n> MSG <hwnd> <code> <wparam> <lparam>` for every
/// dispatched message and `TICK <n> DRAW <op> <args...>` for every API call,
/// strings quoted and numbers as signed decimal.
class SimWorld {
public:
    explicit SimWorld(wordmem::World& w);
    SimWorld(const SimWorld&) = delete;
    SimWorld& operator=(const SimWorld&) = delete;

    void install();
    wordmem::World& world() const { return world_; }

    void add_asset(const std::string& name, Asset a) { assets_[name] = a; }

    void post(const Msg& m) { queue_.push_back(m); }
    /// Runs at most max_ticks ticks. Each tick fires due timers, then drains
    /// the queue. Returns the exit code once PostQuitMessage has been called.
    std::optional<std::int32_t> pump(std::uint64_t max_ticks);
    /// Same as the DestroyWindow export.
    bool destroy_window(Word hwnd);

    std::uint64_t tick() const { return tick_; }
    std::optional<std::int32_t> quit_code() const { return quit_; }
    const std::vector<std::string>& trace() const { return trace_; }
    std::string trace_text() const;

    bool window_alive(Word hwnd) const;
    std::optional<Asset> client_size(Word hwnd) const;
    std::size_t class_count() const { return classes_.size(); }
    std::size_t timer_count() const { return timers_.size(); }
    std::size_t queue_size() const { return queue_.size(); }
    /// Bitmaps, brushes and DCs not yet deleted or released.
    std::size_t live_gdi_count() const { return objects_.size() + dcs_.size(); }

private:
    struct WndClass {
        Word atom = 0;
        Addr wndproc;
        std::int32_t style = 0;
        Word hinstance = 0;
    };
    struct Window {
        std::string class_name;
        std::int32_t width = 0;
        std::int32_t height = 0;
    };
    struct Timer {
        std::uint64_t period = 1;
        std::uint64_t due = 0;
        Word proc = 0;
    };
    struct Dc {
        Word selected = 0;
    };
    using Arg = std::variant<std::int64_t, std::string>;

    void record(const std::string& op, const std::vector<Arg>& args);
    Word fresh() { return next_handle_++; }
    Word dispatch(const Msg& m);
    std::string text(Word addr) const;

    Word register_class(Addr wc);
    Word unregister_class(Word name, Word hinstance);
    Word create_window(const std::vector<Word>& a);
    Word begin_paint(Word hwnd, Addr ps);
    Word set_timer(Word hwnd, Word id, Word elapse, Word proc);
    Word kill_timer(Word hwnd, Word id);
    Word def_window_proc(const Msg& m);

    wordmem::World& world_;
    std::map<std::string, WndClass> classes_;
    std::map<Word, Window> windows_;
    std::map<std::pair<Word, Word>, Timer> timers_;
    std::map<Word, Dc> dcs_;
    std::map<Word, Asset> objects_;
    std::map<std::string, Asset> assets_;
    std::deque<Msg> queue_;
    std::vector<std::string> trace_;
    std::uint64_t tick_ = 0;
    Word next_handle_ = 1;
    Word next_atom_ = FIRST_ATOM;
    std::optional<std::int32_t> quit_;
};

}  // namespace mlidl::winsim
