#include <algorithm>
#include <sstream>

#include "mlidl/marshal/marshal.hpp"
#include "mlidl/winsim/winsim.hpp"

namespace mlidl::winsim {

namespace {

constexpr Word kLoadFromFile = 0x10;

std::int64_t sgn(Word w) { return static_cast<std::int32_t>(w); }

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_string(const Msg& m) {
    return "MSG " + std::to_string(sgn(m.hwnd)) + " " + std::to_string(sgn(m.code)) + " " + std::to_string(sgn(m.wparam)) +
           " " + std::to_string(sgn(m.lparam));
}

Word util_or(const std::vector<Word>& flags) {
    Word out = 0;
    for (Word f : flags) out |= f;
    return out;
}

SimWorld::SimWorld(wordmem::World& w) : world_(w) { add_asset("smlnj.bmp", {158, 131}); }

void SimWorld::record(const std::string& op, const std::vector<Arg>& args) {
    std::string line = "TICK " + std::to_string(tick_) + " DRAW " + op;
    for (const auto& a : args) {
        line += ' ';
        if (const auto* n = std::get_if<std::int64_t>(&a)) line += std::to_string(*n);
        else line += quoted(std::get<std::string>(a));
    }
    trace_.push_back(std::move(line));
}

std::string SimWorld::trace_text() const {
    std::string out;
    for (const auto& l : trace_) out += l + "\n";
    return out;
}

std::string SimWorld::text(Word addr) const { return addr ? marshal::read_string8(world_, Addr{addr}) : std::string(); }

bool SimWorld::window_alive(Word hwnd) const { return windows_.count(hwnd) != 0; }

std::optional<Asset> SimWorld::client_size(Word hwnd) const {
    auto it = windows_.find(hwnd);
    if (it == windows_.end()) return std::nullopt;
    return Asset{it->second.width, it->second.height};
}

Word SimWorld::dispatch(const Msg& m) {
    trace_.push_back("TICK " + std::to_string(tick_) + " " + to_string(m));
    auto it = windows_.find(m.hwnd);
    if (it == windows_.end()) return 0;
    Addr proc = classes_.at(it->second.class_name).wndproc;
    std::vector<Word> args{m.hwnd, m.code, m.wparam, m.lparam};
    if (m.code == wm::timer && m.lparam != 0) {
        proc = Addr{m.lparam};
        args = {m.hwnd, m.code, m.wparam, static_cast<Word>(tick_ * MS_PER_TICK)};
    }
    try {
        return world_.call(proc, args);
    } catch (const SimError&) {
        throw;
    } catch (const std::exception& e) {
        throw SimError(m, e.what());
    }
}

std::optional<std::int32_t> SimWorld::pump(std::uint64_t max_ticks) {
    for (std::uint64_t n = 0; n < max_ticks && !quit_; ++n) {
        ++tick_;
        for (auto& [key, t] : timers_)
            if (t.due <= tick_) {
                queue_.push_back({key.first, wm::timer, key.second, t.proc});
                t.due += t.period;
            }
        while (!queue_.empty() && !quit_) {
            Msg m = queue_.front();
            queue_.pop_front();
            if (!window_alive(m.hwnd)) continue;
            dispatch(m);
        }
    }
    return quit_;
}

Word SimWorld::register_class(Addr wc) {
    auto w = world_.read(wc, WNDCLASSEX_BYTES / 4);
    std::string name = text(w[10]);
    record("RegisterClassExA", {name, sgn(w[1])});
    if (w[0] != WNDCLASSEX_BYTES || w[2] == 0 || name.empty() || classes_.count(name)) return 0;
    Word atom = next_atom_++;
    classes_[name] = {atom, Addr{w[2]}, static_cast<std::int32_t>(w[1]), w[5]};
    return atom;
}

Word SimWorld::unregister_class(Word name_addr, Word hinstance) {
    std::string name = text(name_addr);
    record("UnregisterClassA", {name, sgn(hinstance)});
    auto it = classes_.find(name);
    if (it == classes_.end()) return 0;
    for (const auto& [h, win] : windows_)
        if (win.class_name == name) return 0;
    classes_.erase(it);
    return 1;
}

Word SimWorld::create_window(const std::vector<Word>& a) {
    std::string cls = text(a[1]);
    record("CreateWindowExA", {sgn(a[0]), cls, text(a[2]), sgn(a[3]), sgn(a[4]), sgn(a[5]), sgn(a[6]), sgn(a[7]),
                               sgn(a[8]), sgn(a[9]), sgn(a[10]), sgn(a[11])});
    if (!classes_.count(cls)) return 0;
    auto dim = [](Word v) { return v == CW_USEDEFAULT ? 0 : static_cast<std::int32_t>(v); };
    Word hwnd = fresh();
    windows_[hwnd] = {cls, dim(a[6]), dim(a[7])};
    if (static_cast<std::int32_t>(dispatch({hwnd, wm::create, 0, 0})) == -1) {
        windows_.erase(hwnd);
        timers_.erase(timers_.lower_bound({hwnd, 0}), timers_.upper_bound({hwnd, ~Word{0}}));
        return 0;
    }
    if (!window_alive(hwnd)) return 0;
    const Window& win = windows_.at(hwnd);
    dispatch({hwnd, wm::size, 0, make_lparam(static_cast<Word>(win.width), static_cast<Word>(win.height))});
    return window_alive(hwnd) ? hwnd : 0;
}

bool SimWorld::destroy_window(Word hwnd) {
    record("DestroyWindow", {sgn(hwnd)});
    if (!window_alive(hwnd)) return false;
    dispatch({hwnd, wm::destroy, 0, 0});
    windows_.erase(hwnd);
    timers_.erase(timers_.lower_bound({hwnd, 0}), timers_.upper_bound({hwnd, ~Word{0}}));
    return true;
}

Word SimWorld::begin_paint(Word hwnd, Addr ps) {
    record("BeginPaint", {sgn(hwnd)});
    auto it = windows_.find(hwnd);
    if (it == windows_.end()) return 0;
    Word hdc = fresh();
    dcs_[hdc] = {};
    world_.store(ps, {hdc, 0, 0, 0, static_cast<Word>(it->second.width), static_cast<Word>(it->second.height), 0, 0});
    return hdc;
}

Word SimWorld::set_timer(Word hwnd, Word id, Word elapse, Word proc) {
    record("SetTimer", {sgn(hwnd), sgn(id), sgn(elapse), sgn(proc)});
    if (!window_alive(hwnd) || id == 0) return 0;
    std::uint64_t period = std::max<std::uint64_t>(1, (std::uint64_t{elapse} + MS_PER_TICK - 1) / MS_PER_TICK);
    timers_[{hwnd, id}] = {period, tick_ + period, proc};
    return id;
}

Word SimWorld::kill_timer(Word hwnd, Word id) {
    record("KillTimer", {sgn(hwnd), sgn(id)});
    return timers_.erase({hwnd, id}) ? 1 : 0;
}

Word SimWorld::def_window_proc(const Msg& m) {
    record("DefWindowProcA", {sgn(m.hwnd), sgn(m.code), sgn(m.wparam), sgn(m.lparam)});
    if (m.code == wm::close) destroy_window(m.hwnd);
    return 0;
}

void SimWorld::install() {
    using E = wordmem::World::Export;
    using V = std::vector<Word>;
    std::vector<E> user{
        {"RegisterClassExA", [this](const V& a) { return register_class(Addr{a[0]}); }, 1},
        {"UnregisterClassA", [this](const V& a) { return unregister_class(a[0], a[1]); }, 2},
        {"CreateWindowExA", [this](const V& a) { return create_window(a); }, 12},
        {"ShowWindow",
         [this](const V& a) {
             record("ShowWindow", {sgn(a[0]), sgn(a[1])});
             return Word{window_alive(a[0])};
         },
         2},
        {"UpdateWindow",
         [this](const V& a) {
             record("UpdateWindow", {sgn(a[0])});
             return Word{window_alive(a[0])};
         },
         1},
        {"BeginPaint", [this](const V& a) { return begin_paint(a[0], Addr{a[1]}); }, 2},
        {"EndPaint",
         [this](const V& a) {
             record("EndPaint", {sgn(a[0])});
             Word hdc = world_.read1(Addr{a[1]});
             return Word{dcs_.erase(hdc) != 0};
         },
         2},
        {"LoadIconA",
         [this](const V& a) {
             record("LoadIconA", {sgn(a[0]), text(a[1])});
             return fresh();
         },
         2},
        {"LoadCursorA",
         [this](const V& a) {
             record("LoadCursorA", {sgn(a[0]), text(a[1])});
             return fresh();
         },
         2},
        {"LoadImageA",
         [this](const V& a) {
             std::string name = text(a[1]);
             record("LoadImageA", {sgn(a[0]), name, sgn(a[2]), sgn(a[3]), sgn(a[4]), sgn(a[5])});
             auto it = assets_.find(name);
             if (!(a[5] & kLoadFromFile) || it == assets_.end()) return Word{0};
             Word h = fresh();
             objects_[h] = it->second;
             return h;
         },
         6},
        {"GetDC",
         [this](const V& a) {
             record("GetDC", {sgn(a[0])});
             if (a[0] != 0 && !window_alive(a[0])) return Word{0};
             Word h = fresh();
             dcs_[h] = {};
             return h;
         },
         1},
        {"ReleaseDC",
         [this](const V& a) {
             record("ReleaseDC", {sgn(a[0]), sgn(a[1])});
             return Word{dcs_.erase(a[1]) != 0};
         },
         2},
        {"SetTimer", [this](const V& a) { return set_timer(a[0], a[1], a[2], a[3]); }, 4},
        {"KillTimer", [this](const V& a) { return kill_timer(a[0], a[1]); }, 2},
        {"PostQuitMessage",
         [this](const V& a) {
             record("PostQuitMessage", {sgn(a[0])});
             quit_ = static_cast<std::int32_t>(a[0]);
             return Word{0};
         },
         1},
        {"DefWindowProcA", [this](const V& a) { return def_window_proc({a[0], a[1], a[2], a[3]}); }, 4},
        {"SetForegroundWindow",
         [this](const V& a) {
             record("SetForegroundWindow", {sgn(a[0])});
             return Word{window_alive(a[0])};
         },
         1},
        {"DestroyWindow", [this](const V& a) { return Word{destroy_window(a[0])}; }, 1},
    };
    std::vector<E> gdi{
        {"LineTo",
         [this](const V& a) {
             record("LineTo", {sgn(a[0]), sgn(a[1]), sgn(a[2])});
             return Word{dcs_.count(a[0]) != 0};
         },
         3},
        {"PolyLineTo",
         [this](const V& a) {
             std::vector<Arg> args{sgn(a[0]), sgn(a[2])};
             std::int32_t n = static_cast<std::int32_t>(a[2]);
             if (n > 0 && a[1] != 0)
                 for (Word w : world_.read(Addr{a[1]}, 2 * std::int64_t{n})) args.emplace_back(sgn(w));
             record("PolyLineTo", args);
             return Word{dcs_.count(a[0]) != 0 && n >= 0};
         },
         3},
        {"GetStockObject",
         [this](const V& a) {
             record("GetStockObject", {sgn(a[0])});
             Word h = fresh();
             objects_[h] = {};
             return h;
         },
         1},
        {"DeleteObject",
         [this](const V& a) {
             record("DeleteObject", {sgn(a[0])});
             return Word{objects_.erase(a[0]) != 0};
         },
         1},
        {"CreateCompatibleDC",
         [this](const V& a) {
             record("CreateCompatibleDC", {sgn(a[0])});
             Word h = fresh();
             dcs_[h] = {};
             return h;
         },
         1},
        {"SelectObject",
         [this](const V& a) {
             record("SelectObject", {sgn(a[0]), sgn(a[1])});
             auto it = dcs_.find(a[0]);
             if (it == dcs_.end()) return Word{0};
             // The first selection hands back a fresh handle for the DC's default object.
             Word prev = it->second.selected ? it->second.selected : fresh();
             it->second.selected = a[1];
             return prev;
         },
         2},
        {"BitBlt",
         [this](const V& a) {
             record("BitBlt", {sgn(a[0]), sgn(a[1]), sgn(a[2]), sgn(a[3]), sgn(a[4]), sgn(a[5]), sgn(a[6]), sgn(a[7]),
                               sgn(a[8])});
             return Word{dcs_.count(a[0]) != 0 && dcs_.count(a[5]) != 0};
         },
         9},
        {"DeleteDC",
         [this](const V& a) {
             record("DeleteDC", {sgn(a[0])});
             return Word{dcs_.erase(a[0]) != 0};
         },
         1},
    };
    world_.register_library("user32.dll", std::move(user));
    world_.register_library("gdi32.dll", std::move(gdi));
}

}  // namespace mlidl::winsim
