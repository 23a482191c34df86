#include <stdexcept>

#include "mlidl/idl/parser.hpp"
#include "mlidl/winsim/bounce.hpp"
#include "mlidl/winsim/queue_adapter.hpp"

namespace mlidl::winsim {

using marshal::Api;
using marshal::Value;

namespace {

Value i32(Word w) { return Value::i32(static_cast<std::int32_t>(w)); }

Word enum_value(const Api& api, const char* type, const char* name) {
    return api.marshaller().desc().find_enum(type)->to_int(name);
}

std::string const_text(const Api& api, const char* name) {
    return std::get<std::string>(api.marshaller().desc().find_const(name)->value);
}

std::string message_name(const Api& api, Word code) {
    return api.marshaller().desc().find_enum("WM")->from_int(code).value_or("");
}

std::int32_t as_int(const Value& v) { return v.as_i32(); }

// Window procedure keeping its state in mutable cells.
class RefCellBounce {
public:
    explicit RefCellBounce(Api& api) : api_(api) {}

    Value operator()(const std::vector<Value>& a) {
        Word hwnd = static_cast<Word>(a.at(0).as_i32());
        Word msg = static_cast<Word>(a.at(1).as_i32());
        Word wparam = static_cast<Word>(a.at(2).as_i32());
        Word lparam = static_cast<Word>(a.at(3).as_i32());
        std::string name = message_name(api_, msg);
        if (name == "WM_CREATE") return create(hwnd);
        if (name == "WM_SIZE")
            return size(static_cast<std::int32_t>(lo_word(lparam)), static_cast<std::int32_t>(hi_word(lparam)));
        if (name == "WM_DESTROY") return destroy(hwnd);
        if (name == "WM_TIMER") return wparam == BALL_TIMER ? timer_ball(hwnd) : Value::i32(0);
        return api_.call1("User", "DefWindowProcA", {i32(hwnd), i32(msg), i32(wparam), i32(lparam)});
    }

private:
    Value create(Word hwnd) {
        Value hdc = api_.call1("User", "GetDC", {i32(hwnd)});
        api_.call1("User", "ReleaseDC", {i32(hwnd), hdc});
        api_.call1("User", "SetTimer", {i32(hwnd), Value::word(BALL_TIMER), Value::word(TIMER_RATE), Value::unit()});
        return Value::i32(0);
    }

    Value size(std::int32_t xs, std::int32_t ys) {
        cx_client_ = xs;
        cy_client_ = ys;
        x_center_ = xs / 2;
        y_center_ = ys / 2;
        cx_move_ = MOVE_RATE;
        cy_move_ = MOVE_RATE;
        cx_total_ = 158;
        cy_total_ = 131;
        cx_radius_ = 118 / 2;
        cy_radius_ = 90 / 2;
        if (bitmap_ != 0) api_.call1("Gdi", "DeleteObject", {Value::i32(bitmap_)});
        bitmap_ = as_int(api_.call1("User", "LoadImageA",
                                    {Value::i32(0), Value::text(BITMAP_FILE),
                                     Value::word(enum_value(api_, "CONSTS", "IMAGE_BITMAP")), Value::i32(0), Value::i32(0),
                                     Value::word(enum_value(api_, "OPTS", "LR_LOADFROMFILE"))}));
        return Value::i32(0);
    }

    Value timer_ball(Word hwnd) {
        if (bitmap_ == 0) return Value::i32(0);
        Value hdc = api_.call1("User", "GetDC", {i32(hwnd)});
        Value mem = api_.call1("Gdi", "CreateCompatibleDC", {hdc});
        api_.call1("Gdi", "SelectObject", {mem, Value::i32(bitmap_)});
        api_.call1("Gdi", "BitBlt",
                   {hdc, Value::i32(x_center_ - cx_total_ / 2), Value::i32(y_center_ - cy_total_ / 2),
                    Value::i32(cx_total_), Value::i32(cy_total_), mem, Value::i32(0), Value::i32(0),
                    Value::word(enum_value(api_, "CONSTS", "SRCCOPY"))});
        api_.call1("User", "ReleaseDC", {i32(hwnd), hdc});
        api_.call1("Gdi", "DeleteDC", {mem});
        x_center_ += cx_move_;
        y_center_ += cy_move_;
        if (x_center_ + cx_radius_ >= cx_client_ || x_center_ - cx_radius_ <= 0) cx_move_ = -cx_move_;
        if (y_center_ + cy_radius_ >= cy_client_ || y_center_ - cy_radius_ <= 0) cy_move_ = -cy_move_;
        return Value::i32(0);
    }

    Value destroy(Word hwnd) {
        api_.call1("User", "KillTimer", {i32(hwnd), Value::word(BALL_TIMER)});
        if (bitmap_ != 0) api_.call1("Gdi", "DeleteObject", {Value::i32(bitmap_)});
        api_.call1("User", "PostQuitMessage", {Value::i32(0)});
        return Value::i32(0);
    }

    Api& api_;
    std::int32_t cx_client_ = 0, cy_client_ = 0;
    std::int32_t x_center_ = 0, y_center_ = 0;
    std::int32_t cx_move_ = 0, cy_move_ = 0;
    std::int32_t cx_total_ = 0, cy_total_ = 0;
    std::int32_t cx_radius_ = 0, cy_radius_ = 0;
    std::int32_t bitmap_ = 0;
};

std::int32_t flip(std::int32_t move, std::int32_t center, std::int32_t radius, std::int32_t extent) {
    return center + radius >= extent || center - radius <= 0 ? -move : move;
}

}  // namespace

binding::BindingDesc win32_binding(binding::Mode mode, binding::Level level) {
    return binding::build_binding(idl::load_unit(win32_idl(), "win32.idl"), mode, level);
}

std::pair<BounceState, std::int32_t> bounce_step(Api& api, BounceState s, const Msg& m) {
    const std::string name = message_name(api, m.code);
    const Value hwnd = i32(m.hwnd);
    if (name == "WM_CREATE") {
        Value hdc = api.call1("User", "GetDC", {hwnd});
        api.call1("User", "ReleaseDC", {hwnd, hdc});
        api.call1("User", "SetTimer", {hwnd, Value::word(BALL_TIMER), Value::word(TIMER_RATE), Value::unit()});
        return {s, 0};
    }
    if (name == "WM_SIZE") {
        const auto xs = static_cast<std::int32_t>(lo_word(m.lparam));
        const auto ys = static_cast<std::int32_t>(hi_word(m.lparam));
        if (s.bitmap != 0) api.call1("Gdi", "DeleteObject", {Value::i32(s.bitmap)});
        std::int32_t bitmap = as_int(api.call1(
            "User", "LoadImageA",
            {Value::i32(0), Value::text(BITMAP_FILE), Value::word(enum_value(api, "CONSTS", "IMAGE_BITMAP")),
             Value::i32(0), Value::i32(0), Value::word(enum_value(api, "OPTS", "LR_LOADFROMFILE"))}));
        return {{xs, ys, xs / 2, ys / 2, MOVE_RATE, MOVE_RATE, 158, 131, 118 / 2, 90 / 2, bitmap}, 0};
    }
    if (name == "WM_TIMER") {
        if (m.wparam != BALL_TIMER || s.bitmap == 0) return {s, 0};
        Value hdc = api.call1("User", "GetDC", {hwnd});
        Value mem = api.call1("Gdi", "CreateCompatibleDC", {hdc});
        api.call1("Gdi", "SelectObject", {mem, Value::i32(s.bitmap)});
        api.call1("Gdi", "BitBlt",
                  {hdc, Value::i32(s.x_center - s.cx_total / 2), Value::i32(s.y_center - s.cy_total / 2),
                   Value::i32(s.cx_total), Value::i32(s.cy_total), mem, Value::i32(0), Value::i32(0),
                   Value::word(enum_value(api, "CONSTS", "SRCCOPY"))});
        api.call1("User", "ReleaseDC", {hwnd, hdc});
        api.call1("Gdi", "DeleteDC", {mem});
        BounceState n = s;
        n.x_center += s.cx_move;
        n.y_center += s.cy_move;
        n.cx_move = flip(s.cx_move, n.x_center, s.cx_radius, s.cx_client);
        n.cy_move = flip(s.cy_move, n.y_center, s.cy_radius, s.cy_client);
        return {n, 0};
    }
    if (name == "WM_DESTROY") {
        api.call1("User", "KillTimer", {hwnd, Value::word(BALL_TIMER)});
        if (s.bitmap != 0) api.call1("Gdi", "DeleteObject", {Value::i32(s.bitmap)});
        api.call1("User", "PostQuitMessage", {Value::i32(0)});
        return {s, 0};
    }
    return {s, as_int(api.call1("User", "DefWindowProcA", {hwnd, i32(m.code), i32(m.wparam), i32(m.lparam)}))};
}

Word bounce_winmain(Api& api, const marshal::HighFn& wndproc, Word hinstance) {
    Value icon = api.call1("User", "LoadIconA", {Value::i32(0), Value::text(const_text(api, "IDI_APPLICATION"))});
    Value cursor = api.call1("User", "LoadCursorA", {Value::i32(0), Value::text(const_text(api, "IDC_ARROW"))});
    Value brush = api.call1("Gdi", "GetStockObject", {i32(enum_value(api, "CONSTS", "WHITE_BRUSH"))});
    marshal::RecordValue wc;
    wc.set("cbSize", Value::word(WNDCLASSEX_BYTES))
        .set("style", i32(util_or({enum_value(api, "OPTS", "CS_HREDRAW"), enum_value(api, "OPTS", "CS_VREDRAW")})))
        .set("lpfnWndProc", Value::callback(wndproc))
        .set("cbClsExtra", Value::i32(0))
        .set("cbWndExtra", Value::i32(0))
        .set("hInstance", i32(hinstance))
        .set("hIcon", icon)
        .set("hCursor", cursor)
        .set("hbrBackground", brush)
        .set("lpszMenuName", Value::text(""))
        .set("lpszClassName", Value::text(APP_NAME))
        .set("hIconSm", icon);
    if (as_int(api.call1("User", "RegisterClassExA", {Value::record(wc)})) == 0)
        throw std::runtime_error("RegisterClassExA failed");
    const Value cw = i32(enum_value(api, "OPTS", "CW_USEDEFAULT"));
    Value hwnd = api.call1("User", "CreateWindowExA",
                           {Value::i32(0), Value::text(APP_NAME), Value::text("Bouncing SML/NJ"),
                            i32(enum_value(api, "OPTS", "WS_OVERLAPPEDWINDOW")), cw, cw, Value::i32(500),
                            Value::i32(300), Value::i32(0), Value::i32(0), i32(hinstance), Value::unit()});
    if (as_int(hwnd) == 0) throw std::runtime_error("CreateWindowExA failed");
    api.call1("User", "ShowWindow", {hwnd, i32(enum_value(api, "CONSTS", "SW_SHOWNORMAL"))});
    api.call1("User", "UpdateWindow", {hwnd});
    api.call1("User", "SetForegroundWindow", {hwnd});
    return static_cast<Word>(as_int(hwnd));
}

std::string BounceRun::trace_text() const {
    std::string out;
    for (const auto& l : trace) out += l + "\n";
    return out;
}

BounceRun run_bounce(const BounceOptions& opts) {
    wordmem::World world;
    world.set_trace(opts.memory_trace);
    SimWorld sim(world);
    sim.install();
    const binding::BindingDesc desc = win32_binding(opts.mode);
    marshal::Marshaller m(world, desc);
    Api api(m);

    std::optional<WndProcQueue<BounceState>> queued;
    marshal::HighFn wndproc;
    if (opts.handler == Handler::queued) {
        queued.emplace(BounceState{}, [&api](BounceState s, const Msg& msg) { return bounce_step(api, s, msg); });
        wndproc = queued->wndproc();
    } else {
        wndproc = RefCellBounce(api);
    }

    BounceRun run;
    run.hwnd = bounce_winmain(api, wndproc, HINSTANCE);
    sim.pump(opts.ticks);
    sim.destroy_window(run.hwnd);
    // WM_DESTROY has already posted quit; one more pump hands back the code.
    run.exit_code = sim.quit_code() ? sim.quit_code() : sim.pump(1000);
    api.call1("User", "UnregisterClassA", {Value::text(APP_NAME), i32(HINSTANCE)});
    world.set_trace(nullptr);

    run.trace = sim.trace();
    run.live_blocks = world.live_count();
    run.live_gdi = sim.live_gdi_count();
    run.timers = sim.timer_count();
    run.classes = sim.class_count();
    return run;
}

}  // namespace mlidl::winsim
