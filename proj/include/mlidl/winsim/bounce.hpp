#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlidl/binding/binding.hpp"
#include "mlidl/marshal/api.hpp"
#include "mlidl/winsim/winsim.hpp"

namespace mlidl::winsim {

/// Text of idl/win32.idl, compiled in.
const std::string& win32_idl();
binding::BindingDesc win32_binding(binding::Mode mode, binding::Level level = binding::Level::auto_);

inline constexpr Word BALL_TIMER = 2;
inline constexpr std::int32_t MOVE_RATE = 10;
inline constexpr Word TIMER_RATE = 20;
inline constexpr const char* APP_NAME = "BouncingSMLNJ";
inline constexpr const char* BITMAP_FILE = "smlnj.bmp";

struct BounceState {
    std::int32_t cx_client = 0;
    std::int32_t cy_client = 0;
    std::int32_t x_center = 0;
    std::int32_t y_center = 0;
    std::int32_t cx_move = 0;
    std::int32_t cy_move = 0;
    std::int32_t cx_total = 0;
    std::int32_t cy_total = 0;
    std::int32_t cx_radius = 0;
    std::int32_t cy_radius = 0;
    std::int32_t bitmap = 0;

    bool operator==(const BounceState&) const = default;
};

/// Pure form of the window procedure: all API calls go through `api`, all
/// state is threaded through the arguments.
std::pair<BounceState, std::int32_t> bounce_step(marshal::Api& api, BounceState s, const Msg& m);

/// Registers the class, creates and shows the window; returns the hwnd.
Word bounce_winmain(marshal::Api& api, const marshal::HighFn& wndproc, Word hinstance);

enum class Handler { ref_cells, queued };

struct BounceOptions {
    binding::Mode mode = binding::Mode::dynamic;
    std::uint64_t ticks = 500;
    Handler handler = Handler::ref_cells;
    std::ostream* memory_trace = nullptr;
};

struct BounceRun {
    std::vector<std::string> trace;
    std::optional<std::int32_t> exit_code;
    Word hwnd = 0;
    std::size_t live_blocks = 0;
    std::size_t live_gdi = 0;
    std::size_t timers = 0;
    std::size_t classes = 0;

    std::string trace_text() const;
};

/// winmain, `ticks` ticks of the message loop, the user closing the window,
/// the loop running until quit, then UnregisterClassA.
BounceRun run_bounce(const BounceOptions& opts);

}  // namespace mlidl::winsim
