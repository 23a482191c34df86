#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>
#include <utility>

#include "mlidl/marshal/value.hpp"
#include "mlidl/winsim/winsim.hpp"

namespace mlidl::winsim {

/// Single-slot channel: put blocks while full, take blocks while empty.
template <typename T>
class Rendezvous {
public:
    void put(T v) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !slot_; });
        slot_ = std::move(v);
        cv_.notify_all();
    }

    /// Empty once stop is requested.
    std::optional<T> take(std::stop_token st = {}) {
        std::unique_lock lock(mu_);
        if (!cv_.wait(lock, st, [&] { return slot_.has_value(); })) return std::nullopt;
        std::optional<T> out = std::move(slot_);
        slot_.reset();
        cv_.notify_all();
        return out;
    }

private:
    std::mutex mu_;
    std::condition_variable_any cv_;
    std::optional<T> slot_;
};

/// Runs a pure step function on a worker thread behind a window procedure.
/// Each message is handed over on one channel and the result comes back on
/// another; a step that throws rethrows in the dispatching thread. Messages
/// sent from inside a step run inline on the worker.
template <typename State>
class WndProcQueue {
public:
    using Step = std::function<std::pair<State, std::int32_t>(State, const Msg&)>;

    WndProcQueue(State init, Step step)
        : state_(std::move(init)), step_(std::move(step)), worker_([this](std::stop_token st) { serve(st); }) {}
    WndProcQueue(const WndProcQueue&) = delete;
    WndProcQueue& operator=(const WndProcQueue&) = delete;

    std::int32_t send(const Msg& m) {
        if (std::this_thread::get_id() == worker_.get_id()) return apply(m);
        requests_.put(m);
        Reply r = *replies_.take();
        if (r.error) std::rethrow_exception(r.error);
        return r.result;
    }

    /// WNDPROC-shaped function for the marshaller.
    marshal::HighFn wndproc() {
        return [this](const std::vector<marshal::Value>& a) {
            auto w = [&](std::size_t i) { return static_cast<Word>(a.at(i).as_i32()); };
            return marshal::Value::i32(send({w(0), w(1), w(2), w(3)}));
        };
    }

    /// Only meaningful while no message is in flight.
    const State& state() const { return state_; }

private:
    struct Reply {
        std::int32_t result = 0;
        std::exception_ptr error;
    };

    std::int32_t apply(const Msg& m) {
        auto [next, result] = step_(state_, m);
        state_ = std::move(next);
        return result;
    }

    void serve(std::stop_token st) {
        while (auto m = requests_.take(st)) {
            try {
                replies_.put({apply(*m), nullptr});
            } catch (...) {
                replies_.put({0, std::current_exception()});
            }
        }
    }

    State state_;
    Step step_;
    Rendezvous<Msg> requests_;
    Rendezvous<Reply> replies_;
    std::jthread worker_;
};

}  // namespace mlidl::winsim
