#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace mlidl::com {

struct Guid {
    std::uint32_t data1 = 0;
    std::uint16_t data2 = 0;
    std::uint16_t data3 = 0;
    std::array<std::uint8_t, 8> data4{};

    auto operator<=>(const Guid&) const = default;

    /// `{XXXXXXXX-XXXX-XXXX-XXXX-XXXXXXXXXXXX}`, uppercase.
    std::string to_string() const {
        char buf[40];
        std::snprintf(buf, sizeof buf, "{%08X-%04X-%04X-%02X%02X-%02X%02X%02X%02X%02X%02X}", data1, data2, data3,
                      data4[0], data4[1], data4[2], data4[3], data4[4], data4[5], data4[6], data4[7]);
        return buf;
    }

    /// Accepts either case; braces are required.
    static std::optional<Guid> parse(std::string_view s) {
        if (s.size() != 38 || s.front() != '{' || s.back() != '}') return std::nullopt;
        static constexpr std::array<std::size_t, 4> dashes{9, 14, 19, 24};
        std::uint8_t bytes[16];
        std::size_t n = 0;
        for (std::size_t i = 1; i < 37;) {
            if (i == dashes[0] || i == dashes[1] || i == dashes[2] || i == dashes[3]) {
                if (s[i] != '-') return std::nullopt;
                ++i;
                continue;
            }
            int hi = hex(s[i]), lo = hex(s[i + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            bytes[n++] = static_cast<std::uint8_t>(hi << 4 | lo);
            i += 2;
        }
        Guid g;
        g.data1 = std::uint32_t{bytes[0]} << 24 | std::uint32_t{bytes[1]} << 16 | std::uint32_t{bytes[2]} << 8 | bytes[3];
        g.data2 = static_cast<std::uint16_t>(bytes[4] << 8 | bytes[5]);
        g.data3 = static_cast<std::uint16_t>(bytes[6] << 8 | bytes[7]);
        for (int i = 0; i < 8; ++i) g.data4[i] = bytes[8 + i];
        return g;
    }

    /// In-memory form: data1; data2 | data3 << 16; data4 as two little-endian words.
    std::array<std::uint32_t, 4> to_words() const {
        auto le = [&](int at) {
            return std::uint32_t{data4[at]} | std::uint32_t{data4[at + 1]} << 8 | std::uint32_t{data4[at + 2]} << 16 |
                   std::uint32_t{data4[at + 3]} << 24;
        };
        return {data1, std::uint32_t{data2} | std::uint32_t{data3} << 16, le(0), le(4)};
    }

    static Guid from_words(const std::array<std::uint32_t, 4>& w) {
        Guid g;
        g.data1 = w[0];
        g.data2 = static_cast<std::uint16_t>(w[1]);
        g.data3 = static_cast<std::uint16_t>(w[1] >> 16);
        for (int i = 0; i < 4; ++i) {
            g.data4[i] = static_cast<std::uint8_t>(w[2] >> (8 * i));
            g.data4[4 + i] = static_cast<std::uint8_t>(w[3] >> (8 * i));
        }
        return g;
    }

private:
    static int hex(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }
};

}  // namespace mlidl::com
