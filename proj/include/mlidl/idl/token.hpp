#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mlidl/idl/error.hpp"

namespace mlidl::idl {

enum class TokenKind {
    ident,
    keyword,
    int_literal,
    word_literal,
    string_literal,
    char_literal,
    punct,
};

const char* to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::punct;
    std::string text;  // raw lexeme as written
    int line = 1;
    int col = 1;
    std::uint32_t value = 0;  // int/word/char literals
    std::string str;          // decoded string literal

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return is(TokenKind::punct, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::keyword, t); }
};

bool is_keyword(std::string_view word);

/// Splits IDL text into tokens. `//` and `/* */` comments are dropped.
/// Throws IdlError(lex) on stray characters, unterminated strings or
/// comments, and literals that do not fit in 32 bits.
std::vector<Token> tokenize(std::string_view text, const std::string& file = "<input>");

}  // namespace mlidl::idl
