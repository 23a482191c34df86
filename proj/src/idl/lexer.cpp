#include <array>
#include <cctype>
#include <charconv>

#include "mlidl/idl/token.hpp"

namespace mlidl::idl {

const char* to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::ident: return "identifier";
    case TokenKind::keyword: return "keyword";
    case TokenKind::int_literal: return "integer literal";
    case TokenKind::word_literal: return "word literal";
    case TokenKind::string_literal: return "string literal";
    case TokenKind::char_literal: return "character literal";
    case TokenKind::punct: return "punctuation";
    }
    return "token";
}

namespace {

constexpr std::array kKeywords{
    "typedef", "struct", "enum",    "const",   "interface", "void",  "int",
    "long",    "short",  "unsigned", "boolean", "char",      "wchar_t", "float",
    "double",
};

constexpr std::string_view kPunct = "{}()[];,=*&:-";

class Lexer {
public:
    Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            if (at_end()) break;
            out.push_back(next());
        }
        return out;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(int line, int col, const std::string& msg) const {
        throw IdlError(IdlErrorKind::lex, SourceLoc{file_, line, col}, msg);
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int line = line_, col = col_;
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (at_end()) fail(line, col, "unterminated block comment");
                    advance();
                }
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token next() {
        Token tok;
        tok.line = line_;
        tok.col = col_;
        std::size_t start = pos_;
        char c = peek();

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
            tok.text = std::string(text_.substr(start, pos_ - start));
            tok.kind = is_keyword(tok.text) ? TokenKind::keyword : TokenKind::ident;
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number(tok);
        if (c == '"') return string_literal(tok);
        if (c == '\'') return char_literal(tok);
        if (kPunct.find(c) != std::string_view::npos) {
            advance();
            tok.kind = TokenKind::punct;
            tok.text = std::string(1, c);
            return tok;
        }
        fail(tok.line, tok.col, std::string("stray character '") + c + "'");
    }

    Token number(Token tok) {
        std::size_t start = pos_;
        int base = 10;
        bool word = false;
        if (peek() == '0' && peek(1) == 'w') {
            if (peek(2) != 'x' || !std::isxdigit(static_cast<unsigned char>(peek(3))))
                fail(tok.line, tok.col, "malformed word literal (expected 0wx followed by hex digits)");
            advance();
            advance();
            advance();
            base = 16;
            word = true;
        } else if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X') &&
                   std::isxdigit(static_cast<unsigned char>(peek(2)))) {
            advance();
            advance();
            base = 16;
        }
        std::size_t digits = pos_;
        while (base == 16 ? std::isxdigit(static_cast<unsigned char>(peek()))
                          : std::isdigit(static_cast<unsigned char>(peek())))
            advance();
        if (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
            fail(tok.line, tok.col, "malformed numeric literal");

        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value, base);
        if (ec != std::errc{} || value > 0xFFFFFFFFull)
            fail(tok.line, tok.col, "literal does not fit in 32 bits");
        tok.kind = word ? TokenKind::word_literal : TokenKind::int_literal;
        tok.text = std::string(text_.substr(start, pos_ - start));
        tok.value = static_cast<std::uint32_t>(value);
        return tok;
    }

    char escape(int line, int col) {
        if (at_end()) fail(line, col, "unterminated literal");
        char e = peek();
        advance();
        switch (e) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return '\0';
        case '\\': return '\\';
        case '"': return '"';
        case '\'': return '\'';
        default: fail(line, col, std::string("unknown escape sequence '\\") + e + "'");
        }
    }

    Token string_literal(Token tok) {
        std::size_t start = pos_;
        advance();
        while (peek() != '"') {
            if (at_end() || peek() == '\n') fail(tok.line, tok.col, "unterminated string literal");
            if (peek() == '\\') {
                advance();
                tok.str.push_back(escape(tok.line, tok.col));
            } else {
                tok.str.push_back(peek());
                advance();
            }
        }
        advance();
        tok.kind = TokenKind::string_literal;
        tok.text = std::string(text_.substr(start, pos_ - start));
        return tok;
    }

    Token char_literal(Token tok) {
        std::size_t start = pos_;
        advance();
        if (at_end() || peek() == '\n' || peek() == '\'') fail(tok.line, tok.col, "empty or unterminated character literal");
        char c = peek();
        advance();
        if (c == '\\') c = escape(tok.line, tok.col);
        if (peek() != '\'') fail(tok.line, tok.col, "unterminated character literal");
        advance();
        tok.kind = TokenKind::char_literal;
        tok.text = std::string(text_.substr(start, pos_ - start));
        tok.value = static_cast<unsigned char>(c);
        return tok;
    }

    std::string_view text_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (const char* k : kKeywords)
        if (word == k) return true;
    return false;
}

std::vector<Token> tokenize(std::string_view text, const std::string& file) {
    return Lexer(text, file).run();
}

}  // namespace mlidl::idl
