#pragma once

#include <stdexcept>
#include <string>

namespace mlidl::idl {

struct SourceLoc {
    std::string file;
    int line = 1;
    int col = 1;

    // Locations never take part in structural comparison of the AST.
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

enum class IdlErrorKind {
    lex,
    parse,
    duplicate_name,
    unresolved_type,
    bad_attr_target,
    inheritance_cycle,
};

const char* to_string(IdlErrorKind kind);

/// Frontend diagnostic. what() renders as `file:line:col: message`.
class IdlError : public std::runtime_error {
public:
    IdlError(IdlErrorKind kind, SourceLoc loc, const std::string& message);

    IdlErrorKind kind() const { return kind_; }
    const SourceLoc& loc() const { return loc_; }
    const std::string& message() const { return message_; }

private:
    IdlErrorKind kind_;
    SourceLoc loc_;
    std::string message_;
};

}  // namespace mlidl::idl
