#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mlidl/idl/ast.hpp"
#include "mlidl/idl/token.hpp"

namespace mlidl::idl {

/// Parses a token stream into a unit. Checks name uniqueness per namespace
/// (types, values, interfaces, operations within an interface) but does not
/// resolve references; run resolve() for that.
IdlUnit parse_unit(const std::vector<Token>& tokens, const std::string& source_name = "<input>");

/// tokenize + parse_unit.
IdlUnit parse_text(std::string_view text, const std::string& source_name = "<input>");

/// tokenize + parse_unit + resolve.
IdlUnit load_unit(std::string_view text, const std::string& source_name = "<input>");

}  // namespace mlidl::idl
