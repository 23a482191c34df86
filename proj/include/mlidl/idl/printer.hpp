#pragma once

#include <string>

#include "mlidl/idl/ast.hpp"

namespace mlidl::idl {

/// Renders a unit back to IDL source that reparses to a structurally equal unit.
std::string pretty_print(const IdlUnit& unit);

std::string type_to_string(const IdlType& t);

}  // namespace mlidl::idl
