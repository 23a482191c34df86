#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mlidl/binding/binding.hpp"

namespace mlidl::binding {

/// Signature text in the style of the generated SML signatures.
std::string emit_sig_text(const BindingDesc& desc);

/// JSON binding file; inverse of load_binding_file.
std::string emit_binding_file(const BindingDesc& desc);

/// Throws BindingError(schema_violation) naming the offending JSON path.
BindingDesc load_binding_file(std::string_view text);

/// FNV-1a 64 over the binding file text; stamped into the signature header.
std::uint64_t content_hash(const BindingDesc& desc);

/// Display form of a type at the given level, e.g. `Int32.int`, `POINT list`.
std::string display_type(const SemType& t, Level level);

}  // namespace mlidl::binding
