#pragma once

// Calc object from idl/calc.idl, shared by the automation tests and the
// acceptance suite. Every method appends to `effects`.

#include <string>
#include <vector>

#include "mlidl/automation/automation.hpp"
#include "mlidl/idl/parser.hpp"

namespace mlidl::test {

inline binding::BindingDesc calc_desc(const std::string& idl_text, const std::string& manifest_text) {
    return binding::build_binding(idl::load_unit(idl_text, "calc.idl"), binding::Mode::com, binding::Level::auto_,
                                  binding::parse_manifest(manifest_text));
}

struct CalcWorld {
    using Value = marshal::Value;
    using Values = std::vector<Value>;

    binding::BindingDesc desc;
    wordmem::World world;
    com::Runtime rt{world};
    marshal::Marshaller m{world, desc};
    com::Bound b{rt, m};
    std::vector<std::string> effects;
    std::int32_t total = 0;

    explicit CalcWorld(binding::BindingDesc d) : desc(std::move(d)) {}

    std::map<std::string, marshal::Impl> impls() {
        return {
            {"Add",
             [this](const Values& in) {
                 auto s = static_cast<std::int32_t>(static_cast<std::uint32_t>(in[1].as_i32()) +
                                                    static_cast<std::uint32_t>(in[2].as_i32()));
                 effects.push_back("Add " + std::to_string(in[1].as_i32()) + " " + std::to_string(in[2].as_i32()));
                 return Values{Value::i32(s)};
             }},
            {"Mask",
             [this](const Values& in) {
                 effects.push_back("Mask " + wordmem::hex(in[1].as_word()) + " " + wordmem::hex(in[2].as_word()));
                 return Values{Value::word(in[1].as_word() & in[2].as_word())};
             }},
            {"IsPositive",
             [this](const Values& in) {
                 effects.push_back("IsPositive " + std::to_string(in[1].as_i32()));
                 return Values{Value::boolean(in[1].as_i32() > 0)};
             }},
            {"Accumulate",
             [this](const Values& in) {
                 total = static_cast<std::int32_t>(static_cast<std::uint32_t>(total) +
                                                   static_cast<std::uint32_t>(in[1].as_i32()));
                 effects.push_back("Accumulate " + std::to_string(in[1].as_i32()) + " -> " + std::to_string(total));
                 return Values{};
             }},
            {"Length",
             [this](const Values& in) {
                 effects.push_back("Length \"" + in[1].as_text() + "\"");
                 return Values{Value::i32(static_cast<std::int32_t>(in[1].as_text().size()))};
             }},
        };
    }

    /// New Calc object; the returned dual interface holds the only reference.
    automation::DualInterface make() {
        com::ObjectId obj = rt.create_object(b.clsid("Calc"));
        rt.make_interface(obj, com::iid_unknown(), {});
        automation::DualInterface d = automation::make_dual(b, obj, "ICalc", impls());
        d.ref = rt.activate(obj, b.iid("ICalc"));
        return d;
    }
};

}  // namespace mlidl::test
