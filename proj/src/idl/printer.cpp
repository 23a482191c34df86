#include "mlidl/idl/printer.hpp"

#include <cstdio>
#include <sstream>

namespace mlidl::idl {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\0': out += "\\0"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

std::string word_literal(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0wx%08x", v);
    return buf;
}

// C declarator: base spec, then pointer marks innermost first, then name.
std::string declarator(const IdlType& t, const std::string& name) {
    std::vector<const IdlType*> chain;
    const IdlType* cur = &t;
    while (cur->kind == IdlType::Kind::ptr || cur->kind == IdlType::Kind::array) {
        chain.push_back(cur);
        cur = &cur->pointee();
    }
    std::string out = cur->is_const ? "const " : "";
    out += cur->kind == IdlType::Kind::named ? cur->name : to_string(cur->base);
    std::string marks;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) marks += (*it)->is_ref ? "&" : "*";
    if (!marks.empty() || !name.empty()) out += " ";
    return out + marks + name;
}

std::string param_attrs(const ParamDecl& p) {
    std::vector<std::string> attrs;
    switch (p.dir) {
    case Direction::in: attrs.emplace_back("in"); break;
    case Direction::out: attrs.emplace_back("out"); break;
    case Direction::inout: attrs.emplace_back("in"); attrs.emplace_back("out"); break;
    }
    if (p.attrs.ref) attrs.emplace_back("ref");
    if (p.attrs.string) attrs.emplace_back("string");
    if (p.attrs.size_is) attrs.push_back("size_is (" + *p.attrs.size_is + ")");
    if (p.attrs.iid_is) attrs.push_back("iid_is (" + *p.attrs.iid_is + ")");
    std::string out = "[";
    for (std::size_t i = 0; i < attrs.size(); ++i) out += (i ? "," : "") + attrs[i];
    return out + "]";
}

std::string params_text(const std::vector<ParamDecl>& params) {
    std::string out = "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ", ";
        out += param_attrs(params[i]) + " " + declarator(params[i].type, params[i].name);
    }
    return out + ")";
}

class Printer {
public:
    std::string run(const IdlUnit& unit) {
        for (const auto& d : unit.decls) {
            std::visit([&](const auto& x) { print(x, ""); }, d);
        }
        return out_.str();
    }

private:
    void print(const AnnotationDecl& a, const std::string& indent) {
        out_ << indent << a.key << " (" << quote(a.value) << ");\n\n";
    }

    void print(const TypedefDecl& d, const std::string& indent) {
        out_ << indent << "typedef ";
        if (d.type.kind == IdlType::Kind::func) {
            const IdlType& ret = d.type.inner.front();
            out_ << declarator(ret, "*" + d.name) << " " << params_text(d.type.params);
        } else {
            if (d.type.is_string) out_ << "[string] ";
            out_ << declarator(d.type, d.name);
        }
        out_ << ";\n\n";
    }

    void print(const RecordDecl& r, const std::string& indent) {
        bool standalone = r.tag == r.name;
        out_ << indent << (standalone ? "struct " : "typedef struct ");
        if (!r.tag.empty()) out_ << r.tag << " ";
        out_ << "{\n";
        for (const auto& f : r.fields) {
            out_ << indent << "    ";
            if (f.type.is_string) out_ << "[string] ";
            out_ << declarator(f.type, f.name) << ";\n";
        }
        out_ << indent << "}";
        if (!standalone) out_ << " " << r.name;
        out_ << ";\n\n";
    }

    void print(const EnumDecl& e, const std::string& indent) {
        bool standalone = e.tag == e.name;
        out_ << indent << (standalone ? "enum " : "typedef enum ");
        if (!e.tag.empty()) out_ << e.tag << " ";
        out_ << "{\n";
        for (std::size_t i = 0; i < e.variants.size(); ++i) {
            const Enumerator& v = e.variants[i];
            out_ << indent << "    " << v.name;
            if (v.explicit_value) out_ << " = " << (v.word_form ? word_literal(v.value) : std::to_string(v.value));
            out_ << (i + 1 < e.variants.size() ? ",\n" : "\n");
        }
        out_ << indent << "}";
        if (!standalone) out_ << " " << e.name;
        out_ << ";\n\n";
    }

    void print(const ConstDecl& c, const std::string& indent) {
        out_ << indent << declarator(c.type, c.name) << " = ";
        std::visit([&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>)
                out_ << quote(v);
            else if constexpr (std::is_same_v<T, std::uint32_t>)
                out_ << word_literal(v);
            else
                out_ << v;
        }, c.value);
        out_ << ";\n\n";
    }

    void print(const InterfaceDecl& i, const std::string& indent) {
        if (i.sml_source) out_ << indent << "[sml_source (" << quote(*i.sml_source) << ")]\n";
        out_ << indent << "interface " << i.name;
        if (i.parent) out_ << " : " << *i.parent;
        out_ << " {\n";
        std::string inner = indent + "    ";
        for (const auto& m : i.members) std::visit([&](const auto& x) { print(x, inner); }, m);
        for (const auto& op : i.ops)
            out_ << inner << declarator(op.ret, op.name) << " " << params_text(op.params) << ";\n";
        out_ << indent << "};\n\n";
    }

    std::ostringstream out_;
};

}  // namespace

std::string type_to_string(const IdlType& t) {
    if (t.kind == IdlType::Kind::func)
        return declarator(t.inner.front(), "*") + " " + params_text(t.params);
    return declarator(t, "");
}

std::string pretty_print(const IdlUnit& unit) {
    return Printer().run(unit);
}

}  // namespace mlidl::idl
