#include "mlidl/idl/parser.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <set>

#include "mlidl/idl/resolve.hpp"

namespace mlidl::idl {

namespace {

// Attributes that only make sense for RPC distribution. They are rejected
// rather than skipped so that an input written for full MIDL fails loudly.
const std::set<std::string, std::less<>> kRpcAttributes{
    "endpoint",     "version",         "broadcast",       "idempotent", "maybe",
    "context_handle", "transmit_as",   "auto_handle",     "implicit_handle",
    "explicit_handle", "comm_status",  "fault_status",    "call_as",    "uuid",
};

struct RawAttr {
    std::string name;
    std::optional<std::string> arg;
    SourceLoc loc;
};

std::string join(std::initializer_list<std::string_view> items) {
    std::string out;
    for (auto it = items.begin(); it != items.end(); ++it) {
        if (it != items.begin()) out += ", ";
        out += *it;
    }
    return out;
}

class Parser {
public:
    Parser(const std::vector<Token>& tokens, std::string file) : toks_(tokens), file_(std::move(file)) {}

    IdlUnit run() {
        IdlUnit unit;
        unit.source_name = file_;
        while (!at_end()) unit.decls.push_back(top_level_decl());
        check_unit(unit);
        return unit;
    }

private:
    // ---- token plumbing -------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }

    const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
    }

    SourceLoc loc() const {
        if (const Token* t = peek()) return {file_, t->line, t->col};
        if (!toks_.empty()) {
            const Token& last = toks_.back();
            return {file_, last.line, last.col + static_cast<int>(last.text.size())};
        }
        return {file_, 1, 1};
    }

    std::string found() const {
        if (const Token* t = peek()) return "'" + t->text + "'";
        return "end of input";
    }

    [[noreturn]] void expected(std::initializer_list<std::string_view> what) const {
        throw IdlError(IdlErrorKind::parse, loc(), "expected one of {" + join(what) + "}, found " + found());
    }

    [[noreturn]] void fail(const SourceLoc& at, const std::string& message) const {
        throw IdlError(IdlErrorKind::parse, at, message);
    }

    bool next_is_punct(std::string_view p, std::size_t ahead = 0) const {
        const Token* t = peek(ahead);
        return t && t->is_punct(p);
    }
    bool next_is_keyword(std::string_view k, std::size_t ahead = 0) const {
        const Token* t = peek(ahead);
        return t && t->is_keyword(k);
    }
    bool next_is(TokenKind kind, std::size_t ahead = 0) const {
        const Token* t = peek(ahead);
        return t && t->kind == kind;
    }

    bool accept_punct(std::string_view p) {
        if (!next_is_punct(p)) return false;
        ++pos_;
        return true;
    }
    bool accept_keyword(std::string_view k) {
        if (!next_is_keyword(k)) return false;
        ++pos_;
        return true;
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) expected({std::string("'").append(p).append("'")});
    }

    const Token& expect(TokenKind kind) {
        if (!next_is(kind)) expected({to_string(kind)});
        return toks_[pos_++];
    }

    // ---- declarations ---------------------------------------------------

    Decl top_level_decl() {
        const Token* t = peek();
        if (t->is(TokenKind::ident, "sml_name") && next_is_punct("(", 1)) return annotation();
        if (t->is_keyword("typedef")) return as_decl(typedef_decl());
        if (t->is_keyword("const")) return as_decl(const_decl());
        if ((t->is_keyword("struct") || t->is_keyword("enum")) && starts_definition())
            return as_decl(tagged_definition());
        if (t->is_punct("[") || t->is_keyword("interface")) return interface_decl();
        expected({"typedef", "const", "struct", "enum", "interface", "'['", "sml_name"});
    }

    static Decl as_decl(TypeDecl td) {
        return std::visit([](auto&& x) -> Decl { return std::move(x); }, std::move(td));
    }

    Decl annotation() {
        AnnotationDecl a;
        a.loc = loc();
        a.key = toks_[pos_++].text;
        expect_punct("(");
        a.value = expect(TokenKind::string_literal).str;
        expect_punct(")");
        expect_punct(";");
        return a;
    }

    // `struct [TAG] {` or `enum [TAG] {` at the cursor.
    bool starts_definition() const {
        return next_is_punct("{", 1) || (next_is(TokenKind::ident, 1) && next_is_punct("{", 2));
    }

    TypeDecl tagged_definition() {
        SourceLoc at = loc();
        bool is_struct = accept_keyword("struct");
        if (!is_struct) accept_keyword("enum");
        std::string tag;
        if (next_is(TokenKind::ident)) tag = toks_[pos_++].text;
        if (tag.empty()) fail(at, "a standalone struct or enum needs a tag name");
        TypeDecl d = is_struct ? TypeDecl(record_body(tag, at)) : TypeDecl(enum_body(tag, at));
        std::visit([&](auto& x) { x.name = tag; }, d);
        expect_punct(";");
        return d;
    }

    TypeDecl typedef_decl() {
        SourceLoc at = loc();
        expect(TokenKind::keyword);  // typedef
        std::vector<RawAttr> attrs;
        if (next_is_punct("[")) attrs = attribute_list();
        bool string_attr = false;
        for (const auto& a : attrs) {
            if (a.name == "string" && !a.arg) {
                string_attr = true;
            } else {
                fail(a.loc, "attribute '" + a.name + "' is not allowed on a typedef; expected {string}");
            }
        }

        if ((next_is_keyword("struct") || next_is_keyword("enum")) && starts_definition()) {
            if (string_attr) fail(at, "[string] does not apply to a struct or enum definition");
            bool is_struct = accept_keyword("struct");
            if (!is_struct) accept_keyword("enum");
            std::string tag;
            if (next_is(TokenKind::ident)) tag = toks_[pos_++].text;
            TypeDecl d = is_struct ? TypeDecl(record_body(tag, at)) : TypeDecl(enum_body(tag, at));
            std::string name = expect(TokenKind::ident).text;
            std::visit([&](auto& x) { x.name = name; }, d);
            expect_punct(";");
            return d;
        }

        TypedefDecl td;
        td.loc = at;
        IdlType spec = type_spec();
        int stars = 0;
        while (accept_punct("*")) ++stars;
        td.name = expect(TokenKind::ident).text;
        if (accept_punct("(")) {
            // `T *NAME (params)` names a callable address returning T.
            IdlType ret = spec;
            for (int i = 1; i < stars; ++i) ret = make_pointer(std::move(ret), at);
            std::vector<ParamDecl> params = param_list_rest();
            td.type = IdlType::function(std::move(ret), std::move(params));
            if (string_attr) fail(at, "[string] does not apply to a function typedef");
        } else {
            td.type = std::move(spec);
            for (int i = 0; i < stars; ++i) td.type = make_pointer(std::move(td.type), at);
            if (string_attr) apply_string(td.type, at);
        }
        expect_punct(";");
        return td;
    }

    RecordDecl record_body(std::string tag, SourceLoc at) {
        RecordDecl r;
        r.loc = at;
        r.tag = std::move(tag);
        expect_punct("{");
        std::set<std::string, std::less<>> seen;
        while (!accept_punct("}")) {
            if (at_end()) expected({"'}'"});
            FieldDecl f;
            f.loc = loc();
            bool string_attr = false;
            if (next_is_punct("[")) {
                for (const auto& a : attribute_list()) {
                    if (a.name == "string" && !a.arg)
                        string_attr = true;
                    else
                        fail(a.loc, "attribute '" + a.name + "' is not allowed on a field; expected {string}");
                }
            }
            f.type = type_spec();
            while (accept_punct("*")) f.type = make_pointer(std::move(f.type), f.loc);
            if (string_attr) apply_string(f.type, f.loc);
            f.name = expect(TokenKind::ident).text;
            expect_punct(";");
            if (!seen.insert(f.name).second)
                throw IdlError(IdlErrorKind::duplicate_name, f.loc, "duplicate field '" + f.name + "'");
            r.fields.push_back(std::move(f));
        }
        if (r.fields.empty()) fail(at, "struct has no fields");
        return r;
    }

    EnumDecl enum_body(std::string tag, SourceLoc at) {
        EnumDecl e;
        e.loc = at;
        e.tag = std::move(tag);
        expect_punct("{");
        std::uint32_t next_value = 0;
        while (!accept_punct("}")) {
            Enumerator v;
            SourceLoc vloc = loc();
            v.name = expect(TokenKind::ident).text;
            if (accept_punct("=")) {
                v.explicit_value = true;
                bool negative = accept_punct("-");
                if (next_is(TokenKind::word_literal)) {
                    if (negative) fail(vloc, "word literals cannot be negated");
                    v.word_form = true;
                    v.value = toks_[pos_++].value;
                } else if (next_is(TokenKind::int_literal)) {
                    std::uint32_t raw = toks_[pos_++].value;
                    if (negative && raw > 0x80000000u) fail(vloc, "enum value does not fit in 32 bits");
                    v.value = negative ? static_cast<std::uint32_t>(0u - raw) : raw;
                } else {
                    expected({"integer literal", "word literal"});
                }
            } else {
                v.value = next_value;
            }
            next_value = v.value + 1;
            e.variants.push_back(std::move(v));
            if (!accept_punct(",")) {
                expect_punct("}");
                break;
            }
        }
        if (e.variants.empty()) fail(at, "enum has no variants");
        return e;
    }

    TypeDecl const_decl() {
        ConstDecl c;
        c.loc = loc();
        expect(TokenKind::keyword);  // const
        c.type = type_spec();
        c.type.is_const = true;
        while (accept_punct("*")) c.type = make_pointer(std::move(c.type), c.loc);
        c.name = expect(TokenKind::ident).text;
        expect_punct("=");
        if (next_is(TokenKind::string_literal)) {
            c.value = toks_[pos_++].str;
        } else if (next_is(TokenKind::word_literal)) {
            c.value = toks_[pos_++].value;
        } else {
            bool negative = accept_punct("-");
            if (!next_is(TokenKind::int_literal) && !next_is(TokenKind::char_literal))
                expected({"string literal", "integer literal", "word literal", "character literal"});
            std::int64_t v = toks_[pos_++].value;
            c.value = negative ? -v : v;
        }
        expect_punct(";");
        return c;
    }

    Decl interface_decl() {
        InterfaceDecl iface;
        iface.loc = loc();
        if (next_is_punct("[")) {
            for (const auto& a : attribute_list()) {
                if (a.name == "sml_source" && a.arg) {
                    iface.sml_source = a.arg;
                } else {
                    fail(a.loc, "attribute '" + a.name + "' is not allowed on an interface; expected {sml_source}");
                }
            }
        }
        if (!accept_keyword("interface")) expected({"interface"});
        iface.name = expect(TokenKind::ident).text;
        if (accept_punct(":")) iface.parent = expect(TokenKind::ident).text;
        expect_punct("{");
        while (!accept_punct("}")) {
            if (at_end()) expected({"'}'"});
            interface_member(iface);
        }
        accept_punct(";");
        return iface;
    }

    void interface_member(InterfaceDecl& iface) {
        if (next_is_keyword("typedef")) {
            iface.members.push_back(typedef_decl());
        } else if (next_is_keyword("const") && const_member_ahead()) {
            iface.members.push_back(const_decl());
        } else if ((next_is_keyword("struct") || next_is_keyword("enum")) && starts_definition()) {
            iface.members.push_back(tagged_definition());
        } else {
            iface.ops.push_back(op_decl());
        }
    }

    // Distinguishes `const T NAME = lit;` from an operation returning const T.
    bool const_member_ahead() const {
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            if (toks_[i].is_punct("=")) return true;
            if (toks_[i].is_punct("(") || toks_[i].is_punct(";")) return false;
        }
        return false;
    }

    OpDecl op_decl() {
        OpDecl op;
        op.loc = loc();
        op.ret = type_spec();
        while (accept_punct("*")) op.ret = make_pointer(std::move(op.ret), op.loc);
        op.name = expect(TokenKind::ident).text;
        expect_punct("(");
        op.params = param_list_rest();
        expect_punct(";");
        return op;
    }

    // Parses parameters after the opening parenthesis, through ')'.
    std::vector<ParamDecl> param_list_rest() {
        std::vector<ParamDecl> params;
        if (accept_punct(")")) return params;
        if (next_is_keyword("void") && next_is_punct(")", 1)) {
            pos_ += 2;
            return params;
        }
        std::set<std::string, std::less<>> seen;
        for (;;) {
            ParamDecl p = param();
            if (!seen.insert(p.name).second)
                throw IdlError(IdlErrorKind::duplicate_name, p.loc, "duplicate parameter '" + p.name + "'");
            params.push_back(std::move(p));
            if (accept_punct(")")) break;
            if (!accept_punct(",")) expected({"','", "')'"});
        }
        return params;
    }

    ParamDecl param() {
        ParamDecl p;
        p.loc = loc();
        std::vector<RawAttr> attrs;
        if (next_is_punct("[")) attrs = attribute_list();

        p.type = type_spec();
        for (;;) {
            if (accept_punct("*")) {
                p.type = make_pointer(std::move(p.type), p.loc);
            } else if (accept_punct("&")) {
                p.type = make_pointer(std::move(p.type), p.loc);
                p.type.is_ref = true;
            } else {
                break;
            }
        }
        p.name = expect(TokenKind::ident).text;

        bool in = false, out = false;
        for (const auto& a : attrs) {
            if (a.name == "in" && !a.arg) {
                in = true;
            } else if (a.name == "out" && !a.arg) {
                out = true;
            } else if (a.name == "ref" && !a.arg) {
                p.attrs.ref = true;
            } else if (a.name == "string" && !a.arg) {
                p.attrs.string = true;
            } else if (a.name == "size_is" && a.arg) {
                p.attrs.size_is = a.arg;
            } else if (a.name == "iid_is" && a.arg) {
                p.attrs.iid_is = a.arg;
            } else {
                fail(a.loc, "attribute '" + a.name +
                                "' is not allowed on a parameter; expected {in, out, ref, string, size_is(name), iid_is(name)}");
            }
        }
        p.dir = (in && out) ? Direction::inout : out ? Direction::out : Direction::in;
        if ((p.dir != Direction::in || p.attrs.ref) && p.type.kind != IdlType::Kind::ptr)
            fail(p.loc, "parameter '" + p.name + "' must be a pointer to carry [out] or [ref]");
        if (p.attrs.string) apply_string(p.type, p.loc);
        if (p.attrs.size_is) {
            if (p.type.kind != IdlType::Kind::ptr)
                fail(p.loc, "[size_is] requires a pointer parameter");
            p.type = IdlType::array_of(p.type.pointee(), *p.attrs.size_is);
        }
        return p;
    }

    std::vector<RawAttr> attribute_list() {
        std::vector<RawAttr> attrs;
        expect_punct("[");
        for (;;) {
            RawAttr a;
            a.loc = loc();
            if (next_is(TokenKind::ident)) {
                a.name = toks_[pos_++].text;
            } else {
                expected({"attribute name"});
            }
            if (kRpcAttributes.count(a.name)) {
                std::string msg = "attribute '" + a.name + "' belongs to RPC distribution and is not part of this dialect";
                if (a.name == "uuid") msg += "; supply interface and class identifiers through the manifest";
                fail(a.loc, msg);
            }
            if (accept_punct("(")) {
                if (next_is(TokenKind::ident) || next_is(TokenKind::string_literal)) {
                    const Token& t = toks_[pos_++];
                    a.arg = t.kind == TokenKind::string_literal ? t.str : t.text;
                } else {
                    expected({"identifier", "string literal"});
                }
                expect_punct(")");
            }
            attrs.push_back(std::move(a));
            if (accept_punct("]")) break;
            if (!accept_punct(",")) expected({"','", "']'"});
        }
        return attrs;
    }

    // ---- types ----------------------------------------------------------

    IdlType type_spec() {
        SourceLoc at = loc();
        bool is_const = accept_keyword("const");
        IdlType t;
        const Token* tok = peek();
        if (!tok) expected({"type"});
        if (tok->kind == TokenKind::keyword) {
            const std::string& k = tok->text;
            if (k == "void") {
                t = IdlType::of_base(BaseType::void_);
            } else if (k == "int") {
                t = IdlType::of_base(BaseType::int_);
            } else if (k == "long") {
                t = IdlType::of_base(BaseType::long_);
            } else if (k == "boolean") {
                t = IdlType::of_base(BaseType::boolean);
            } else if (k == "char") {
                t = IdlType::of_base(BaseType::char_);
            } else if (k == "wchar_t") {
                t = IdlType::of_base(BaseType::wchar);
            } else if (k == "unsigned") {
                ++pos_;
                if (!accept_keyword("long")) accept_keyword("int");
                t = IdlType::of_base(BaseType::unsigned_long);
                t.is_const = is_const;
                return t;
            } else if (k == "float" || k == "double") {
                fail(at, "floating-point type '" + k + "' is not supported");
            } else if (k == "short") {
                fail(at, "base type 'short' is not supported (all values are word-sized)");
            } else if (k == "struct" || k == "enum") {
                ++pos_;
                t = IdlType::named_type(expect(TokenKind::ident).text);
                t.is_const = is_const;
                return t;
            } else {
                expected({"type"});
            }
            ++pos_;
        } else if (tok->kind == TokenKind::ident) {
            t = IdlType::named_type(tok->text);
            ++pos_;
        } else {
            expected({"type"});
        }
        t.is_const = is_const;
        return t;
    }

    IdlType make_pointer(IdlType pointee, const SourceLoc& at) const {
        IdlType p = IdlType::pointer_to(std::move(pointee));
        if (p.pointer_depth() > 2) fail(at, "pointer depth greater than 2 is not supported");
        return p;
    }

    void apply_string(IdlType& t, const SourceLoc& at) const {
        if (t.kind != IdlType::Kind::ptr) fail(at, "[string] requires a pointer type");
        const IdlType& pointee = t.pointee();
        bool chars = pointee.kind == IdlType::Kind::base &&
                     (pointee.base == BaseType::char_ || pointee.base == BaseType::wchar);
        if (!chars) fail(at, "[string] requires char* or wchar_t*");
        t.is_string = true;
    }

    // ---- unit-level checks ----------------------------------------------

    void check_unit(const IdlUnit& unit) const {
        std::map<std::string, SourceLoc, std::less<>> types, values, interfaces;
        int sml_names = 0;

        auto claim = [](auto& table, const std::string& name, const SourceLoc& at, const char* what) {
            if (name.empty()) return;
            auto [it, fresh] = table.emplace(name, at);
            if (!fresh)
                throw IdlError(IdlErrorKind::duplicate_name, at,
                               std::string("duplicate ") + what + " '" + name + "' (first declared at line " +
                                   std::to_string(it->second.line) + ")");
        };
        auto claim_type_decl = [&](const TypeDecl& td) {
            std::visit([&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, ConstDecl>) {
                    claim(values, d.name, d.loc, "value");
                } else {
                    claim(types, d.name, d.loc, "type");
                    if constexpr (std::is_same_v<T, EnumDecl>) {
                        for (const auto& v : d.variants) claim(values, v.name, d.loc, "value");
                    }
                    if constexpr (!std::is_same_v<T, TypedefDecl>) {
                        if (!d.tag.empty() && d.tag != d.name) claim(types, d.tag, d.loc, "type");
                    }
                }
            }, td);
        };

        for (const auto& d : unit.decls) {
            if (const auto* a = std::get_if<AnnotationDecl>(&d)) {
                if (++sml_names > 1)
                    throw IdlError(IdlErrorKind::duplicate_name, a->loc, "a unit may carry only one sml_name annotation");
            } else if (const auto* i = std::get_if<InterfaceDecl>(&d)) {
                claim(interfaces, i->name, i->loc, "interface");
                claim(types, i->name, i->loc, "type");
                std::map<std::string, SourceLoc, std::less<>> ops;
                for (const auto& m : i->members) claim_type_decl(m);
                for (const auto& op : i->ops) claim(ops, op.name, op.loc, "operation");
            } else {
                std::visit([&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (!std::is_same_v<T, InterfaceDecl> && !std::is_same_v<T, AnnotationDecl>)
                        claim_type_decl(TypeDecl(x));
                }, d);
            }
        }
    }

    const std::vector<Token>& toks_;
    std::string file_;
    std::size_t pos_ = 0;
};

}  // namespace

IdlUnit parse_unit(const std::vector<Token>& tokens, const std::string& source_name) {
    return Parser(tokens, source_name).run();
}

IdlUnit parse_text(std::string_view text, const std::string& source_name) {
    return parse_unit(tokenize(text, source_name), source_name);
}

IdlUnit load_unit(std::string_view text, const std::string& source_name) {
    return resolve(parse_text(text, source_name));
}

}  // namespace mlidl::idl
