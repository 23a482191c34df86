#include "mlidl/idl/resolve.hpp"

#include <set>

namespace mlidl::idl {

std::optional<Predeclared> predeclared(std::string_view name) {
    if (name == "UINT") return Predeclared::uint;
    if (name == "DWORD") return Predeclared::dword;
    if (name == "LPVOID") return Predeclared::lpvoid;
    if (name == "HRESULT") return Predeclared::hresult;
    if (name == "IID" || name == "REFIID") return Predeclared::iid;
    if (name == "CLSID") return Predeclared::clsid;
    if (name == "IUnknown") return Predeclared::iunknown;
    if (name == "IDispatch") return Predeclared::idispatch;
    return std::nullopt;
}

SymbolTable::SymbolTable(const IdlUnit& unit) {
    auto add = [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TypedefDecl>) {
            types_.emplace(d.name, &d);
        } else if constexpr (std::is_same_v<T, RecordDecl> || std::is_same_v<T, EnumDecl>) {
            types_.emplace(d.name, &d);
            if (!d.tag.empty()) types_.emplace(d.tag, &d);
        } else if constexpr (std::is_same_v<T, InterfaceDecl>) {
            interfaces_.emplace(d.name, &d);
            types_.emplace(d.name, &d);
        }
    };
    for (const auto& d : unit.decls) {
        std::visit(add, d);
        if (const auto* i = std::get_if<InterfaceDecl>(&d))
            for (const auto& m : i->members) std::visit(add, m);
    }
}

std::optional<SymbolTable::TypeEntry> SymbolTable::find_type(std::string_view name) const {
    if (auto it = types_.find(name); it != types_.end()) return it->second;
    return std::nullopt;
}

const InterfaceDecl* SymbolTable::find_interface(std::string_view name) const {
    if (auto it = interfaces_.find(name); it != interfaces_.end()) return it->second;
    return nullptr;
}

const IdlType& SymbolTable::strip_aliases(const IdlType& t) const {
    const IdlType* cur = &t;
    for (std::size_t guard = 0; guard <= types_.size() && cur->kind == IdlType::Kind::named; ++guard) {
        auto entry = find_type(cur->name);
        if (!entry) break;
        const auto* td = std::get_if<const TypedefDecl*>(&*entry);
        if (!td) break;
        cur = &(*td)->type;
    }
    return *cur;
}

bool SymbolTable::is_integer(const IdlType& t) const {
    const IdlType& s = strip_aliases(t);
    if (s.kind == IdlType::Kind::base)
        return s.base != BaseType::void_ && s.base != BaseType::boolean;
    if (s.kind != IdlType::Kind::named) return false;
    if (auto entry = find_type(s.name)) return std::holds_alternative<const EnumDecl*>(*entry);
    auto pre = predeclared(s.name);
    return pre == Predeclared::uint || pre == Predeclared::dword || pre == Predeclared::hresult;
}

bool SymbolTable::is_iid(const IdlType& t) const {
    const IdlType* s = &strip_aliases(t);
    if (s->kind == IdlType::Kind::ptr) s = &strip_aliases(s->pointee());
    return s->kind == IdlType::Kind::named && !find_type(s->name) && predeclared(s->name) == Predeclared::iid;
}

namespace {

class Resolver {
public:
    explicit Resolver(const IdlUnit& unit) : unit_(unit), symbols_(unit) {}

    void run() {
        for (const auto& d : unit_.decls) {
            std::visit([&](const auto& x) { check(x); }, d);
        }
        check_alias_cycles();
    }

private:
    [[noreturn]] static void fail(IdlErrorKind kind, const SourceLoc& at, const std::string& msg) {
        throw IdlError(kind, at, msg);
    }

    void check(const AnnotationDecl&) {}

    void check(const TypedefDecl& d) { check_type(d.type, d.loc); }

    void check(const RecordDecl& d) {
        for (const auto& f : d.fields) {
            check_type(f.type, f.loc);
            if (f.type.kind == IdlType::Kind::func) fail(IdlErrorKind::parse, f.loc, "function types may only appear in typedefs");
        }
    }

    void check(const EnumDecl&) {}

    void check(const ConstDecl& d) { check_type(d.type, d.loc); }

    void check(const TypeDecl& td) {
        std::visit([&](const auto& x) { check(x); }, td);
    }

    void check(const InterfaceDecl& d) {
        if (d.parent) {
            if (!symbols_.find_interface(*d.parent)) {
                auto pre = predeclared(*d.parent);
                if (pre != Predeclared::iunknown && pre != Predeclared::idispatch)
                    fail(IdlErrorKind::unresolved_type, d.loc,
                         "interface '" + d.name + "' inherits from unknown interface '" + *d.parent + "'");
            }
            check_acyclic(d);
        }
        for (const auto& m : d.members) check(m);
        for (const auto& op : d.ops) {
            check_type(op.ret, op.loc);
            check_params(op.params);
        }
    }

    void check_acyclic(const InterfaceDecl& start) {
        std::set<std::string> seen{start.name};
        const InterfaceDecl* cur = &start;
        while (cur->parent) {
            const InterfaceDecl* next = symbols_.find_interface(*cur->parent);
            if (!next) return;  // predeclared root
            if (!seen.insert(next->name).second)
                fail(IdlErrorKind::inheritance_cycle, start.loc,
                     "interface '" + start.name + "' is part of an inheritance cycle through '" + next->name + "'");
            cur = next;
        }
    }

    void check_params(const std::vector<ParamDecl>& params) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const ParamDecl& p = params[i];
            check_type(p.type, p.loc);
            if (p.attrs.size_is) {
                const ParamDecl* target = find_param(params, *p.attrs.size_is);
                if (!target)
                    fail(IdlErrorKind::bad_attr_target, p.loc,
                         "size_is(" + *p.attrs.size_is + ") on '" + p.name + "' names no parameter of this operation");
                if (target == &p || !symbols_.is_integer(target->type))
                    fail(IdlErrorKind::bad_attr_target, p.loc,
                         "size_is(" + *p.attrs.size_is + ") must name an integer parameter");
            }
            if (p.attrs.iid_is) {
                std::size_t j = 0;
                while (j < i && params[j].name != *p.attrs.iid_is) ++j;
                if (j == i)
                    fail(IdlErrorKind::bad_attr_target, p.loc,
                         "iid_is(" + *p.attrs.iid_is + ") on '" + p.name + "' must name an earlier parameter");
                if (!symbols_.is_iid(params[j].type))
                    fail(IdlErrorKind::bad_attr_target, p.loc,
                         "iid_is(" + *p.attrs.iid_is + ") must name a parameter of type IID");
            }
        }
    }

    static const ParamDecl* find_param(const std::vector<ParamDecl>& params, const std::string& name) {
        for (const auto& p : params)
            if (p.name == name) return &p;
        return nullptr;
    }

    void check_type(const IdlType& t, const SourceLoc& at) {
        switch (t.kind) {
        case IdlType::Kind::base:
            return;
        case IdlType::Kind::named:
            if (!symbols_.find_type(t.name) && !predeclared(t.name))
                fail(IdlErrorKind::unresolved_type, at, "unknown type '" + t.name + "'");
            return;
        case IdlType::Kind::ptr:
        case IdlType::Kind::array:
            check_type(t.pointee(), at);
            return;
        case IdlType::Kind::func:
            check_type(t.inner.front(), at);
            check_params(t.params);
            return;
        }
    }

    void check_alias_cycles() {
        auto visit_typedef = [&](const TypedefDecl& td) {
            std::set<std::string> seen{td.name};
            const IdlType* cur = &td.type;
            while (cur->kind == IdlType::Kind::named) {
                auto entry = symbols_.find_type(cur->name);
                if (!entry) return;
                const auto* next = std::get_if<const TypedefDecl*>(&*entry);
                if (!next) return;
                if (!seen.insert((*next)->name).second)
                    fail(IdlErrorKind::unresolved_type, td.loc, "typedef '" + td.name + "' is defined in terms of itself");
                cur = &(*next)->type;
            }
        };
        for (const auto& d : unit_.decls) {
            if (const auto* td = std::get_if<TypedefDecl>(&d)) visit_typedef(*td);
            if (const auto* i = std::get_if<InterfaceDecl>(&d))
                for (const auto& m : i->members)
                    if (const auto* td = std::get_if<TypedefDecl>(&m)) visit_typedef(*td);
        }
    }

    const IdlUnit& unit_;
    SymbolTable symbols_;
};

}  // namespace

IdlUnit resolve(const IdlUnit& unit) {
    Resolver(unit).run();
    return unit;
}

}  // namespace mlidl::idl
