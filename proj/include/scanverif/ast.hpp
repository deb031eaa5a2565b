#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scanverif/diag.hpp"
#include "scanverif/types.hpp"

namespace scanverif {

enum class ExprKind : std::uint8_t {
    IntConst,   // decimal or 16# literal, type resolved by context
    BoolConst,  // TRUE / FALSE
    VarRef,
    Index,   // base[index]
    BitSel,  // base.%Xb
    Not,
    And,
    Or,
    Xor,
    Eq,
    Neq,
    Old,  // OLD(var), requirements only
};

// Array index / bit selector: an integer literal or a FOR-loop variable.
struct ConstOrLoopVar {
    bool is_var = false;
    int value = 0;
    std::string var;

    bool operator==(const ConstOrLoopVar& o) const {
        return is_var == o.is_var && (is_var ? var == o.var : value == o.value);
    }
};

struct Expr {
    ExprKind kind;
    SourceLoc loc;
    DataType type;  // filled by the typechecker

    std::uint32_t int_value = 0;  // IntConst
    bool is_hex = false;          // IntConst written with 16#
    bool bool_value = false;      // BoolConst
    std::string name;             // VarRef / Old
    ConstOrLoopVar sel;           // Index / BitSel selector
    std::unique_ptr<Expr> a, b;   // children (unary ops use a)

    // Declaration index within the owning POU, assigned by the typechecker
    // for VarRef/Old nodes. -1 = unresolved.
    int slot = -1;

    explicit Expr(ExprKind k, SourceLoc l = {}) : kind(k), loc(l) {}

    std::unique_ptr<Expr> clone() const {
        auto e = std::make_unique<Expr>(kind, loc);
        e->type = type;
        e->int_value = int_value;
        e->is_hex = is_hex;
        e->bool_value = bool_value;
        e->name = name;
        e->sel = sel;
        if (a)
            e->a = a->clone();
        if (b)
            e->b = b->clone();
        return e;
    }

    bool structurally_equal(const Expr& o) const {
        if (kind != o.kind || int_value != o.int_value || bool_value != o.bool_value ||
            name != o.name || !(sel == o.sel))
            return false;
        if ((a == nullptr) != (o.a == nullptr) || (b == nullptr) != (o.b == nullptr))
            return false;
        if (a && !a->structurally_equal(*o.a))
            return false;
        if (b && !b->structurally_equal(*o.b))
            return false;
        return true;
    }
};

using ExprPtr = std::unique_ptr<Expr>;

inline ExprPtr mk_int(std::uint32_t v, bool hex = false, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::IntConst, loc);
    e->int_value = v;
    e->is_hex = hex;
    return e;
}
inline ExprPtr mk_bool(bool v, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::BoolConst, loc);
    e->bool_value = v;
    return e;
}
inline ExprPtr mk_var(std::string name, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::VarRef, loc);
    e->name = std::move(name);
    return e;
}
inline ExprPtr mk_old(std::string name, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::Old, loc);
    e->name = std::move(name);
    return e;
}
inline ExprPtr mk_unary(ExprKind k, ExprPtr a, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(k, loc);
    e->a = std::move(a);
    return e;
}
inline ExprPtr mk_binary(ExprKind k, ExprPtr a, ExprPtr b, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(k, loc);
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
inline ExprPtr mk_not(ExprPtr a) { return mk_unary(ExprKind::Not, std::move(a)); }
inline ExprPtr mk_and(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::And, std::move(a), std::move(b)); }
inline ExprPtr mk_or(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Or, std::move(a), std::move(b)); }
inline ExprPtr mk_eq(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Eq, std::move(a), std::move(b)); }
inline ExprPtr mk_index(ExprPtr base, ConstOrLoopVar sel, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::Index, loc);
    e->a = std::move(base);
    e->sel = sel;
    return e;
}
inline ExprPtr mk_bitsel(ExprPtr base, ConstOrLoopVar sel, SourceLoc loc = {}) {
    auto e = std::make_unique<Expr>(ExprKind::BitSel, loc);
    e->a = std::move(base);
    e->sel = sel;
    return e;
}

enum class Section : std::uint8_t { Input, Output, InOut, Static, Temp, Config };

inline const char* section_name(Section s) {
    switch (s) {
    case Section::Input: return "INPUT";
    case Section::Output: return "OUTPUT";
    case Section::InOut: return "IN_OUT";
    case Section::Static: return "STATIC";
    case Section::Temp: return "TEMP";
    case Section::Config: return "CONFIG";
    }
    return "?";
}

struct VarDecl {
    std::string name;
    DataType dtype;
    Section section = Section::Temp;
    std::optional<Value> init;
    std::string original_name;  // pre-normalization alias, informational
    SourceLoc loc;
};

enum class StmtKind : std::uint8_t { Assign, If, For, Call, Assert };

struct Stmt;

struct IfBranch {
    ExprPtr cond;
    std::vector<Stmt> body;
};

struct CallBinding {
    std::string param;
    bool is_output = false;  // param => lvalue (outputs) vs param := expr (inputs)
    ExprPtr expr;            // rhs for inputs, lvalue for outputs/inouts
    SourceLoc loc;
};

struct Stmt {
    StmtKind kind;
    SourceLoc loc;

    // Assign
    ExprPtr lhs, rhs;
    // If
    std::vector<IfBranch> branches;
    std::vector<Stmt> else_body;
    // For
    std::string loop_var;
    ExprPtr lo_expr, hi_expr;
    int lo = 0, hi = -1;  // folded by the typechecker
    std::vector<Stmt> body;
    // Call
    std::string callee;
    std::vector<CallBinding> bindings;
    int call_id = -1;  // per-program ordinal, assigned by the typechecker
    // Assert
    std::string req_id;

    explicit Stmt(StmtKind k, SourceLoc l = {}) : kind(k), loc(l) {}

    Stmt(Stmt&&) = default;
    Stmt& operator=(Stmt&&) = default;

    Stmt clone() const {
        Stmt s(kind, loc);
        if (lhs)
            s.lhs = lhs->clone();
        if (rhs)
            s.rhs = rhs->clone();
        for (const auto& br : branches) {
            IfBranch nb;
            nb.cond = br.cond->clone();
            for (const auto& st : br.body)
                nb.body.push_back(st.clone());
            s.branches.push_back(std::move(nb));
        }
        for (const auto& st : else_body)
            s.else_body.push_back(st.clone());
        s.loop_var = loop_var;
        if (lo_expr)
            s.lo_expr = lo_expr->clone();
        if (hi_expr)
            s.hi_expr = hi_expr->clone();
        s.lo = lo;
        s.hi = hi;
        for (const auto& st : body)
            s.body.push_back(st.clone());
        s.callee = callee;
        for (const auto& bnd : bindings) {
            CallBinding nb;
            nb.param = bnd.param;
            nb.is_output = bnd.is_output;
            nb.expr = bnd.expr ? bnd.expr->clone() : nullptr;
            nb.loc = bnd.loc;
            s.bindings.push_back(std::move(nb));
        }
        s.call_id = call_id;
        s.req_id = req_id;
        return s;
    }

    bool structurally_equal(const Stmt& o) const;
};

inline bool bodies_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].structurally_equal(b[i]))
            return false;
    return true;
}

inline bool Stmt::structurally_equal(const Stmt& o) const {
    if (kind != o.kind)
        return false;
    auto expr_eq = [](const ExprPtr& x, const ExprPtr& y) {
        if ((x == nullptr) != (y == nullptr))
            return false;
        return !x || x->structurally_equal(*y);
    };
    switch (kind) {
    case StmtKind::Assign:
        return expr_eq(lhs, o.lhs) && expr_eq(rhs, o.rhs);
    case StmtKind::If: {
        if (branches.size() != o.branches.size())
            return false;
        for (size_t i = 0; i < branches.size(); ++i) {
            if (!expr_eq(branches[i].cond, o.branches[i].cond) ||
                !bodies_equal(branches[i].body, o.branches[i].body))
                return false;
        }
        return bodies_equal(else_body, o.else_body);
    }
    case StmtKind::For:
        return loop_var == o.loop_var && expr_eq(lo_expr, o.lo_expr) &&
               expr_eq(hi_expr, o.hi_expr) && bodies_equal(body, o.body);
    case StmtKind::Call: {
        if (callee != o.callee || bindings.size() != o.bindings.size())
            return false;
        for (size_t i = 0; i < bindings.size(); ++i) {
            if (bindings[i].param != o.bindings[i].param ||
                bindings[i].is_output != o.bindings[i].is_output ||
                !expr_eq(bindings[i].expr, o.bindings[i].expr))
                return false;
        }
        return true;
    }
    case StmtKind::Assert:
        return req_id == o.req_id;
    }
    return false;
}

enum class PouKind : std::uint8_t { FC, FB };

struct Pou {
    std::string name;
    PouKind kind = PouKind::FC;
    std::vector<VarDecl> decls;
    std::vector<Stmt> body;
    SourceLoc loc;

    const VarDecl* find_decl(const std::string& n) const {
        for (const auto& d : decls)
            if (d.name == n)
                return &d;
        return nullptr;
    }
};

enum class ReqOrigin : std::uint8_t { InlineComment, Template, Manifest };

// A named BOOL assertion bound to a program point. Requirements attached to a
// statement appear as Assert statements in the body; end-of-body requirements
// are evaluated after the last statement of each cycle.
struct Requirement {
    std::string id;
    ExprPtr expr;
    ReqOrigin origin = ReqOrigin::Manifest;
    std::string raw_text;
    SourceLoc loc;
    bool uses_old = false;  // set by the typechecker
};

struct Program {
    std::vector<Pou> pous;
    std::string entry_name;  // empty = resolve by default rule
    std::vector<Requirement> requirements;
    std::string source_path;

    const Pou* find_pou(const std::string& n) const {
        for (const auto& p : pous)
            if (p.name == n)
                return &p;
        return nullptr;
    }
    Pou* find_pou(const std::string& n) {
        for (auto& p : pous)
            if (p.name == n)
                return &p;
        return nullptr;
    }
    const Requirement* find_requirement(const std::string& id) const {
        for (const auto& r : requirements)
            if (r.id == id)
                return &r;
        return nullptr;
    }

    bool structurally_equal(const Program& o) const {
        if (pous.size() != o.pous.size())
            return false;
        for (size_t i = 0; i < pous.size(); ++i) {
            const Pou& x = pous[i];
            const Pou& y = o.pous[i];
            if (x.name != y.name || x.kind != y.kind || x.decls.size() != y.decls.size())
                return false;
            for (size_t j = 0; j < x.decls.size(); ++j) {
                const VarDecl& dx = x.decls[j];
                const VarDecl& dy = y.decls[j];
                if (dx.name != dy.name || dx.dtype != dy.dtype || dx.section != dy.section ||
                    dx.init.has_value() != dy.init.has_value())
                    return false;
                if (dx.init && *dx.init != *dy.init)
                    return false;
            }
            if (!bodies_equal(x.body, y.body))
                return false;
        }
        return true;
    }
};

}  // namespace scanverif
