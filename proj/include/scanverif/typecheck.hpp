#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/diag.hpp"

namespace scanverif {

// A typechecked program: every expression annotated, names resolved, loop
// bounds folded, call sites numbered, entry POU designated.
struct TypedProgram {
    Program program;
    std::string entry;

    const Pou& entry_pou() const { return *program.find_pou(entry); }

    // Sum of CONFIG and INPUT bit widths of the entry POU (BOOL=1, WORD=16,
    // arrays multiply). Exact integer arithmetic.
    std::uint64_t log2_input_space() const {
        std::uint64_t bits = 0;
        for (const auto& d : entry_pou().decls)
            if (d.section == Section::Config || d.section == Section::Input)
                bits += d.dtype.bit_width();
        return bits;
    }
};

namespace detail {

class Typechecker {
public:
    Typechecker(Program& prog, Diagnostics& diags) : prog_(prog), diags_(diags) {}

    bool run(std::string& entry_out) {
        if (prog_.pous.empty()) {
            err({}, "program has no POU");
            return false;
        }
        build_call_graph();
        if (!check_call_graph_acyclic())
            return false;
        if (!resolve_entry(entry_out))
            return false;
        entry_ = entry_out;
        for (auto& pou : prog_.pous)
            check_pou(pou);
        // end-of-body requirements not referenced by an Assert statement are
        // checked against the entry POU
        for (auto& req : prog_.requirements) {
            if (!checked_reqs_.count(req.id))
                check_requirement(req, *prog_.find_pou(entry_));
        }
        return diags_.empty();
    }

    void check_requirement(Requirement& req, const Pou& pou) {
        checked_reqs_.insert(req.id);
        if (!req.expr) {
            err(req.loc, "requirement '" + req.id + "' has no expression");
            return;
        }
        cur_pou_ = &pou;
        build_env(pou);
        DataType t = check_expr(*req.expr, DataType::boolean(), /*allow_old=*/true);
        if (t.valid() && !t.is_bool())
            err(req.expr->loc, "requirement must be BOOL, got " + t.str());
        req.uses_old = expr_uses_old(*req.expr);
    }

private:
    static bool expr_uses_old(const Expr& e) {
        if (e.kind == ExprKind::Old)
            return true;
        if (e.a && expr_uses_old(*e.a))
            return true;
        if (e.b && expr_uses_old(*e.b))
            return true;
        return false;
    }

    void err(SourceLoc loc, const std::string& msg) { add_diag(diags_, loc, msg); }

    void build_call_graph() {
        for (const auto& pou : prog_.pous)
            collect_callees(pou.name, pou.body);
    }
    void collect_callees(const std::string& caller, const std::vector<Stmt>& body) {
        for (const auto& s : body) {
            switch (s.kind) {
            case StmtKind::Call:
                callees_[caller].insert(s.callee);
                called_.insert(s.callee);
                break;
            case StmtKind::If:
                for (const auto& br : s.branches)
                    collect_callees(caller, br.body);
                collect_callees(caller, s.else_body);
                break;
            case StmtKind::For:
                collect_callees(caller, s.body);
                break;
            default:
                break;
            }
        }
    }

    bool check_call_graph_acyclic() {
        std::set<std::string> done, active;
        bool ok = true;
        auto dfs = [&](auto&& self, const std::string& n) -> void {
            if (done.count(n) || !ok)
                return;
            active.insert(n);
            for (const auto& next : callees_[n]) {
                if (active.count(next)) {
                    err({}, "recursive call cycle through '" + next + "'");
                    ok = false;
                    return;
                }
                self(self, next);
            }
            active.erase(n);
            done.insert(n);
        };
        for (const auto& pou : prog_.pous)
            dfs(dfs, pou.name);
        return ok;
    }

    bool resolve_entry(std::string& entry_out) {
        if (!prog_.entry_name.empty()) {
            if (!prog_.find_pou(prog_.entry_name)) {
                err({}, "entry POU '" + prog_.entry_name + "' not found");
                return false;
            }
            entry_out = prog_.entry_name;
            return true;
        }
        if (prog_.pous.size() == 1) {
            entry_out = prog_.pous[0].name;
            return true;
        }
        std::vector<std::string> roots;
        for (const auto& pou : prog_.pous)
            if (!called_.count(pou.name))
                roots.push_back(pou.name);
        if (roots.size() == 1) {
            entry_out = roots[0];
            return true;
        }
        err({}, "cannot determine the cyclic entry POU; specify one explicitly");
        return false;
    }

    void build_env(const Pou& pou) {
        env_.clear();
        for (std::size_t i = 0; i < pou.decls.size(); ++i)
            env_[pou.decls[i].name] = {&pou.decls[i], static_cast<int>(i)};
        loops_.clear();
    }

    void check_pou(Pou& pou) {
        cur_pou_ = &pou;
        bool is_entry = pou.name == entry_;
        for (const auto& d : pou.decls) {
            if (pou.kind == PouKind::FC && d.section == Section::Static)
                err(d.loc, "FC '" + pou.name + "' cannot declare a VAR (static) section");
            if (d.section == Section::Config && !is_entry)
                err(d.loc, "VAR_CONFIG is only allowed on the cyclic entry POU");
            if (d.section == Section::InOut && is_entry)
                err(d.loc, "the cyclic entry POU cannot declare VAR_IN_OUT");
            if (d.init) {
                if (d.dtype.is_array())
                    err(d.loc, "array initializers are not supported");
                else if (d.init->kind != d.dtype.kind)
                    err(d.loc, "initializer type does not match '" + d.name + "' (" +
                                   d.dtype.str() + ")");
            }
        }
        build_env(pou);
        check_body(pou.body);
    }

    void check_body(std::vector<Stmt>& body) {
        for (auto& s : body)
            check_stmt(s);
    }

    void check_stmt(Stmt& s) {
        switch (s.kind) {
        case StmtKind::Assign: {
            DataType lt = check_expr(*s.lhs, DataType(), /*allow_old=*/false);
            if (!lt.valid())
                return;
            if (lt.is_array()) {
                err(s.loc, "cannot assign whole arrays");
                return;
            }
            check_lvalue(*s.lhs);
            check_expr(*s.rhs, lt, /*allow_old=*/false);
            break;
        }
        case StmtKind::If: {
            for (auto& br : s.branches) {
                check_expr(*br.cond, DataType::boolean(), false);
                check_body(br.body);
            }
            check_body(s.else_body);
            break;
        }
        case StmtKind::For: {
            if (!fold_loop_bound(*s.lo_expr, s.lo) || !fold_loop_bound(*s.hi_expr, s.hi))
                return;
            if (s.lo > s.hi) {
                err(s.loc, "loop bounds must satisfy lo <= hi");
                return;
            }
            if (env_.count(s.loop_var)) {
                err(s.loc, "loop variable '" + s.loop_var + "' shadows a declaration");
                return;
            }
            for (const auto& lv : loops_) {
                if (lv.name == s.loop_var) {
                    err(s.loc, "loop variable '" + s.loop_var + "' shadows an outer loop");
                    return;
                }
            }
            loops_.push_back({s.loop_var, s.lo, s.hi});
            check_body(s.body);
            loops_.pop_back();
            break;
        }
        case StmtKind::Call:
            check_call(s);
            break;
        case StmtKind::Assert: {
            Requirement* req = nullptr;
            for (auto& r : prog_.requirements)
                if (r.id == s.req_id)
                    req = &r;
            if (!req) {
                err(s.loc, "assertion references unknown requirement '" + s.req_id + "'");
                return;
            }
            const Pou& here = *cur_pou_;
            auto saved_env = env_;
            auto saved_loops = loops_;
            check_requirement(*req, here);
            cur_pou_ = &here;
            env_ = saved_env;
            loops_ = saved_loops;
            break;
        }
        }
    }

    void check_lvalue(const Expr& e) {
        switch (e.kind) {
        case ExprKind::VarRef: {
            auto it = env_.find(e.name);
            if (it == env_.end())
                return;  // already reported
            Section sec = it->second.first->section;
            if (sec == Section::Input || sec == Section::Config)
                err(e.loc, "cannot assign to " + std::string(section_name(sec)) +
                               " variable '" + e.name + "'");
            break;
        }
        case ExprKind::Index:
        case ExprKind::BitSel:
            check_lvalue(*e.a);
            break;
        default:
            err(e.loc, "expression is not assignable");
        }
    }

    bool fold_loop_bound(Expr& e, int& out) {
        if (e.kind == ExprKind::IntConst) {
            out = static_cast<int>(e.int_value);
            e.type = DataType::word();
            return true;
        }
        err(e.loc, "loop bound must be a compile-time integer constant");
        return false;
    }

    void check_call(Stmt& s) {
        s.call_id = next_call_id_++;
        const Pou* callee = prog_.find_pou(s.callee);
        if (!callee) {
            err(s.loc, "call to undefined POU '" + s.callee + "'");
            return;
        }
        std::set<std::string> bound;
        for (auto& b : s.bindings) {
            const VarDecl* param = callee->find_decl(b.param);
            if (!param) {
                err(b.loc, "'" + s.callee + "' has no parameter '" + b.param + "'");
                continue;
            }
            if (bound.count(b.param)) {
                err(b.loc, "parameter '" + b.param + "' bound twice");
                continue;
            }
            bound.insert(b.param);
            if (b.is_output) {
                if (param->section != Section::Output) {
                    err(b.loc, "'=>' binding requires an OUTPUT parameter");
                    continue;
                }
                DataType t = check_expr(*b.expr, param->dtype, false);
                if (t.valid())
                    check_lvalue(*b.expr);
            } else {
                if (param->section == Section::Input) {
                    check_expr(*b.expr, param->dtype, false);
                } else if (param->section == Section::InOut) {
                    DataType t = check_expr(*b.expr, param->dtype, false);
                    if (t.valid())
                        check_lvalue(*b.expr);
                } else {
                    err(b.loc, "':=' binding requires an INPUT or IN_OUT parameter");
                }
            }
        }
        for (const auto& d : callee->decls) {
            if ((d.section == Section::Input || d.section == Section::InOut) &&
                !bound.count(d.name))
                err(s.loc, "call to '" + s.callee + "' does not bind " +
                               std::string(section_name(d.section)) + " '" + d.name + "'");
        }
    }

    // Returns the expression type, annotating in place. `expected` guides
    // integer-literal resolution; a mismatch is reported here.
    DataType check_expr(Expr& e, DataType expected, bool allow_old) {
        DataType t = infer(e, expected, allow_old);
        e.type = t;
        if (t.valid() && expected.valid() && t != expected) {
            err(e.loc, "type mismatch: expected " + expected.str() + ", got " + t.str());
            return DataType();
        }
        return t;
    }

    DataType infer(Expr& e, const DataType& expected, bool allow_old) {
        switch (e.kind) {
        case ExprKind::IntConst:
            if (expected.is_bool() && e.int_value <= 1 && !e.is_hex)
                return DataType::boolean();
            return DataType::word();
        case ExprKind::BoolConst:
            return DataType::boolean();
        case ExprKind::VarRef: {
            for (const auto& lv : loops_) {
                if (lv.name == e.name) {
                    err(e.loc, "loop variable '" + e.name + "' can only be used as an index");
                    return DataType();
                }
            }
            auto it = env_.find(e.name);
            if (it == env_.end()) {
                err(e.loc, "undefined identifier '" + e.name + "'");
                return DataType();
            }
            e.slot = it->second.second;
            return it->second.first->dtype;
        }
        case ExprKind::Old: {
            if (!allow_old) {
                err(e.loc, "OLD() is only legal inside requirements");
                return DataType();
            }
            auto it = env_.find(e.name);
            if (it == env_.end()) {
                err(e.loc, "undefined identifier '" + e.name + "' in OLD()");
                return DataType();
            }
            if (it->second.first->dtype.is_array()) {
                err(e.loc, "OLD() requires a scalar variable");
                return DataType();
            }
            e.slot = it->second.second;
            return it->second.first->dtype;
        }
        case ExprKind::Index: {
            DataType base = check_expr(*e.a, DataType(), allow_old);
            if (!base.valid())
                return DataType();
            if (!base.is_array()) {
                err(e.loc, "indexing requires an array, got " + base.str());
                return DataType();
            }
            int lo, hi;
            if (!selector_range(e.sel, e.loc, lo, hi))
                return DataType();
            if (lo < base.lo || hi > base.hi) {
                err(e.loc, "index out of bounds [" + std::to_string(base.lo) + ".." +
                               std::to_string(base.hi) + "]");
                return DataType();
            }
            return *base.elem;
        }
        case ExprKind::BitSel: {
            DataType base = check_expr(*e.a, DataType(), allow_old);
            if (!base.valid())
                return DataType();
            if (!base.is_word()) {
                err(e.loc, "bit selection requires a WORD, got " + base.str());
                return DataType();
            }
            int lo, hi;
            if (!selector_range(e.sel, e.loc, lo, hi))
                return DataType();
            if (lo < 0 || hi > 15) {
                err(e.loc, "bit selector out of range 0..15");
                return DataType();
            }
            return DataType::boolean();
        }
        case ExprKind::Not: {
            DataType exp = expected.is_scalar() ? expected : DataType();
            DataType t = check_expr(*e.a, exp, allow_old);
            if (t.valid() && !t.is_scalar()) {
                err(e.loc, "NOT requires BOOL or WORD, got " + t.str());
                return DataType();
            }
            return t;
        }
        case ExprKind::And:
        case ExprKind::Or:
        case ExprKind::Xor: {
            DataType exp = expected.is_scalar() ? expected : DataType();
            DataType lt, rt;
            if (e.a->kind == ExprKind::IntConst && e.b->kind != ExprKind::IntConst) {
                rt = check_expr(*e.b, exp, allow_old);
                lt = check_expr(*e.a, rt.valid() ? rt : exp, allow_old);
            } else {
                lt = check_expr(*e.a, exp, allow_old);
                rt = check_expr(*e.b, lt.valid() ? lt : exp, allow_old);
            }
            if (!lt.valid() || !rt.valid())
                return DataType();
            if (!lt.is_scalar()) {
                err(e.loc, "logical operator requires BOOL or WORD operands, got " + lt.str());
                return DataType();
            }
            if (lt != rt) {
                err(e.loc, "operand type mismatch: " + lt.str() + " vs " + rt.str());
                return DataType();
            }
            return lt;
        }
        case ExprKind::Eq:
        case ExprKind::Neq: {
            DataType lt, rt;
            if (e.a->kind == ExprKind::IntConst && e.b->kind != ExprKind::IntConst) {
                rt = check_expr(*e.b, DataType(), allow_old);
                lt = check_expr(*e.a, rt, allow_old);
            } else {
                lt = check_expr(*e.a, DataType(), allow_old);
                rt = check_expr(*e.b, lt, allow_old);
            }
            if (!lt.valid() || !rt.valid())
                return DataType();
            if (!lt.is_scalar()) {
                err(e.loc, "comparison requires BOOL or WORD operands, got " + lt.str());
                return DataType();
            }
            return DataType::boolean();
        }
        }
        return DataType();
    }

    bool selector_range(const ConstOrLoopVar& sel, SourceLoc loc, int& lo, int& hi) {
        if (!sel.is_var) {
            lo = hi = sel.value;
            return true;
        }
        for (const auto& lv : loops_) {
            if (lv.name == sel.var) {
                lo = lv.lo;
                hi = lv.hi;
                return true;
            }
        }
        err(loc, "index '" + sel.var + "' is not a loop variable in scope");
        return false;
    }

    struct LoopVar {
        std::string name;
        int lo, hi;
    };

    Program& prog_;
    Diagnostics& diags_;
    std::string entry_;
    const Pou* cur_pou_ = nullptr;
    std::map<std::string, std::pair<const VarDecl*, int>> env_;
    std::vector<LoopVar> loops_;
    std::map<std::string, std::set<std::string>> callees_;
    std::set<std::string> called_;
    std::set<std::string> checked_reqs_;
    int next_call_id_ = 0;
};

}  // namespace detail

// Annotates every expression with its DataType, resolves names, folds loop
// bounds, numbers call sites and designates the entry POU. Returns the typed
// program, or nullopt with diagnostics describing each error.
inline std::optional<TypedProgram> typecheck_program(Program prog, Diagnostics& diags) {
    TypedProgram tp;
    detail::Typechecker tc(prog, diags);
    std::string entry;
    bool ok = tc.run(entry);
    if (!ok || !diags.empty())
        return std::nullopt;
    tp.program = std::move(prog);
    tp.entry = std::move(entry);
    return tp;
}

// Typechecks one requirement against a typed program's entry POU (used for
// manifest- and template-origin requirements added after the initial check).
inline bool typecheck_requirement(TypedProgram& tp, Requirement& req, Diagnostics& diags) {
    detail::Typechecker tc(tp.program, diags);
    std::string entry;
    // entry resolution already succeeded once; rebuild minimal state
    tp.program.entry_name = tp.entry;
    tc.run(entry);
    if (!diags.empty())
        return false;
    tc.check_requirement(req, tp.entry_pou());
    return diags.empty();
}

}  // namespace scanverif
