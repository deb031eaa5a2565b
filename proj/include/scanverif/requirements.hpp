#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/parser.hpp"
#include "scanverif/printer.hpp"
#include "scanverif/typecheck.hpp"

namespace scanverif {

// Parses requirement text (the assertion-comment grammar plus OLD()) and
// typechecks it to BOOL against the target program's entry declarations.
inline std::optional<Requirement> parse_assertion(const std::string& text, const std::string& id,
                                                  TypedProgram& tp, Diagnostics& diags) {
    Requirement req;
    req.id = id;
    req.origin = ReqOrigin::Manifest;
    req.raw_text = text;
    req.expr = parse_expression_text(text, diags);
    if (!req.expr)
        return std::nullopt;
    if (!typecheck_requirement(tp, req, diags))
        return std::nullopt;
    return req;
}

// if/elsif/else specification template: ordered guarded cases assigning a
// constant to `target`, with an optional hold branch (`else target := target`).
struct SpecTemplate {
    struct GuardedCase {
        ExprPtr guard;  // BOOL
        bool value;     // constant assigned when the guard fires
    };
    std::vector<GuardedCase> guarded_cases;
    bool hold_else = true;
    ExprPtr target;  // VarRef or BitSel over a VarRef
};

namespace detail {

inline ExprPtr old_of_target(const Expr& target) {
    if (target.kind == ExprKind::VarRef)
        return mk_old(target.name, target.loc);
    if (target.kind == ExprKind::BitSel && target.a->kind == ExprKind::VarRef)
        return mk_bitsel(mk_old(target.a->name, target.a->loc), target.sel, target.loc);
    return nullptr;
}

inline ExprPtr and_all(std::vector<ExprPtr> terms) {
    ExprPtr acc;
    for (auto& t : terms)
        acc = acc ? mk_and(std::move(acc), std::move(t)) : std::move(t);
    return acc;
}

}  // namespace detail

// Compiles the template into the equivalent end-of-cycle assertion
// `target = <selector expansion>` in pure AND/OR/NOT form. Case i fires only
// when guards 1..i-1 are all false (first-match priority); the hold branch
// contributes `NOT g1 AND .. AND NOT gn AND OLD(target)`.
inline std::optional<Requirement> compile_spec_template(const SpecTemplate& t, const std::string& id,
                                                        TypedProgram& tp, Diagnostics& diags) {
    if (t.guarded_cases.empty()) {
        add_diag(diags, {}, "specification template needs at least one guarded case");
        return std::nullopt;
    }
    if (!t.target || (t.target->kind != ExprKind::VarRef &&
                      !(t.target->kind == ExprKind::BitSel && t.target->a &&
                        t.target->a->kind == ExprKind::VarRef))) {
        add_diag(diags, {}, "template target must be a variable or a bit of one");
        return std::nullopt;
    }

    ExprPtr rhs;
    for (std::size_t i = 0; i < t.guarded_cases.size(); ++i) {
        if (!t.guarded_cases[i].value)
            continue;  // a 0-valued case contributes nothing to the selector
        std::vector<ExprPtr> terms;
        for (std::size_t k = 0; k < i; ++k)
            terms.push_back(mk_not(t.guarded_cases[k].guard->clone()));
        terms.push_back(t.guarded_cases[i].guard->clone());
        ExprPtr sel = detail::and_all(std::move(terms));
        rhs = rhs ? mk_or(std::move(rhs), std::move(sel)) : std::move(sel);
    }
    if (t.hold_else) {
        std::vector<ExprPtr> terms;
        for (const auto& c : t.guarded_cases)
            terms.push_back(mk_not(c.guard->clone()));
        ExprPtr old_t = detail::old_of_target(*t.target);
        if (!old_t) {
            add_diag(diags, {}, "hold branch requires a plain variable target");
            return std::nullopt;
        }
        terms.push_back(std::move(old_t));
        ExprPtr hold = detail::and_all(std::move(terms));
        rhs = rhs ? mk_or(std::move(rhs), std::move(hold)) : std::move(hold);
    }
    if (!rhs)
        rhs = mk_bool(false);

    Requirement req;
    req.id = id;
    req.origin = ReqOrigin::Template;
    req.expr = mk_eq(t.target->clone(), std::move(rhs));
    req.raw_text = " " + print_expr(*req.expr);
    if (!typecheck_requirement(tp, req, diags))
        return std::nullopt;
    return req;
}

// Parametric requirement over a safety-chain index: every `{j}` occurrence in
// the expression text is replaced per chain.
struct ChainTemplate {
    std::string id_prefix;
    std::string expr_template;
    int lo = 0;
    int hi = 15;
};

inline std::string substitute_chain_index(const std::string& text, int j) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 3, "{j}") == 0) {
            out += std::to_string(j);
            i += 3;
        } else {
            out += text[i++];
        }
    }
    return out;
}

// Instantiates the template at each chain index, producing closed requirements
// with ids `<prefix>_SC<j>`. A symbol missing at some j reports that j.
inline std::optional<std::vector<Requirement>> instantiate_chain_cases(const ChainTemplate& t,
                                                                       TypedProgram& tp,
                                                                       Diagnostics& diags) {
    std::vector<Requirement> out;
    for (int j = t.lo; j <= t.hi; ++j) {
        std::string text = substitute_chain_index(t.expr_template, j);
        Diagnostics local;
        Requirement req;
        req.id = t.id_prefix + "_SC" + std::to_string(j);
        req.origin = ReqOrigin::Template;
        req.raw_text = text;
        req.expr = parse_expression_text(text, local);
        if (req.expr)
            typecheck_requirement(tp, req, local);
        if (!local.empty()) {
            for (const auto& d : local)
                add_diag(diags, d.loc, "chain case j=" + std::to_string(j) + ": " + d.message);
            return std::nullopt;
        }
        out.push_back(std::move(req));
    }
    return out;
}

}  // namespace scanverif
