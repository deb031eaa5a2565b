#pragma once

#include <sstream>
#include <string>

#include "scanverif/ast.hpp"
#include "scanverif/lexer.hpp"

namespace scanverif {

namespace detail {

inline bool needs_quotes(const std::string& name) {
    if (name.empty())
        return true;
    if (std::isdigit(static_cast<unsigned char>(name[0])))
        return true;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return true;
    return is_keyword_text(Lexer::upper(name));
}

inline std::string print_name(const std::string& name) {
    return needs_quotes(name) ? "\"" + name + "\"" : name;
}

inline int expr_prec(ExprKind k) {
    switch (k) {
    case ExprKind::Or: return 1;
    case ExprKind::Xor: return 2;
    case ExprKind::And: return 3;
    case ExprKind::Eq:
    case ExprKind::Neq: return 4;
    case ExprKind::Not: return 5;
    default: return 6;
    }
}

inline std::string print_selector(const ConstOrLoopVar& sel, bool bitsel) {
    if (sel.is_var)
        return bitsel ? "[" + sel.var + "]" : sel.var;
    return std::to_string(sel.value);
}

}  // namespace detail

inline std::string print_expr(const Expr& e, int parent_prec = 0) {
    using detail::expr_prec;
    int prec = expr_prec(e.kind);
    std::string s;
    switch (e.kind) {
    case ExprKind::IntConst:
        if (e.is_hex) {
            static const char* hex = "0123456789ABCDEF";
            s = "16#";
            for (int i = 3; i >= 0; --i)
                s += hex[(e.int_value >> (4 * i)) & 0xF];
        } else {
            s = std::to_string(e.int_value);
        }
        break;
    case ExprKind::BoolConst:
        s = e.bool_value ? "TRUE" : "FALSE";
        break;
    case ExprKind::VarRef:
        s = detail::print_name(e.name);
        break;
    case ExprKind::Old:
        s = "OLD(" + detail::print_name(e.name) + ")";
        break;
    case ExprKind::Index:
        s = print_expr(*e.a, prec) + "[" + detail::print_selector(e.sel, false) + "]";
        break;
    case ExprKind::BitSel:
        s = print_expr(*e.a, prec) + ".%X" + detail::print_selector(e.sel, true);
        break;
    case ExprKind::Not:
        s = "NOT " + print_expr(*e.a, prec);
        break;
    case ExprKind::And:
        s = print_expr(*e.a, prec) + " AND " + print_expr(*e.b, prec + 1);
        break;
    case ExprKind::Or:
        s = print_expr(*e.a, prec) + " OR " + print_expr(*e.b, prec + 1);
        break;
    case ExprKind::Xor:
        s = print_expr(*e.a, prec) + " XOR " + print_expr(*e.b, prec + 1);
        break;
    case ExprKind::Eq:
        s = print_expr(*e.a, prec + 1) + " = " + print_expr(*e.b, prec + 1);
        break;
    case ExprKind::Neq:
        s = print_expr(*e.a, prec + 1) + " <> " + print_expr(*e.b, prec + 1);
        break;
    }
    if (prec < parent_prec && e.kind != ExprKind::IntConst && e.kind != ExprKind::BoolConst &&
        e.kind != ExprKind::VarRef)
        return "(" + s + ")";
    return s;
}

namespace detail {

inline void print_stmt(std::ostringstream& os, const Stmt& s, int indent, const Program* prog);

inline void print_body(std::ostringstream& os, const std::vector<Stmt>& body, int indent,
                       const Program* prog) {
    for (const auto& s : body)
        print_stmt(os, s, indent, prog);
}

inline void print_stmt(std::ostringstream& os, const Stmt& s, int indent, const Program* prog) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (s.kind) {
    case StmtKind::Assign:
        os << pad << print_expr(*s.lhs) << " := " << print_expr(*s.rhs) << ";\n";
        break;
    case StmtKind::If: {
        bool first = true;
        for (const auto& br : s.branches) {
            os << pad << (first ? "IF " : "ELSIF ") << print_expr(*br.cond) << " THEN\n";
            print_body(os, br.body, indent + 1, prog);
            first = false;
        }
        if (!s.else_body.empty()) {
            os << pad << "ELSE\n";
            print_body(os, s.else_body, indent + 1, prog);
        }
        os << pad << "END_IF;\n";
        break;
    }
    case StmtKind::For:
        os << pad << "FOR " << s.loop_var << " := " << print_expr(*s.lo_expr) << " TO "
           << print_expr(*s.hi_expr) << " DO\n";
        print_body(os, s.body, indent + 1, prog);
        os << pad << "END_FOR;\n";
        break;
    case StmtKind::Call: {
        os << pad << print_name(s.callee) << "(";
        for (std::size_t i = 0; i < s.bindings.size(); ++i) {
            if (i)
                os << ", ";
            const auto& b = s.bindings[i];
            os << print_name(b.param) << (b.is_output ? " => " : " := ") << print_expr(*b.expr);
        }
        os << ");\n";
        break;
    }
    case StmtKind::Assert: {
        const Requirement* req = prog ? prog->find_requirement(s.req_id) : nullptr;
        if (req && !req->raw_text.empty())
            os << pad << "//#ASSERT" << req->raw_text << ";\n";
        else if (req)
            os << pad << "//#ASSERT " << print_expr(*req->expr) << ";\n";
        break;
    }
    }
}

}  // namespace detail

// Deterministic source rendering. Reparsing the output yields a structurally
// identical program (assert statements excepted; they originate in comments).
inline std::string print_program(const Program& prog) {
    std::ostringstream os;
    bool first_pou = true;
    for (const auto& pou : prog.pous) {
        if (!first_pou)
            os << "\n";
        first_pou = false;
        os << (pou.kind == PouKind::FB ? "FUNCTION_BLOCK " : "FUNCTION ")
           << detail::print_name(pou.name) << "\n";
        Section last{};
        bool open = false;
        auto section_kw = [](Section s) {
            switch (s) {
            case Section::Input: return "VAR_INPUT";
            case Section::Output: return "VAR_OUTPUT";
            case Section::InOut: return "VAR_IN_OUT";
            case Section::Static: return "VAR";
            case Section::Temp: return "VAR_TEMP";
            case Section::Config: return "VAR_CONFIG";
            }
            return "VAR";
        };
        for (const auto& d : pou.decls) {
            if (!open || d.section != last) {
                if (open)
                    os << "END_VAR\n";
                os << section_kw(d.section) << "\n";
                open = true;
                last = d.section;
            }
            os << "  " << detail::print_name(d.name) << " : " << d.dtype.str();
            if (d.init)
                os << " := " << d.init->str();
            os << ";";
            if (!d.original_name.empty() && d.original_name != d.name)
                os << "  // signal name: " << d.original_name;
            os << "\n";
        }
        if (open)
            os << "END_VAR\n";
        detail::print_body(os, pou.body, 1, &prog);
        os << (pou.kind == PouKind::FB ? "END_FUNCTION_BLOCK" : "END_FUNCTION") << "\n";
    }
    return os.str();
}

}  // namespace scanverif
