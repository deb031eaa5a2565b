#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/diag.hpp"
#include "scanverif/lexer.hpp"

namespace scanverif {

struct ParseResult {
    Program program;
    std::vector<CommentInfo> comments;
    Diagnostics diags;
    bool ok = false;
};

// `//#ASSERT <expr>;` captured from the comment stream. The expression text may
// continue over immediately following `//` comment lines until the `;`.
struct AssertionComment {
    std::string expr_text;
    SourceLoc loc;
};

namespace detail {

class Parser {
public:
    Parser(const std::vector<Token>& toks, Diagnostics& diags) : toks_(toks), diags_(diags) {}

    Program parse_program() {
        Program prog;
        while (!at(Tok::End)) {
            if (at_kw("FUNCTION") || at_kw("FUNCTION_BLOCK")) {
                bool is_fb = at_kw("FUNCTION_BLOCK");
                Pou pou = parse_pou(is_fb);
                if (failed_)
                    break;
                if (prog.find_pou(pou.name)) {
                    error(pou.loc, "duplicate POU '" + pou.name + "'");
                    break;
                }
                prog.pous.push_back(std::move(pou));
            } else {
                error(cur().loc, "expected FUNCTION or FUNCTION_BLOCK");
                break;
            }
        }
        if (prog.pous.empty() && !failed_)
            error(cur().loc, "no POU found");
        return prog;
    }

    ExprPtr parse_standalone_expr() {
        ExprPtr e = parse_expr();
        if (!failed_ && !at(Tok::End))
            error(cur().loc, "unexpected trailing input after expression");
        return e;
    }

    bool failed() const { return failed_; }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t k = 1) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(const char* kw) const { return cur().kind == Tok::Keyword && cur().text == kw; }

    void bump() {
        if (pos_ + 1 < toks_.size())
            ++pos_;
    }

    bool eat(Tok k) {
        if (at(k)) {
            bump();
            return true;
        }
        return false;
    }
    bool eat_kw(const char* kw) {
        if (at_kw(kw)) {
            bump();
            return true;
        }
        return false;
    }

    void error(SourceLoc loc, const std::string& msg) {
        if (!failed_)
            add_diag(diags_, loc, msg);
        failed_ = true;
    }

    std::string tok_desc(const Token& t) const {
        switch (t.kind) {
        case Tok::End: return "end of file";
        case Tok::Ident: return "identifier '" + t.text + "'";
        case Tok::Int: return "literal " + t.text;
        case Tok::Keyword: return "'" + t.text + "'";
        case Tok::Assign: return "':='";
        case Tok::Arrow: return "'=>'";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::DotDot: return "'..'";
        case Tok::BitSel: return "'.%X'";
        case Tok::Eq: return "'='";
        case Tok::Neq: return "'<>'";
        }
        return "?";
    }

    void expect(Tok k, const char* what) {
        if (!eat(k))
            error(cur().loc, std::string("expected ") + what + ", found " + tok_desc(cur()));
    }
    void expect_kw(const char* kw) {
        if (!eat_kw(kw))
            error(cur().loc, std::string("expected '") + kw + "', found " + tok_desc(cur()));
    }

    Pou parse_pou(bool is_fb) {
        Pou pou;
        pou.kind = is_fb ? PouKind::FB : PouKind::FC;
        pou.loc = cur().loc;
        bump();  // FUNCTION / FUNCTION_BLOCK
        if (!at(Tok::Ident)) {
            error(cur().loc, "expected POU name, found " + tok_desc(cur()));
            return pou;
        }
        pou.name = cur().text;
        bump();

        while (!failed_) {
            Section sec;
            if (at_kw("VAR_INPUT"))
                sec = Section::Input;
            else if (at_kw("VAR_OUTPUT"))
                sec = Section::Output;
            else if (at_kw("VAR_IN_OUT"))
                sec = Section::InOut;
            else if (at_kw("VAR_TEMP"))
                sec = Section::Temp;
            else if (at_kw("VAR_CONFIG"))
                sec = Section::Config;
            else if (at_kw("VAR"))
                sec = Section::Static;
            else
                break;
            bump();
            parse_decls(pou, sec);
        }

        while (!failed_ && !at_kw("END_FUNCTION") && !at_kw("END_FUNCTION_BLOCK") && !at(Tok::End))
            pou.body.push_back(parse_stmt());

        if (failed_)
            return pou;
        if (is_fb)
            expect_kw("END_FUNCTION_BLOCK");
        else
            expect_kw("END_FUNCTION");
        return pou;
    }

    void parse_decls(Pou& pou, Section sec) {
        while (!failed_ && !at_kw("END_VAR")) {
            if (at(Tok::End)) {
                error(cur().loc, "expected 'END_VAR', found end of file");
                return;
            }
            VarDecl d;
            d.section = sec;
            d.loc = cur().loc;
            if (!at(Tok::Ident)) {
                error(cur().loc, "expected variable name, found " + tok_desc(cur()));
                return;
            }
            d.name = cur().text;
            bump();
            expect(Tok::Colon, "':'");
            d.dtype = parse_type();
            if (eat(Tok::Assign)) {
                // Initializers are scalar literals; arrays default to zero.
                if (at(Tok::Int)) {
                    if (d.dtype.is_bool() && cur().int_value <= 1 && !cur().is_hex)
                        d.init = Value::of_bool(cur().int_value != 0);
                    else
                        d.init = Value::of_word(static_cast<Word>(cur().int_value));
                    bump();
                } else if (at_kw("TRUE") || at_kw("FALSE")) {
                    d.init = Value::of_bool(at_kw("TRUE"));
                    bump();
                } else {
                    error(cur().loc, "expected literal initializer, found " + tok_desc(cur()));
                    return;
                }
            }
            expect(Tok::Semi, "';' after declaration");
            if (failed_)
                return;
            if (pou.find_decl(d.name)) {
                error(d.loc, "duplicate declaration of '" + d.name + "'");
                return;
            }
            pou.decls.push_back(std::move(d));
        }
        expect_kw("END_VAR");
    }

    DataType parse_type() {
        if (eat_kw("BOOL"))
            return DataType::boolean();
        if (eat_kw("WORD"))
            return DataType::word();
        if (eat_kw("ARRAY")) {
            expect(Tok::LBracket, "'['");
            int lo = parse_int_bound();
            expect(Tok::DotDot, "'..'");
            int hi = parse_int_bound();
            expect(Tok::RBracket, "']'");
            expect_kw("OF");
            DataType elem = parse_type();
            if (!failed_ && lo > hi)
                error(cur().loc, "array bounds must satisfy lo <= hi");
            return DataType::array(std::move(elem), lo, hi);
        }
        error(cur().loc, "expected type (BOOL, WORD or ARRAY), found " + tok_desc(cur()));
        return DataType();
    }

    int parse_int_bound() {
        if (!at(Tok::Int)) {
            error(cur().loc, "expected integer bound, found " + tok_desc(cur()));
            return 0;
        }
        int v = static_cast<int>(cur().int_value);
        bump();
        return v;
    }

    Stmt parse_stmt() {
        SourceLoc loc = cur().loc;
        if (at_kw("IF"))
            return parse_if();
        if (at_kw("FOR"))
            return parse_for();
        if (at(Tok::Ident)) {
            // call: ident '(' ...; assignment: lvalue ':=' ...
            if (peek().kind == Tok::LParen)
                return parse_call();
            Stmt s(StmtKind::Assign, loc);
            s.lhs = parse_postfix(parse_primary());
            expect(Tok::Assign, "':='");
            s.rhs = parse_expr();
            expect(Tok::Semi, "';' after assignment");
            return s;
        }
        Stmt s(StmtKind::Assign, loc);
        error(loc, "expected statement, found " + tok_desc(cur()));
        return s;
    }

    Stmt parse_if() {
        Stmt s(StmtKind::If, cur().loc);
        bump();  // IF
        IfBranch first;
        first.cond = parse_expr();
        expect_kw("THEN");
        while (!failed_ && !at_kw("ELSIF") && !at_kw("ELSE") && !at_kw("END_IF")) {
            if (at(Tok::End)) {
                error(cur().loc, "expected 'END_IF', found end of file");
                return s;
            }
            first.body.push_back(parse_stmt());
        }
        s.branches.push_back(std::move(first));
        while (!failed_ && eat_kw("ELSIF")) {
            IfBranch br;
            br.cond = parse_expr();
            expect_kw("THEN");
            while (!failed_ && !at_kw("ELSIF") && !at_kw("ELSE") && !at_kw("END_IF")) {
                if (at(Tok::End)) {
                    error(cur().loc, "expected 'END_IF', found end of file");
                    return s;
                }
                br.body.push_back(parse_stmt());
            }
            s.branches.push_back(std::move(br));
        }
        if (!failed_ && eat_kw("ELSE")) {
            while (!failed_ && !at_kw("END_IF")) {
                if (at(Tok::End)) {
                    error(cur().loc, "expected 'END_IF', found end of file");
                    return s;
                }
                s.else_body.push_back(parse_stmt());
            }
        }
        expect_kw("END_IF");
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_for() {
        Stmt s(StmtKind::For, cur().loc);
        bump();  // FOR
        if (!at(Tok::Ident)) {
            error(cur().loc, "expected loop variable, found " + tok_desc(cur()));
            return s;
        }
        s.loop_var = cur().text;
        bump();
        expect(Tok::Assign, "':='");
        s.lo_expr = parse_expr();
        expect_kw("TO");
        s.hi_expr = parse_expr();
        expect_kw("DO");
        while (!failed_ && !at_kw("END_FOR")) {
            if (at(Tok::End)) {
                error(cur().loc, "expected 'END_FOR', found end of file");
                return s;
            }
            s.body.push_back(parse_stmt());
        }
        expect_kw("END_FOR");
        eat(Tok::Semi);
        return s;
    }

    Stmt parse_call() {
        Stmt s(StmtKind::Call, cur().loc);
        s.callee = cur().text;
        bump();
        expect(Tok::LParen, "'('");
        if (!at(Tok::RParen)) {
            do {
                CallBinding b;
                b.loc = cur().loc;
                if (!at(Tok::Ident)) {
                    error(cur().loc, "expected parameter name, found " + tok_desc(cur()));
                    return s;
                }
                b.param = cur().text;
                bump();
                if (eat(Tok::Assign)) {
                    b.is_output = false;
                    b.expr = parse_expr();
                } else if (eat(Tok::Arrow)) {
                    b.is_output = true;
                    b.expr = parse_postfix(parse_primary());
                } else {
                    error(cur().loc, "expected ':=' or '=>' in call binding, found " + tok_desc(cur()));
                    return s;
                }
                s.bindings.push_back(std::move(b));
            } while (!failed_ && eat(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';' after call");
        return s;
    }

    // Precedence, loosest first: OR, XOR, AND, (= <>), NOT, postfix, primary.
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_xor();
        while (!failed_ && at_kw("OR")) {
            SourceLoc loc = cur().loc;
            bump();
            e = mk_binary(ExprKind::Or, std::move(e), parse_xor(), loc);
        }
        return e;
    }
    ExprPtr parse_xor() {
        ExprPtr e = parse_and();
        while (!failed_ && at_kw("XOR")) {
            SourceLoc loc = cur().loc;
            bump();
            e = mk_binary(ExprKind::Xor, std::move(e), parse_and(), loc);
        }
        return e;
    }
    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while (!failed_ && at_kw("AND")) {
            SourceLoc loc = cur().loc;
            bump();
            e = mk_binary(ExprKind::And, std::move(e), parse_cmp(), loc);
        }
        return e;
    }
    ExprPtr parse_cmp() {
        ExprPtr e = parse_unary();
        if (!failed_ && (at(Tok::Eq) || at(Tok::Neq))) {
            ExprKind k = at(Tok::Eq) ? ExprKind::Eq : ExprKind::Neq;
            SourceLoc loc = cur().loc;
            bump();
            e = mk_binary(k, std::move(e), parse_unary(), loc);
        }
        return e;
    }
    ExprPtr parse_unary() {
        if (at_kw("NOT")) {
            SourceLoc loc = cur().loc;
            bump();
            return mk_unary(ExprKind::Not, parse_unary(), loc);
        }
        return parse_postfix(parse_primary());
    }

    ExprPtr parse_postfix(ExprPtr base) {
        while (!failed_) {
            if (at(Tok::LBracket)) {
                SourceLoc loc = cur().loc;
                bump();
                ConstOrLoopVar sel = parse_selector();
                expect(Tok::RBracket, "']'");
                base = mk_index(std::move(base), sel, loc);
            } else if (at(Tok::BitSel)) {
                SourceLoc loc = cur().loc;
                bump();
                ConstOrLoopVar sel;
                if (at(Tok::Int)) {
                    sel.value = static_cast<int>(cur().int_value);
                    bump();
                } else if (eat(Tok::LBracket)) {
                    sel = parse_selector();
                    expect(Tok::RBracket, "']'");
                } else {
                    error(cur().loc, "expected bit index after '.%X', found " + tok_desc(cur()));
                    return base;
                }
                base = mk_bitsel(std::move(base), sel, loc);
            } else {
                break;
            }
        }
        return base;
    }

    ConstOrLoopVar parse_selector() {
        ConstOrLoopVar sel;
        if (at(Tok::Int)) {
            sel.value = static_cast<int>(cur().int_value);
            bump();
        } else if (at(Tok::Ident)) {
            sel.is_var = true;
            sel.var = cur().text;
            bump();
        } else {
            error(cur().loc, "expected index, found " + tok_desc(cur()));
        }
        return sel;
    }

    ExprPtr parse_primary() {
        SourceLoc loc = cur().loc;
        if (at(Tok::Int)) {
            ExprPtr e = mk_int(cur().int_value, cur().is_hex, loc);
            bump();
            return e;
        }
        if (at_kw("TRUE") || at_kw("FALSE")) {
            ExprPtr e = mk_bool(at_kw("TRUE"), loc);
            bump();
            return e;
        }
        if (at_kw("OLD")) {
            bump();
            expect(Tok::LParen, "'(' after OLD");
            if (!at(Tok::Ident)) {
                error(cur().loc, "expected variable name in OLD(), found " + tok_desc(cur()));
                return mk_bool(false, loc);
            }
            std::string name = cur().text;
            bump();
            expect(Tok::RParen, "')'");
            return mk_old(std::move(name), loc);
        }
        if (at(Tok::Ident)) {
            ExprPtr e = mk_var(cur().text, loc);
            bump();
            return e;
        }
        if (eat(Tok::LParen)) {
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        error(loc, "expected expression, found " + tok_desc(cur()));
        return mk_bool(false, loc);
    }

    const std::vector<Token>& toks_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    bool failed_ = false;
};

}  // namespace detail

inline ParseResult parse_program(std::string_view text, std::string file = {}) {
    ParseResult r;
    std::vector<Token> toks;
    Lexer lex(text, file);
    bool lex_ok = lex.run(toks, r.comments, r.diags);
    if (!lex_ok) {
        r.ok = false;
        return r;
    }
    detail::Parser p(toks, r.diags);
    r.program = p.parse_program();
    r.program.source_path = std::move(file);
    r.ok = !p.failed();
    return r;
}

// Parses a single expression (assertion bodies, manifest requirement text).
inline ExprPtr parse_expression_text(std::string_view text, Diagnostics& diags) {
    std::vector<Token> toks;
    std::vector<CommentInfo> comments;
    Lexer lex(text);
    if (!lex.run(toks, comments, diags))
        return nullptr;
    detail::Parser p(toks, diags);
    ExprPtr e = p.parse_standalone_expr();
    if (p.failed())
        return nullptr;
    return e;
}

// Pulls `//#ASSERT ...;` requirements out of the comment stream. The assertion
// text may continue over directly following comment lines until the `;`.
inline std::vector<AssertionComment> extract_assertions(const std::vector<CommentInfo>& comments,
                                                         Diagnostics& diags) {
    std::vector<AssertionComment> out;
    auto is_assert_start = [](const std::string& text, std::size_t& after) {
        if (text.empty() || text[0] != '#')
            return false;
        if (Lexer::upper(text.substr(0, 7)) != "#ASSERT")
            return false;
        if (text.size() > 7 &&
            (std::isalnum(static_cast<unsigned char>(text[7])) || text[7] == '_'))
            return false;
        after = 7;
        return true;
    };
    for (std::size_t i = 0; i < comments.size(); ++i) {
        std::size_t after = 0;
        if (!is_assert_start(comments[i].text, after))
            continue;
        AssertionComment ac;
        ac.loc = comments[i].loc;
        std::string text = comments[i].text.substr(after);
        std::size_t j = i;
        while (text.find(';') == std::string::npos) {
            // continuation: a whole-line comment on the immediately following line
            if (j + 1 < comments.size() && comments[j + 1].loc.line == comments[j].loc.line + 1 &&
                comments[j + 1].line_start) {
                std::size_t dummy = 0;
                if (is_assert_start(comments[j + 1].text, dummy))
                    break;
                ++j;
                text += ' ';
                text += comments[j].text;
            } else {
                break;
            }
        }
        std::size_t semi = text.find(';');
        if (semi == std::string::npos) {
            add_diag(diags, ac.loc, "malformed assertion comment: missing terminating ';'");
            continue;
        }
        ac.expr_text = text.substr(0, semi);
        out.push_back(std::move(ac));
        i = j;
    }
    return out;
}

// Turns assertion comments into named requirements and plants Assert statements
// at the top-level statement each comment precedes (body end if none follows).
inline void attach_assertions(Program& prog, const std::vector<AssertionComment>& asserts,
                              Diagnostics& diags) {
    auto loc_before = [](SourceLoc a, SourceLoc b) {
        return a.line < b.line || (a.line == b.line && a.column < b.column);
    };
    for (const auto& ac : asserts) {
        // enclosing POU: last one starting at or before the comment
        Pou* target = nullptr;
        for (auto& pou : prog.pous) {
            if (!loc_before(ac.loc, pou.loc))
                target = &pou;
        }
        if (!target) {
            add_diag(diags, ac.loc, "assertion comment appears before any POU");
            continue;
        }
        Requirement req;
        req.id = "assert_L" + std::to_string(ac.loc.line);
        req.origin = ReqOrigin::InlineComment;
        req.raw_text = ac.expr_text;
        req.loc = ac.loc;
        Diagnostics ediags;
        req.expr = parse_expression_text(ac.expr_text, ediags);
        if (!req.expr) {
            for (auto& d : ediags)
                add_diag(diags, ac.loc, "in assertion: " + d.message);
            continue;
        }
        if (prog.find_requirement(req.id)) {
            add_diag(diags, ac.loc, "duplicate assertion id '" + req.id + "'");
            continue;
        }

        Stmt assert_stmt(StmtKind::Assert, ac.loc);
        assert_stmt.req_id = req.id;
        std::size_t pos = target->body.size();
        for (std::size_t k = 0; k < target->body.size(); ++k) {
            if (loc_before(ac.loc, target->body[k].loc)) {
                pos = k;
                break;
            }
        }
        target->body.insert(target->body.begin() + pos, std::move(assert_stmt));
        prog.requirements.push_back(std::move(req));
    }
}

// Convenience frontend: parse + extract + attach.
inline ParseResult parse_source(std::string_view text, std::string file = {}) {
    ParseResult r = parse_program(text, std::move(file));
    if (!r.ok)
        return r;
    auto asserts = extract_assertions(r.comments, r.diags);
    std::size_t before = r.diags.size();
    attach_assertions(r.program, asserts, r.diags);
    if (r.diags.size() != before)
        r.ok = false;
    return r;
}

}  // namespace scanverif
