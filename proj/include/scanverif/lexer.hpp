#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "scanverif/diag.hpp"

namespace scanverif {

enum class Tok : std::uint8_t {
    End,
    Ident,     // plain or quoted identifier
    Int,       // decimal or 16# literal
    Assign,    // :=
    Arrow,     // =>
    Semi,
    Colon,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    DotDot,    // ..
    BitSel,    // .%X
    Eq,        // =
    Neq,       // <>
    Keyword,   // canonical upper-case text in `text`
};

struct Token {
    Tok kind = Tok::End;
    std::string text;          // identifier name / keyword / raw literal
    std::uint32_t int_value = 0;
    bool is_hex = false;
    SourceLoc loc;
};

// Line comment captured during lexing; `//#ASSERT` extraction works on these.
struct CommentInfo {
    std::string text;  // content after `//`, no newline
    SourceLoc loc;
    std::size_t byte_offset = 0;
    bool line_start = false;  // nothing but whitespace precedes it on its line
};

inline const char* const kKeywords[] = {
    "FUNCTION", "END_FUNCTION", "FUNCTION_BLOCK", "END_FUNCTION_BLOCK",
    "VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR_TEMP", "VAR_CONFIG", "VAR", "END_VAR",
    "BOOL", "WORD", "ARRAY", "OF",
    "IF", "THEN", "ELSIF", "ELSE", "END_IF",
    "FOR", "TO", "DO", "END_FOR",
    "AND", "OR", "XOR", "NOT", "TRUE", "FALSE", "OLD",
};

inline bool is_keyword_text(const std::string& up) {
    for (const char* k : kKeywords)
        if (up == k)
            return true;
    return false;
}

class Lexer {
public:
    Lexer(std::string_view src, std::string file = {}) : src_(src), file_(std::move(file)) {}

    // Tokenizes the whole input. Returns false on a lexical error.
    bool run(std::vector<Token>& out, std::vector<CommentInfo>& comments, Diagnostics& diags) {
        bool ok = true;
        while (true) {
            skip_space();
            if (pos_ >= src_.size())
                break;
            SourceLoc loc = here();
            char c = src_[pos_];
            if (c == '/' && peek(1) == '/') {
                CommentInfo ci;
                ci.loc = loc;
                ci.byte_offset = pos_;
                ci.line_start = (last_token_line_ != line_);
                pos_ += 2;
                col_ += 2;
                std::size_t start = pos_;
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
                ci.text = std::string(src_.substr(start, pos_ - start));
                if (!ci.text.empty() && ci.text.back() == '\r')
                    ci.text.pop_back();
                comments.push_back(std::move(ci));
                continue;
            }
            if (c == '(' && peek(1) == '*') {
                pos_ += 2;
                col_ += 2;
                bool closed = false;
                while (pos_ < src_.size()) {
                    if (src_[pos_] == '*' && peek(1) == ')') {
                        pos_ += 2;
                        col_ += 2;
                        closed = true;
                        break;
                    }
                    advance();
                }
                if (!closed) {
                    add_diag(diags, loc, "unterminated block comment");
                    ok = false;
                }
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                              src_[pos_] == '_'))
                    advance();
                std::string word(src_.substr(start, pos_ - start));
                std::string up = upper(word);
                Token t;
                t.loc = loc;
                if (is_keyword_text(up)) {
                    t.kind = Tok::Keyword;
                    t.text = up;
                } else {
                    t.kind = Tok::Ident;
                    t.text = word;
                }
                last_token_line_ = loc.line;
                out.push_back(std::move(t));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                if (!lex_number(out, diags))
                    ok = false;
                continue;
            }
            if (c == '"') {
                advance();
                std::size_t start = pos_;
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n')
                    advance();
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    add_diag(diags, loc, "unterminated quoted identifier");
                    ok = false;
                    continue;
                }
                Token t;
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
                t.loc = loc;
                advance();  // closing quote
                if (t.text.empty()) {
                    add_diag(diags, loc, "empty quoted identifier");
                    ok = false;
                    continue;
                }
                last_token_line_ = loc.line;
                out.push_back(std::move(t));
                continue;
            }
            switch (c) {
            case ':':
                if (peek(1) == '=') {
                    push(out, Tok::Assign, loc, 2);
                } else {
                    push(out, Tok::Colon, loc, 1);
                }
                continue;
            case ';': push(out, Tok::Semi, loc, 1); continue;
            case ',': push(out, Tok::Comma, loc, 1); continue;
            case '(': push(out, Tok::LParen, loc, 1); continue;
            case ')': push(out, Tok::RParen, loc, 1); continue;
            case '[': push(out, Tok::LBracket, loc, 1); continue;
            case ']': push(out, Tok::RBracket, loc, 1); continue;
            case '=':
                if (peek(1) == '>') {
                    push(out, Tok::Arrow, loc, 2);
                } else {
                    push(out, Tok::Eq, loc, 1);
                }
                continue;
            case '<':
                if (peek(1) == '>') {
                    push(out, Tok::Neq, loc, 2);
                    continue;
                }
                add_diag(diags, loc, "unexpected character '<'");
                ok = false;
                advance();
                continue;
            case '.':
                if (peek(1) == '.') {
                    push(out, Tok::DotDot, loc, 2);
                    continue;
                }
                if (peek(1) == '%' && (peek(2) == 'X' || peek(2) == 'x')) {
                    push(out, Tok::BitSel, loc, 3);
                    continue;
                }
                add_diag(diags, loc, "unexpected character '.'");
                ok = false;
                advance();
                continue;
            case '+': case '-': case '*': case '/':
                add_diag(diags, loc,
                         std::string("arithmetic operator '") + c + "' is not supported");
                ok = false;
                advance();
                continue;
            default:
                add_diag(diags, loc, std::string("unexpected character '") + c + "'");
                ok = false;
                advance();
                continue;
            }
        }
        Token eof;
        eof.kind = Tok::End;
        eof.loc = here();
        out.push_back(eof);
        return ok;
    }

    static std::string upper(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        return s;
    }

private:
    char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    SourceLoc here() const { return SourceLoc{line_, col_}; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
                advance();
            else
                break;
        }
    }

    void push(std::vector<Token>& out, Tok kind, SourceLoc loc, int width) {
        Token t;
        t.kind = kind;
        t.loc = loc;
        pos_ += width;
        col_ += width;
        last_token_line_ = loc.line;
        out.push_back(std::move(t));
    }

    bool lex_number(std::vector<Token>& out, Diagnostics& diags) {
        SourceLoc loc = here();
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            advance();
        std::string digits(src_.substr(start, pos_ - start));
        if (pos_ < src_.size() && src_[pos_] == '#') {
            if (digits != "16") {
                add_diag(diags, loc, "only base-16 literals (16#...) are supported");
                return false;
            }
            advance();  // '#'
            std::size_t hstart = pos_;
            while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            std::string hexdig(src_.substr(hstart, pos_ - hstart));
            if (hexdig.empty() || hexdig.size() > 4) {
                add_diag(diags, loc, "16# literal must have 1..4 hex digits");
                return false;
            }
            Token t;
            t.kind = Tok::Int;
            t.loc = loc;
            t.is_hex = true;
            t.int_value = static_cast<std::uint32_t>(std::stoul(hexdig, nullptr, 16));
            t.text = "16#" + hexdig;
            last_token_line_ = loc.line;
            out.push_back(std::move(t));
            return true;
        }
        unsigned long v = std::stoul(digits);
        if (v > 0xFFFF) {
            add_diag(diags, loc, "integer literal " + digits + " exceeds 16#FFFF");
            return false;
        }
        Token t;
        t.kind = Tok::Int;
        t.loc = loc;
        t.int_value = static_cast<std::uint32_t>(v);
        t.text = digits;
        last_token_line_ = loc.line;
        out.push_back(std::move(t));
        return true;
    }

    std::string_view src_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int last_token_line_ = 0;
};

}  // namespace scanverif
