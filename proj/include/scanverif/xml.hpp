#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scanverif/diag.hpp"

namespace scanverif {

// Minimal XML reader covering the gate-network export vocabulary: elements,
// attributes, text, comments, the standard five entities. No namespaces, no
// DTD. Accepts a fragment (sequence of top-level elements).
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;
    std::string text;
    SourceLoc loc;

    const std::string* attr(const std::string& key) const {
        for (const auto& [k, v] : attrs)
            if (k == key)
                return &v;
        return nullptr;
    }
    const XmlNode* child(const std::string& n) const {
        for (const auto& c : children)
            if (c.name == n)
                return &c;
        return nullptr;
    }
};

namespace detail {

class XmlParser {
public:
    XmlParser(std::string_view src, Diagnostics& diags) : src_(src), diags_(diags) {}

    std::optional<std::vector<XmlNode>> parse_fragment() {
        std::vector<XmlNode> roots;
        while (true) {
            skip_misc();
            if (pos_ >= src_.size())
                break;
            if (src_[pos_] != '<') {
                err("unexpected text outside elements");
                return std::nullopt;
            }
            auto node = parse_element();
            if (!node)
                return std::nullopt;
            roots.push_back(std::move(*node));
        }
        if (roots.empty()) {
            err("no XML element found");
            return std::nullopt;
        }
        return roots;
    }

private:
    void err(const std::string& msg) { add_diag(diags_, here(), msg); }

    SourceLoc here() const { return SourceLoc{line_, col_}; }

    char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void advance() {
        if (cur() == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(cur())))
            advance();
    }

    bool starts_with(const char* s) const {
        return src_.compare(pos_, std::string_view(s).size(), s) == 0;
    }

    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<!--")) {
                while (pos_ < src_.size() && !starts_with("-->"))
                    advance();
                for (int i = 0; i < 3 && pos_ < src_.size(); ++i)
                    advance();
            } else if (starts_with("<?")) {
                while (pos_ < src_.size() && !starts_with("?>"))
                    advance();
                for (int i = 0; i < 2 && pos_ < src_.size(); ++i)
                    advance();
            } else {
                break;
            }
        }
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
               c == '.';
    }

    std::string parse_name() {
        std::string n;
        while (pos_ < src_.size() && name_char(cur())) {
            n += cur();
            advance();
        }
        return n;
    }

    bool decode_entities(const std::string& in, std::string& out) {
        for (std::size_t i = 0; i < in.size();) {
            if (in[i] != '&') {
                out += in[i++];
                continue;
            }
            std::size_t semi = in.find(';', i);
            if (semi == std::string::npos) {
                err("unterminated entity reference");
                return false;
            }
            std::string ent = in.substr(i + 1, semi - i - 1);
            if (ent == "lt") out += '<';
            else if (ent == "gt") out += '>';
            else if (ent == "amp") out += '&';
            else if (ent == "quot") out += '"';
            else if (ent == "apos") out += '\'';
            else {
                err("unknown entity '&" + ent + ";'");
                return false;
            }
            i = semi + 1;
        }
        return true;
    }

    std::optional<XmlNode> parse_element() {
        XmlNode node;
        node.loc = here();
        advance();  // '<'
        node.name = parse_name();
        if (node.name.empty()) {
            err("expected element name");
            return std::nullopt;
        }
        while (true) {
            skip_ws();
            if (cur() == '/' && peek(1) == '>') {
                advance();
                advance();
                return node;
            }
            if (cur() == '>') {
                advance();
                break;
            }
            std::string key = parse_name();
            if (key.empty()) {
                err("expected attribute name in <" + node.name + ">");
                return std::nullopt;
            }
            skip_ws();
            if (cur() != '=') {
                err("expected '=' after attribute '" + key + "'");
                return std::nullopt;
            }
            advance();
            skip_ws();
            char quote = cur();
            if (quote != '"' && quote != '\'') {
                err("expected quoted attribute value");
                return std::nullopt;
            }
            advance();
            std::string raw;
            while (pos_ < src_.size() && cur() != quote) {
                raw += cur();
                advance();
            }
            if (cur() != quote) {
                err("unterminated attribute value");
                return std::nullopt;
            }
            advance();
            std::string val;
            if (!decode_entities(raw, val))
                return std::nullopt;
            node.attrs.emplace_back(std::move(key), std::move(val));
        }
        // content
        while (true) {
            std::string text;
            while (pos_ < src_.size() && cur() != '<') {
                text += cur();
                advance();
            }
            if (!text.empty()) {
                std::string decoded;
                if (!decode_entities(text, decoded))
                    return std::nullopt;
                node.text += decoded;
            }
            if (pos_ >= src_.size()) {
                err("unterminated element <" + node.name + ">");
                return std::nullopt;
            }
            if (starts_with("<!--")) {
                while (pos_ < src_.size() && !starts_with("-->"))
                    advance();
                for (int i = 0; i < 3 && pos_ < src_.size(); ++i)
                    advance();
                continue;
            }
            if (peek(1) == '/') {
                advance();
                advance();
                std::string close = parse_name();
                if (close != node.name) {
                    err("mismatched closing tag </" + close + "> for <" + node.name + ">");
                    return std::nullopt;
                }
                skip_ws();
                if (cur() != '>') {
                    err("malformed closing tag");
                    return std::nullopt;
                }
                advance();
                // trim surrounding whitespace of text content
                auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
                while (!node.text.empty() && is_space(node.text.front()))
                    node.text.erase(node.text.begin());
                while (!node.text.empty() && is_space(node.text.back()))
                    node.text.pop_back();
                return node;
            }
            auto ch = parse_element();
            if (!ch)
                return std::nullopt;
            node.children.push_back(std::move(*ch));
        }
    }

    std::string_view src_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace detail

inline std::optional<std::vector<XmlNode>> parse_xml_fragment(std::string_view text,
                                                              Diagnostics& diags) {
    detail::XmlParser p(text, diags);
    return p.parse_fragment();
}

}  // namespace scanverif
