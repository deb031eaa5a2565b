#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/diag.hpp"
#include "scanverif/xml.hpp"

namespace scanverif {

enum class FbdGate : std::uint8_t { And, Or, Xor, Not };

inline const char* fbd_gate_name(FbdGate g) {
    switch (g) {
    case FbdGate::And: return "And";
    case FbdGate::Or: return "Or";
    case FbdGate::Xor: return "Xor";
    case FbdGate::Not: return "Not";
    }
    return "?";
}

struct FbdAccess {
    int uid = 0;
    std::string scope;
    std::vector<std::string> components;
    SourceLoc loc;

    std::string symbol() const {
        std::string s;
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (i)
                s += '.';
            s += components[i];
        }
        return s;
    }
};

struct FbdPart {
    int uid = 0;
    FbdGate gate = FbdGate::And;
    int cardinality = 2;
    bool word_typed = false;  // SrcType Word = 16-lane bitwise, Bool = 1-lane
    SourceLoc loc;
};

struct FbdEndpoint {
    bool is_ident = false;  // IdentCon(uid) vs NameCon(uid, port)
    int uid = 0;
    std::string port;
};

struct FbdWire {
    int uid = 0;
    std::vector<FbdEndpoint> endpoints;
    SourceLoc loc;
};

struct FbdNetwork {
    std::vector<FbdAccess> accesses;
    std::vector<FbdPart> parts;
    std::vector<FbdWire> wires;

    const FbdAccess* access(int uid) const {
        for (const auto& a : accesses)
            if (a.uid == uid)
                return &a;
        return nullptr;
    }
    const FbdPart* part(int uid) const {
        for (const auto& p : parts)
            if (p.uid == uid)
                return &p;
        return nullptr;
    }
};

namespace detail {

inline bool parse_int_attr(const XmlNode& n, const char* key, int& out, Diagnostics& diags) {
    const std::string* v = n.attr(key);
    if (!v) {
        add_diag(diags, n.loc, "<" + n.name + "> is missing attribute '" + key + "'");
        return false;
    }
    try {
        std::size_t used = 0;
        out = std::stoi(*v, &used);
        if (used != v->size())
            throw std::invalid_argument("trailing");
    } catch (...) {
        add_diag(diags, n.loc, "attribute '" + std::string(key) + "' is not an integer: " + *v);
        return false;
    }
    return true;
}

inline bool collect_network(const XmlNode& root, FbdNetwork& net, Diagnostics& diags) {
    bool ok = true;
    for (const auto& c : root.children) {
        if (c.name == "Access") {
            FbdAccess a;
            a.loc = c.loc;
            if (!parse_int_attr(c, "UId", a.uid, diags)) {
                ok = false;
                continue;
            }
            if (const std::string* s = c.attr("Scope"))
                a.scope = *s;
            if (const XmlNode* sym = c.child("Symbol")) {
                for (const auto& comp : sym->children) {
                    if (comp.name == "Component") {
                        if (const std::string* nm = comp.attr("Name"))
                            a.components.push_back(*nm);
                    }
                }
            }
            if (a.components.empty()) {
                add_diag(diags, c.loc, "<Access> without a named Symbol/Component");
                ok = false;
                continue;
            }
            net.accesses.push_back(std::move(a));
        } else if (c.name == "Part") {
            FbdPart p;
            p.loc = c.loc;
            if (!parse_int_attr(c, "UId", p.uid, diags)) {
                ok = false;
                continue;
            }
            const std::string* nm = c.attr("Name");
            if (!nm) {
                add_diag(diags, c.loc, "<Part> is missing attribute 'Name'");
                ok = false;
                continue;
            }
            if (*nm == "And") p.gate = FbdGate::And;
            else if (*nm == "Or") p.gate = FbdGate::Or;
            else if (*nm == "Xor") p.gate = FbdGate::Xor;
            else if (*nm == "Not") p.gate = FbdGate::Not;
            else {
                add_diag(diags, c.loc, "unsupported Part name '" + *nm + "'");
                ok = false;
                continue;
            }
            p.cardinality = p.gate == FbdGate::Not ? 1 : 2;
            for (const auto& tv : c.children) {
                if (tv.name != "TemplateValue")
                    continue;
                const std::string* type = tv.attr("Type");
                if (type && *type == "Cardinality") {
                    try {
                        std::size_t used = 0;
                        p.cardinality = std::stoi(tv.text, &used);
                        if (used != tv.text.size())
                            throw std::invalid_argument("trailing");
                    } catch (...) {
                        add_diag(diags, tv.loc, "non-integer cardinality '" + tv.text + "'");
                        ok = false;
                    }
                } else if (type && *type == "Type") {
                    if (tv.text == "Word")
                        p.word_typed = true;
                    else if (tv.text == "Bool")
                        p.word_typed = false;
                    else {
                        add_diag(diags, tv.loc, "unsupported SrcType '" + tv.text + "'");
                        ok = false;
                    }
                }
            }
            if (p.gate == FbdGate::Not && p.cardinality != 1) {
                add_diag(diags, c.loc, "Not part UId " + std::to_string(p.uid) +
                                           " must be unary, got cardinality " +
                                           std::to_string(p.cardinality));
                ok = false;
                continue;
            }
            if (p.gate != FbdGate::Not && p.cardinality < 2) {
                add_diag(diags, c.loc, "Part UId " + std::to_string(p.uid) +
                                           " needs cardinality >= 2");
                ok = false;
                continue;
            }
            net.parts.push_back(std::move(p));
        } else if (c.name == "Wire") {
            FbdWire w;
            w.loc = c.loc;
            if (!parse_int_attr(c, "UId", w.uid, diags)) {
                ok = false;
                continue;
            }
            for (const auto& ep : c.children) {
                FbdEndpoint e;
                if (ep.name == "IdentCon") {
                    e.is_ident = true;
                    if (!parse_int_attr(ep, "UId", e.uid, diags)) {
                        ok = false;
                        continue;
                    }
                } else if (ep.name == "NameCon") {
                    e.is_ident = false;
                    if (!parse_int_attr(ep, "UId", e.uid, diags)) {
                        ok = false;
                        continue;
                    }
                    if (const std::string* port = ep.attr("Name"))
                        e.port = *port;
                } else {
                    continue;
                }
                w.endpoints.push_back(std::move(e));
            }
            if (w.endpoints.size() < 2) {
                add_diag(diags, c.loc, "Wire UId " + std::to_string(w.uid) +
                                           " needs at least two endpoints");
                ok = false;
                continue;
            }
            net.wires.push_back(std::move(w));
        }
        // other elements are ignored
    }
    return ok;
}

// UId references resolve, ports are in1..inN/out, each part input is wired
// exactly once, each part out at least once.
inline bool validate_network(const FbdNetwork& net, Diagnostics& diags) {
    bool ok = true;
    std::map<std::pair<int, std::string>, int> input_wired;
    std::set<int> out_wired;
    for (const auto& w : net.wires) {
        for (const auto& e : w.endpoints) {
            if (e.is_ident) {
                if (!net.access(e.uid)) {
                    add_diag(diags, w.loc, "Wire UId " + std::to_string(w.uid) +
                                               " references unknown UId " + std::to_string(e.uid));
                    ok = false;
                }
                continue;
            }
            const FbdPart* p = net.part(e.uid);
            if (!p) {
                add_diag(diags, w.loc, "Wire UId " + std::to_string(w.uid) +
                                           " references unknown part UId " + std::to_string(e.uid));
                ok = false;
                continue;
            }
            if (e.port == "out") {
                out_wired.insert(e.uid);
                continue;
            }
            bool good_port = false;
            if (e.port.size() > 2 && e.port.compare(0, 2, "in") == 0) {
                try {
                    int k = std::stoi(e.port.substr(2));
                    good_port = k >= 1 && k <= p->cardinality;
                } catch (...) {
                }
            }
            if (!good_port) {
                add_diag(diags, w.loc, "invalid port '" + e.port + "' on part UId " +
                                           std::to_string(e.uid) + " (cardinality " +
                                           std::to_string(p->cardinality) + ")");
                ok = false;
                continue;
            }
            if (++input_wired[{e.uid, e.port}] > 1) {
                add_diag(diags, w.loc, "port " + e.port + " of part UId " + std::to_string(e.uid) +
                                           " is wired more than once");
                ok = false;
            }
        }
    }
    for (const auto& p : net.parts) {
        for (int k = 1; k <= p.cardinality; ++k) {
            if (!input_wired.count({p.uid, "in" + std::to_string(k)})) {
                add_diag(diags, p.loc, "input port in" + std::to_string(k) + " of part UId " +
                                           std::to_string(p.uid) + " is unwired");
                ok = false;
            }
        }
        if (!out_wired.count(p.uid)) {
            add_diag(diags, p.loc,
                     "out port of part UId " + std::to_string(p.uid) + " drives nothing");
            ok = false;
        }
    }
    return ok;
}

}  // namespace detail

// Parses the gate-network XML dialect. A document may wrap networks in
// <Network> elements (document order preserved) or hold one flat element soup.
inline std::optional<std::vector<FbdNetwork>> parse_fbd_xml(std::string_view text,
                                                            Diagnostics& diags) {
    auto roots = parse_xml_fragment(text, diags);
    if (!roots)
        return std::nullopt;
    std::vector<FbdNetwork> nets;
    bool ok = true;
    const XmlNode& first = (*roots)[0];
    if (roots->size() == 1 && !first.child("Access") && !first.child("Part") &&
        !first.child("Wire")) {
        // wrapper document: each <Network> child is one network, document order
        for (const auto& c : first.children) {
            if (c.name != "Network" && !c.child("Access") && !c.child("Part"))
                continue;
            FbdNetwork net;
            ok = detail::collect_network(c, net, diags) && ok;
            nets.push_back(std::move(net));
        }
        if (nets.empty()) {
            add_diag(diags, first.loc, "document contains no gate network");
            return std::nullopt;
        }
    } else if (roots->size() == 1) {
        FbdNetwork net;
        ok = detail::collect_network(first, net, diags);
        nets.push_back(std::move(net));
    } else {
        // flat fragment: all top-level elements form one network
        FbdNetwork net;
        XmlNode wrapper;
        wrapper.children = std::move(*roots);
        ok = detail::collect_network(wrapper, net, diags);
        nets.push_back(std::move(net));
    }
    for (const auto& net : nets)
        ok = detail::validate_network(net, diags) && ok;
    if (!ok)
        return std::nullopt;
    return nets;
}

struct LoweredNetwork {
    std::vector<Stmt> stmts;
    std::vector<VarDecl> temps;  // fresh temporaries for part-to-part values
};

namespace detail {

struct EmitUnit {
    bool is_part = false;
    int uid = 0;          // part uid or wire uid
    std::size_t index = 0;  // into parts/wires
    long order_key() const { return is_part ? uid : (1L << 20) + uid; }
};

}  // namespace detail

// Lowers one gate network to assignments in dependency order. Gates become one
// assignment each, targeting the wired variable directly when the out pin
// feeds exactly one variable, otherwise a fresh `fbd_t<uid>` temporary.
inline std::optional<LoweredNetwork> lower_to_ir(const FbdNetwork& net,
                                                 const std::vector<VarDecl>& decls,
                                                 Diagnostics& diags) {
    if (!detail::validate_network(net, diags))
        return std::nullopt;

    auto find_decl = [&](const std::string& name) -> const VarDecl* {
        for (const auto& d : decls)
            if (d.name == name)
                return &d;
        return nullptr;
    };
    bool ok = true;
    for (const auto& a : net.accesses) {
        if (!find_decl(a.symbol())) {
            add_diag(diags, a.loc, "access symbol '" + a.symbol() + "' has no declaration");
            ok = false;
        }
    }
    if (!ok)
        return std::nullopt;

    // source of each part input port / copy wire: either a part uid or a symbol
    struct Source {
        bool from_part = false;
        int part_uid = 0;
        std::string symbol;
    };
    std::map<std::pair<int, std::string>, Source> port_source;
    struct CopyWire {
        int wire_uid;
        std::string from, to;
        SourceLoc loc;
    };
    std::vector<CopyWire> copies;
    // sinks of each part's out pin
    std::map<int, std::vector<std::string>> part_var_sinks;
    std::map<int, std::vector<std::pair<int, std::string>>> part_port_sinks;

    for (const auto& w : net.wires) {
        // the source endpoint: a NameCon 'out' if present, else the first endpoint
        int src_idx = 0;
        for (std::size_t i = 0; i < w.endpoints.size(); ++i)
            if (!w.endpoints[i].is_ident && w.endpoints[i].port == "out")
                src_idx = static_cast<int>(i);
        const FbdEndpoint& src = w.endpoints[static_cast<std::size_t>(src_idx)];
        Source source;
        if (src.is_ident) {
            source.symbol = net.access(src.uid)->symbol();
        } else {
            source.from_part = true;
            source.part_uid = src.uid;
        }
        for (std::size_t i = 0; i < w.endpoints.size(); ++i) {
            if (static_cast<int>(i) == src_idx)
                continue;
            const FbdEndpoint& dst = w.endpoints[i];
            if (dst.is_ident) {
                std::string sym = net.access(dst.uid)->symbol();
                if (source.from_part) {
                    part_var_sinks[source.part_uid].push_back(sym);
                } else {
                    copies.push_back({w.uid, source.symbol, sym, w.loc});
                }
            } else {
                if (dst.port == "out") {
                    add_diag(diags, w.loc, "Wire UId " + std::to_string(w.uid) +
                                               " connects two out ports");
                    return std::nullopt;
                }
                port_source[{dst.uid, dst.port}] = source;
                if (source.from_part)
                    part_port_sinks[source.part_uid].push_back({dst.uid, dst.port});
            }
        }
    }

    // dependency graph over emission units: part-to-part wires plus
    // variable-mediated writer -> reader edges
    std::vector<detail::EmitUnit> units;
    for (std::size_t i = 0; i < net.parts.size(); ++i)
        units.push_back({true, net.parts[i].uid, i});
    for (std::size_t i = 0; i < copies.size(); ++i)
        units.push_back({false, copies[i].wire_uid, i});
    std::sort(units.begin(), units.end(),
              [](const detail::EmitUnit& a, const detail::EmitUnit& b) {
                  return a.order_key() < b.order_key();
              });

    std::map<std::string, std::vector<std::size_t>> writers;  // symbol -> unit positions
    for (std::size_t u = 0; u < units.size(); ++u) {
        if (units[u].is_part) {
            for (const auto& sym : part_var_sinks[units[u].uid])
                writers[sym].push_back(u);
        } else {
            writers[copies[units[u].index].to].push_back(u);
        }
    }
    std::vector<std::vector<std::size_t>> deps(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        auto add_symbol_dep = [&](const std::string& sym) {
            auto it = writers.find(sym);
            if (it != writers.end())
                for (std::size_t w : it->second)
                    if (w != u)
                        deps[u].push_back(w);
        };
        if (units[u].is_part) {
            const FbdPart& p = net.parts[units[u].index];
            for (int k = 1; k <= p.cardinality; ++k) {
                const Source& s = port_source.at({p.uid, "in" + std::to_string(k)});
                if (s.from_part) {
                    for (std::size_t v = 0; v < units.size(); ++v)
                        if (units[v].is_part && units[v].uid == s.part_uid)
                            deps[u].push_back(v);
                } else {
                    add_symbol_dep(s.symbol);
                }
            }
        } else {
            add_symbol_dep(copies[units[u].index].from);
        }
    }

    // Kahn topological sort, smallest order_key first (deterministic)
    std::vector<int> indeg(units.size(), 0);
    std::vector<std::vector<std::size_t>> fanout(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        for (std::size_t d : deps[u]) {
            fanout[d].push_back(u);
            ++indeg[u];
        }
    }
    std::vector<std::size_t> order;
    std::set<std::size_t> ready;
    for (std::size_t u = 0; u < units.size(); ++u)
        if (indeg[u] == 0)
            ready.insert(u);
    while (!ready.empty()) {
        std::size_t u = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(u);
        for (std::size_t v : fanout[u])
            if (--indeg[v] == 0)
                ready.insert(v);
    }
    if (order.size() != units.size()) {
        std::string cyc;
        for (std::size_t u = 0; u < units.size(); ++u) {
            if (indeg[u] > 0 && units[u].is_part)
                cyc += (cyc.empty() ? "" : ", ") + std::to_string(units[u].uid);
        }
        add_diag(diags, {}, "wiring cycle through part UIds {" + cyc + "}");
        return std::nullopt;
    }

    LoweredNetwork out;
    std::map<int, std::string> part_result;  // part uid -> variable/temp holding its value
    for (std::size_t pos : order) {
        const detail::EmitUnit& u = units[pos];
        if (!u.is_part) {
            const CopyWire& c = copies[u.index];
            Stmt s(StmtKind::Assign, c.loc);
            s.lhs = mk_var(c.to, c.loc);
            s.rhs = mk_var(c.from, c.loc);
            out.stmts.push_back(std::move(s));
            continue;
        }
        const FbdPart& p = net.parts[u.index];
        auto operand = [&](int k) -> ExprPtr {
            const Source& s = port_source.at({p.uid, "in" + std::to_string(k)});
            if (s.from_part)
                return mk_var(part_result.at(s.part_uid), p.loc);
            return mk_var(s.symbol, p.loc);
        };
        ExprPtr rhs;
        if (p.gate == FbdGate::Not) {
            rhs = mk_not(operand(1));
        } else {
            ExprKind k = p.gate == FbdGate::And ? ExprKind::And
                         : p.gate == FbdGate::Or ? ExprKind::Or
                                                 : ExprKind::Xor;
            rhs = operand(1);
            for (int i = 2; i <= p.cardinality; ++i)
                rhs = mk_binary(k, std::move(rhs), operand(i), p.loc);
        }
        const auto& var_sinks = part_var_sinks[p.uid];
        const auto& port_sinks = part_port_sinks[p.uid];
        std::string target;
        if (var_sinks.size() == 1 && port_sinks.empty()) {
            target = var_sinks[0];
        } else {
            target = "fbd_t" + std::to_string(p.uid);
            VarDecl tmp;
            tmp.name = target;
            tmp.dtype = p.word_typed ? DataType::word() : DataType::boolean();
            tmp.section = Section::Temp;
            out.temps.push_back(std::move(tmp));
        }
        Stmt s(StmtKind::Assign, p.loc);
        s.lhs = mk_var(target, p.loc);
        s.rhs = std::move(rhs);
        out.stmts.push_back(std::move(s));
        part_result[p.uid] = target;
        if (!(var_sinks.size() == 1 && port_sinks.empty())) {
            for (const auto& sym : var_sinks) {
                Stmt cp(StmtKind::Assign, p.loc);
                cp.lhs = mk_var(sym, p.loc);
                cp.rhs = mk_var(target, p.loc);
                out.stmts.push_back(std::move(cp));
            }
        }
    }
    return out;
}

// Builds a complete FC from the networks of one document: sections inferred
// (read-only symbols become inputs, written symbols outputs), scalar types
// from the connected gates' SrcType. `section_overrides` reassigns sections
// by symbol name (e.g. to mark configuration words).
inline std::optional<Pou> fbd_to_pou(const std::vector<FbdNetwork>& networks, std::string pou_name,
                                     const std::map<std::string, Section>& section_overrides,
                                     Diagnostics& diags) {
    // infer symbol types and read/write roles across all networks
    std::map<std::string, bool> word_typed;  // symbol -> uses word gates
    std::map<std::string, bool> written;
    std::set<std::string> symbols;
    bool ok = true;
    for (const auto& net : networks) {
        std::map<int, const FbdAccess*> by_uid;
        for (const auto& a : net.accesses) {
            by_uid[a.uid] = &a;
            symbols.insert(a.symbol());
        }
        auto note_type = [&](const std::string& sym, bool word, SourceLoc loc) {
            auto it = word_typed.find(sym);
            if (it == word_typed.end()) {
                word_typed[sym] = word;
            } else if (it->second != word) {
                add_diag(diags, loc, "symbol '" + sym + "' is wired to both Bool and Word gates");
                ok = false;
            }
        };
        for (const auto& w : net.wires) {
            int src_idx = 0;
            for (std::size_t i = 0; i < w.endpoints.size(); ++i)
                if (!w.endpoints[i].is_ident && w.endpoints[i].port == "out")
                    src_idx = static_cast<int>(i);
            for (std::size_t i = 0; i < w.endpoints.size(); ++i) {
                const FbdEndpoint& e = w.endpoints[i];
                if (e.is_ident) {
                    const FbdAccess* a = by_uid.count(e.uid) ? by_uid[e.uid] : nullptr;
                    if (!a)
                        continue;  // validation reports this
                    bool is_sink = static_cast<int>(i) != src_idx;
                    if (is_sink)
                        written[a->symbol()] = true;
                    // peer part determines the type
                    for (const auto& e2 : w.endpoints) {
                        if (!e2.is_ident) {
                            if (const FbdPart* p = net.part(e2.uid))
                                note_type(a->symbol(), p->word_typed, w.loc);
                        }
                    }
                }
            }
        }
    }
    if (!ok)
        return std::nullopt;

    Pou pou;
    pou.name = std::move(pou_name);
    pou.kind = PouKind::FC;
    for (const auto& sym : symbols) {
        VarDecl d;
        d.name = sym;
        bool word = word_typed.count(sym) ? word_typed[sym] : false;
        d.dtype = word ? DataType::word() : DataType::boolean();
        d.section = written.count(sym) && written[sym] ? Section::Output : Section::Input;
        auto ov = section_overrides.find(sym);
        if (ov != section_overrides.end())
            d.section = ov->second;
        pou.decls.push_back(std::move(d));
    }
    std::sort(pou.decls.begin(), pou.decls.end(), [](const VarDecl& a, const VarDecl& b) {
        if (a.section != b.section)
            return static_cast<int>(a.section) < static_cast<int>(b.section);
        return a.name < b.name;
    });

    for (const auto& net : networks) {
        auto lowered = lower_to_ir(net, pou.decls, diags);
        if (!lowered)
            return std::nullopt;
        for (auto& tmp : lowered->temps) {
            if (!pou.find_decl(tmp.name))
                pou.decls.push_back(std::move(tmp));
        }
        for (auto& s : lowered->stmts)
            pou.body.push_back(std::move(s));
    }
    return pou;
}

}  // namespace scanverif
