#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "scanverif/encoder.hpp"

namespace scanverif {

namespace detail_smv {

inline std::string sanitize(const std::string& var) {
    std::string n;
    for (char c : var)
        n += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    return n;
}

inline std::string bit_name(const std::string& var, int bit, bool word_lane) {
    std::string n = sanitize(var);
    return word_lane ? n + "__" + std::to_string(bit) : n;
}

inline std::string flat_bit_name(const std::string& key, std::size_t flat_idx, const DataType& t) {
    // flattened signals: arrays indexed elem-major, words LSB-first
    if (t.is_bool())
        return bit_name(key, 0, false);
    if (t.is_word())
        return bit_name(key, static_cast<int>(flat_idx), true);
    std::uint64_t per_elem = t.elem->bit_width();
    std::size_t elem = flat_idx / per_elem;
    std::string sub = key + "[" + std::to_string(t.lo + static_cast<int>(elem)) + "]";
    return flat_bit_name(sub, flat_idx % per_elem, *t.elem);
}

}  // namespace detail_smv

// Renders the single-cycle transition system as an SMV module: frozen
// variables for CONFIG, unconstrained state variables for INPUT (fresh each
// step), assigned state variables for persistent state, one DEFINE per gate,
// and one INVARSPEC for the selected requirement. Deterministic formatting.
inline std::string emit_smv(const TypedProgram& tp, const std::string& requirement_id,
                            std::size_t bound_hint) {
    // no structural hashing: the export keeps the program's formula structure
    // instead of collapsing tautological assertions to TRUE
    CycleTemplate t = encode_cycle(tp, /*hashing=*/false);
    const BitCircuit& c = t.circuit;
    const Pou& entry = tp.entry_pou();

    std::ostringstream os;
    os << "-- generated by scanverif: case " << requirement_id << ", entry " << entry.name << "\n";
    os << "-- equivalent bounded check depth: K=" << bound_hint << "\n";
    os << "MODULE main\n";

    // node reference: inputs by name, gates as g<id>, constants inline
    std::map<NodeId, std::string> names;
    auto ref = [&](NodeId n) -> std::string {
        if (n == 0)
            return "FALSE";
        if (n == 1)
            return "TRUE";
        auto it = names.find(n);
        if (it != names.end())
            return it->second;
        return "g" + std::to_string(n);
    };

    std::ostringstream frozen, ivars, states;
    int frozen_count = 0, input_count = 0, state_count = 0;
    const auto& nodes = c.nodes();
    for (std::size_t i = 2; i < nodes.size(); ++i) {
        if (nodes[i].op != Gate::Input)
            continue;
        const InputBitInfo& info = c.inputs()[nodes[i].a];
        std::string nm = detail_smv::bit_name(info.var, info.bit, info.word_lane);
        names[static_cast<NodeId>(i)] = nm;
        if (info.cls == BitClass::Config) {
            frozen << "  " << nm << " : boolean;\n";
            ++frozen_count;
        } else if (info.cls == BitClass::Input) {
            ivars << "  " << nm << " : boolean;\n";
            ++input_count;
        } else {
            states << "  " << nm << " : boolean;\n";
            ++state_count;
        }
    }
    if (frozen_count)
        os << "FROZENVAR\n" << frozen.str();
    if (input_count)
        os << "VAR -- inputs, unconstrained (fresh nondeterministic value each step)\n"
           << ivars.str();
    if (state_count)
        os << "VAR -- persistent state\n" << states.str();

    std::ostringstream defines;
    bool any_define = false;
    for (std::size_t i = 2; i < nodes.size(); ++i) {
        const CircuitNode& n = nodes[i];
        if (n.op == Gate::Input)
            continue;
        std::string rhs;
        switch (n.op) {
        case Gate::And2: rhs = ref(n.a) + " & " + ref(n.b); break;
        case Gate::Or2: rhs = ref(n.a) + " | " + ref(n.b); break;
        case Gate::Xor2: rhs = ref(n.a) + " xor " + ref(n.b); break;
        case Gate::Not: rhs = "!" + ref(n.a); break;
        default: continue;
        }
        defines << "  g" << i << " := " << rhs << ";\n";
        any_define = true;
    }

    // named defines for the entry outputs (readability of the export)
    for (const auto& sig : t.signals.outputs) {
        for (std::size_t b = 0; b < sig.bits.size(); ++b) {
            std::string nm = detail_smv::flat_bit_name(sig.name, b, sig.type);
            if (names.count(sig.bits[b]) || c.is_const(sig.bits[b]))
                defines << "  " << nm << " := " << ref(sig.bits[b]) << ";\n";
            else
                defines << "  " << nm << " := g" << sig.bits[b] << ";\n";
            any_define = true;
        }
    }
    if (any_define)
        os << "DEFINE\n" << defines.str();

    // init/next for persistent state
    if (state_count) {
        os << "ASSIGN\n";
        std::vector<StateCell> cells = collect_state_cells(tp);
        std::map<std::string, const NamedSignal*> after;
        for (const auto& sig : t.signals.statics_after)
            after[sig.name] = &sig;
        for (const auto& cell : cells) {
            Value init = cell.decl->init ? *cell.decl->init : Value::zero_of(cell.decl->dtype);
            const NamedSignal* sig = after.at(cell.key);
            std::vector<bool> init_bits;
            auto flatten_val = [&](auto&& self, const Value& v) -> void {
                if (v.kind == TypeKind::Bool)
                    init_bits.push_back(v.b);
                else if (v.kind == TypeKind::Word)
                    for (int b = 0; b < kWordBits; ++b)
                        init_bits.push_back(word_bit(v.w, b));
                else
                    for (const auto& e : v.elems)
                        self(self, e);
            };
            flatten_val(flatten_val, init);
            for (std::size_t b = 0; b < sig->bits.size(); ++b) {
                std::string nm = detail_smv::flat_bit_name(cell.key, b, cell.decl->dtype);
                os << "  init(" << nm << ") := " << (init_bits[b] ? "TRUE" : "FALSE") << ";\n";
                os << "  next(" << nm << ") := " << ref(sig->bits[b]) << ";\n";
            }
        }
    }

    // the invariant: all in-cycle evaluations of the requirement hold
    std::string inv;
    for (const auto& ab : t.signals.asserts) {
        if (ab.req_id != requirement_id)
            continue;
        std::string r = ref(ab.bit);
        inv = inv.empty() ? r : inv + " & " + r;
    }
    if (inv.empty())
        inv = "TRUE";
    os << "INVARSPEC " << inv << ";\n";
    return os.str();
}

}  // namespace scanverif
