#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scanverif/cnf.hpp"
#include "scanverif/encoder.hpp"
#include "scanverif/interp.hpp"
#include "scanverif/solver.hpp"

namespace scanverif {

enum class Outcome : std::uint8_t { Satisfied, Violated, Unknown, EngineError };

inline const char* outcome_name(Outcome o) {
    switch (o) {
    case Outcome::Satisfied: return "satisfied";
    case Outcome::Violated: return "violated";
    case Outcome::Unknown: return "unknown";
    case Outcome::EngineError: return "engine_error";
    }
    return "?";
}

struct EngineStats {
    double encode_seconds = 0.0;
    double solve_seconds = 0.0;
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
    std::uint64_t learned_clauses = 0;
    std::uint64_t clauses = 0;
    std::uint64_t variables = 0;
    std::uint64_t evaluations = 0;  // explicit engine: scenarios executed
};

// Concrete violating run: frozen config, per-cycle inputs, and the engine's
// view of outputs/state per cycle. Replaying it through the interpreter must
// reproduce the assertion failure at `violating_cycle`.
struct Counterexample {
    Valuation config;
    std::vector<Valuation> inputs;
    std::vector<Valuation> outputs;
    std::vector<std::map<std::string, Value>> statics_after;
    std::string requirement_id;
    std::size_t violating_cycle = 0;  // 0-based
};

struct Verdict {
    Outcome outcome = Outcome::Unknown;
    std::size_t bound = 0;   // Satisfied: holds up to this many cycles
    bool complete = false;   // bound exhausts the program (combinational case)
    std::optional<Counterexample> cex;
    std::string message;
    EngineStats stats;
};

struct VerificationCase {
    std::shared_ptr<const TypedProgram> program;
    std::string requirement_id;
    std::size_t bound = 1;
};

struct EngineLimits {
    double timeout_seconds = 300.0;
    std::uint64_t max_conflicts = 10'000'000;
    std::uint64_t explicit_bit_budget = 24;
};

// Default unroll bound: one cycle suffices for combinational programs,
// stateful ones get 16 cycles unless overridden.
inline std::size_t default_bound(const TypedProgram& tp) {
    return is_combinational(tp) ? 1 : 16;
}

namespace detail_engine {

// scalar enumeration cells of the nondeterministic variables, flattened in
// declaration order (arrays element-major)
struct EnumCell {
    const VarDecl* decl = nullptr;
    std::vector<int> elem_path;  // indices into nested arrays
    bool is_word = false;
    std::size_t cycle = 0;  // 0 for config cells
    bool is_config = false;
};

inline void flatten_cells(const VarDecl& d, const DataType& t, std::vector<int>& path,
                          std::size_t cycle, bool is_config, std::vector<EnumCell>& out) {
    if (t.is_array()) {
        for (int i = 0; i < t.array_len(); ++i) {
            path.push_back(i);
            flatten_cells(d, *t.elem, path, cycle, is_config, out);
            path.pop_back();
        }
        return;
    }
    out.push_back({&d, path, t.is_word(), cycle, is_config});
}

inline Value* cell_storage(Valuation& v, const EnumCell& cell) {
    Value* cur = &v[cell.decl->name];
    for (int idx : cell.elem_path)
        cur = &cur->elems[static_cast<std::size_t>(idx)];
    return cur;
}

inline Value value_from_bits(const DataType& t, const std::vector<bool>& bits, std::size_t& cur) {
    Value v;
    v.kind = t.kind;
    switch (t.kind) {
    case TypeKind::Bool:
        v.b = bits[cur++];
        break;
    case TypeKind::Word: {
        Word w = 0;
        for (int b = 0; b < kWordBits; ++b)
            if (bits[cur++])
                w = static_cast<Word>(w | (1u << b));
        v.w = w;
        break;
    }
    case TypeKind::Array:
        for (int i = 0; i < t.array_len(); ++i)
            v.elems.push_back(value_from_bits(*t.elem, bits, cur));
        break;
    default:
        break;
    }
    return v;
}

}  // namespace detail_engine

struct ReplayReport {
    bool confirmed = false;
    std::string detail;
};

// Replays a counterexample through the reference interpreter: the named
// requirement must fail at the stated cycle and every engine snapshot must
// match. Divergence means an engine bug and is reported, not thrown.
inline ReplayReport replay_counterexample(const VerificationCase& vc, const Counterexample& cex) {
    ReplayReport rep;
    const TypedProgram& tp = *vc.program;
    Interpreter interp(tp);
    Trace tr;
    try {
        tr = interp.run_scenario(cex.config, cex.inputs);
    } catch (const std::exception& e) {
        rep.detail = std::string("replay failed to run: ") + e.what();
        return rep;
    }
    if (cex.violating_cycle >= tr.cycles.size()) {
        rep.detail = "violating cycle " + std::to_string(cex.violating_cycle + 1) +
                     " beyond trace length";
        return rep;
    }
    bool failed = false;
    bool evaluated = false;
    for (const auto& a : tr.cycles[cex.violating_cycle].assertions) {
        if (a.req_id == cex.requirement_id) {
            evaluated = true;
            if (!a.holds)
                failed = true;
        }
    }
    if (!evaluated) {
        rep.detail = "requirement '" + cex.requirement_id + "' was not evaluated at cycle " +
                     std::to_string(cex.violating_cycle + 1);
        return rep;
    }
    if (!failed) {
        rep.detail = "assertion '" + cex.requirement_id + "' holds at cycle " +
                     std::to_string(cex.violating_cycle + 1);
        return rep;
    }
    // engine snapshots must agree signal-for-signal with the interpreter
    for (std::size_t k = 0; k < cex.inputs.size(); ++k) {
        if (k < cex.outputs.size()) {
            for (const auto& [name, val] : cex.outputs[k]) {
                auto it = tr.cycles[k].outputs.find(name);
                if (it == tr.cycles[k].outputs.end() || !(it->second == val)) {
                    rep.detail = "cycle " + std::to_string(k + 1) + " output " + name +
                                 ": engine=" + val.str() + " interpreter=" +
                                 (it == tr.cycles[k].outputs.end() ? "<missing>" : it->second.str());
                    return rep;
                }
            }
        }
        if (k < cex.statics_after.size()) {
            for (const auto& [name, val] : cex.statics_after[k]) {
                auto it = tr.cycles[k].statics_after.find(name);
                if (it == tr.cycles[k].statics_after.end() || !(it->second == val)) {
                    rep.detail = "cycle " + std::to_string(k + 1) + " state " + name +
                                 ": engine=" + val.str() + " interpreter=" +
                                 (it == tr.cycles[k].statics_after.end() ? "<missing>"
                                                                         : it->second.str());
                    return rep;
                }
            }
        }
    }
    rep.confirmed = true;
    rep.detail = "confirmed: '" + cex.requirement_id + "' fails at cycle " +
                 std::to_string(cex.violating_cycle + 1);
    return rep;
}

// Exhaustive enumeration of all config x input-sequence combinations in
// lexicographic order (declaration order, configs first, last cell fastest).
// Refuses instances beyond the bit budget.
inline Verdict verify_explicit(const VerificationCase& vc, const EngineLimits& limits = {}) {
    Verdict v;
    const TypedProgram& tp = *vc.program;
    std::size_t K = vc.bound;
    std::uint64_t bits = tp.log2_input_space() * K;
    if (bits > limits.explicit_bit_budget) {
        v.outcome = Outcome::Unknown;
        v.message = "explicit enumeration needs " + std::to_string(bits) +
                    " nondeterministic bits (budget " +
                    std::to_string(limits.explicit_bit_budget) + ")";
        return v;
    }
    if (!tp.program.find_requirement(vc.requirement_id)) {
        v.outcome = Outcome::EngineError;
        v.message = "unknown requirement '" + vc.requirement_id + "'";
        return v;
    }

    Interpreter interp(tp);
    std::vector<detail_engine::EnumCell> cells;
    for (const VarDecl* d : interp.nondet_vars()) {
        if (d->section != Section::Config)
            continue;
        std::vector<int> path;
        detail_engine::flatten_cells(*d, d->dtype, path, 0, true, cells);
    }
    for (std::size_t k = 0; k < K; ++k) {
        for (const VarDecl* d : interp.nondet_vars()) {
            if (d->section != Section::Input)
                continue;
            std::vector<int> path;
            detail_engine::flatten_cells(*d, d->dtype, path, k, false, cells);
        }
    }

    Valuation config;
    std::vector<Valuation> inputs(K);
    for (const VarDecl* d : interp.nondet_vars()) {
        Value zero = Value::zero_of(d->dtype);
        if (d->section == Section::Config)
            config[d->name] = zero;
        else
            for (auto& in : inputs)
                in[d->name] = zero;
    }
    std::vector<std::uint32_t> counter(cells.size(), 0);

    auto t0 = std::chrono::steady_clock::now();
    auto deadline_hit = [&]() {
        auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(now - t0).count() > limits.timeout_seconds;
    };

    while (true) {
        ++v.stats.evaluations;
        // run cycles directly; the full trace is only rebuilt on violation
        CycleState st = interp.initial_state(config);
        std::size_t violated_at = K;
        for (std::size_t k = 0; k < K && violated_at == K; ++k) {
            CycleOutcome oc = interp.run_cycle(st, inputs[k]);
            for (const auto& a : oc.assertions) {
                if (a.req_id == vc.requirement_id && !a.holds) {
                    violated_at = k;
                    break;
                }
            }
            st = std::move(oc.next_state);
        }
        if (violated_at < K) {
            Trace tr = interp.run_scenario(config, inputs);
            Counterexample cex;
            cex.config = config;
            cex.inputs = inputs;
            cex.requirement_id = vc.requirement_id;
            cex.violating_cycle = violated_at;
            for (const auto& rec : tr.cycles) {
                cex.outputs.push_back(rec.outputs);
                cex.statics_after.push_back(rec.statics_after);
            }
            v.outcome = Outcome::Violated;
            v.cex = std::move(cex);
            auto now = std::chrono::steady_clock::now();
            v.stats.solve_seconds = std::chrono::duration<double>(now - t0).count();
            return v;
        }
        // odometer: advance the last cell first
        std::size_t i = cells.size();
        bool done = cells.empty();
        while (i-- > 0) {
            const auto& cell = cells[i];
            Valuation& target = cell.is_config ? config : inputs[cell.cycle];
            Value* store = detail_engine::cell_storage(target, cell);
            std::uint32_t limit = cell.is_word ? 0xFFFFu : 1u;
            if (counter[i] < limit) {
                ++counter[i];
                if (cell.is_word)
                    store->w = static_cast<Word>(counter[i]);
                else
                    store->b = counter[i] != 0;
                break;
            }
            counter[i] = 0;
            if (cell.is_word)
                store->w = 0;
            else
                store->b = false;
            if (i == 0)
                done = true;
        }
        if (done)
            break;
        if ((v.stats.evaluations & 0x3FF) == 0 && deadline_hit()) {
            v.outcome = Outcome::Unknown;
            v.message = "explicit enumeration timed out after " +
                        std::to_string(v.stats.evaluations) + " evaluations";
            return v;
        }
    }
    auto now = std::chrono::steady_clock::now();
    v.stats.solve_seconds = std::chrono::duration<double>(now - t0).count();
    v.outcome = Outcome::Satisfied;
    v.bound = K;
    v.complete = is_combinational(tp);
    return v;
}

// SAT-based bounded model checking: unrolls K cycles, converts to CNF, and
// decides with the internal CDCL solver. SAT models decode to replay-validated
// counterexamples; divergence from the interpreter is reported as an engine
// error, never as a verdict.
inline Verdict verify_bmc(const VerificationCase& vc, const EngineLimits& limits = {}) {
    Verdict v;
    const TypedProgram& tp = *vc.program;
    if (!tp.program.find_requirement(vc.requirement_id)) {
        v.outcome = Outcome::EngineError;
        v.message = "unknown requirement '" + vc.requirement_id + "'";
        return v;
    }
    std::size_t K = vc.bound;

    auto t0 = std::chrono::steady_clock::now();
    std::set<std::string> filter{vc.requirement_id};
    UnrolledSystem u = unroll(tp, K, &filter);
    CnfFormula f = to_cnf(u.circuit, u.violation);
    auto t1 = std::chrono::steady_clock::now();
    v.stats.encode_seconds = std::chrono::duration<double>(t1 - t0).count();
    v.stats.variables = static_cast<std::uint64_t>(f.num_vars);
    v.stats.clauses = f.clauses.size();

    CdclSolver solver(f.num_vars);
    for (const auto& cl : f.clauses)
        solver.add_clause(cl);
    SolveLimits sl;
    sl.max_conflicts = limits.max_conflicts;
    sl.timeout_seconds = limits.timeout_seconds;
    SolveStats st;
    SatOutcome out = solver.solve(sl, st);
    auto t2 = std::chrono::steady_clock::now();
    v.stats.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    v.stats.decisions = st.decisions;
    v.stats.conflicts = st.conflicts;
    v.stats.propagations = st.propagations;
    v.stats.learned_clauses = st.learned_clauses;

    if (out == SatOutcome::Unknown) {
        v.outcome = Outcome::Unknown;
        v.message = "resource limit exhausted (conflicts=" + std::to_string(st.conflicts) + ")";
        return v;
    }
    if (out == SatOutcome::Unsat) {
        v.outcome = Outcome::Satisfied;
        v.bound = K;
        v.complete = is_combinational(tp);
        return v;
    }

    // decode the model
    const std::vector<bool>& model = solver.model();
    auto node_value = [&](NodeId n) -> bool {
        if (n == 0)
            return false;
        if (n == 1)
            return true;
        int lit = f.node_lit[n];
        return lit > 0 ? model[static_cast<std::size_t>(lit)]
                       : !model[static_cast<std::size_t>(-lit)];
    };

    // input bits were created config-first then cycle-by-cycle, mirroring the
    // declaration walk; consume them with the same walk
    std::vector<bool> input_bits;
    for (std::size_t i = 0; i < u.circuit.num_nodes(); ++i)
        if (u.circuit.nodes()[i].op == Gate::Input)
            input_bits.push_back(node_value(static_cast<NodeId>(i)));

    Counterexample cex;
    cex.requirement_id = vc.requirement_id;
    std::size_t cur = 0;
    const Pou& entry = tp.entry_pou();
    for (const auto& d : entry.decls)
        if (d.section == Section::Config)
            cex.config[d.name] = detail_engine::value_from_bits(d.dtype, input_bits, cur);
    for (std::size_t k = 0; k < K; ++k) {
        Valuation in;
        for (const auto& d : entry.decls)
            if (d.section == Section::Input)
                in[d.name] = detail_engine::value_from_bits(d.dtype, input_bits, cur);
        cex.inputs.push_back(std::move(in));
    }

    bool found = false;
    for (std::size_t k = 0; k < u.cycles.size() && !found; ++k) {
        for (const auto& ab : u.cycles[k].asserts) {
            if (ab.req_id != vc.requirement_id)
                continue;
            if (!node_value(ab.bit)) {
                cex.violating_cycle = k;
                found = true;
                break;
            }
        }
    }
    if (!found) {
        v.outcome = Outcome::EngineError;
        v.message = "SAT model asserts a violation but no assertion bit is false";
        return v;
    }
    // engine's view of outputs/state, decoded from the model
    for (std::size_t k = 0; k < u.cycles.size(); ++k) {
        Valuation outs;
        for (const auto& sig : u.cycles[k].outputs) {
            std::vector<bool> bits;
            for (NodeId n : sig.bits)
                bits.push_back(node_value(n));
            std::size_t c2 = 0;
            outs[sig.name] = detail_engine::value_from_bits(sig.type, bits, c2);
        }
        cex.outputs.push_back(std::move(outs));
        std::map<std::string, Value> sts;
        for (const auto& sig : u.cycles[k].statics_after) {
            std::vector<bool> bits;
            for (NodeId n : sig.bits)
                bits.push_back(node_value(n));
            std::size_t c2 = 0;
            sts[sig.name] = detail_engine::value_from_bits(sig.type, bits, c2);
        }
        cex.statics_after.push_back(std::move(sts));
    }
    // trim to the cycles actually run (full K kept: inputs already sized K)

    ReplayReport rep = replay_counterexample(vc, cex);
    if (!rep.confirmed) {
        v.outcome = Outcome::EngineError;
        v.message = "counterexample replay divergence: " + rep.detail;
        v.cex = std::move(cex);
        return v;
    }
    v.outcome = Outcome::Violated;
    v.cex = std::move(cex);
    return v;
}

}  // namespace scanverif
