#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scanverif/circuit.hpp"
#include "scanverif/interp.hpp"
#include "scanverif/typecheck.hpp"

namespace scanverif {

// Mirror of Value carrying circuit node ids: 1 bit for BOOL, 16 for WORD.
struct SymValue {
    TypeKind kind = TypeKind::Invalid;
    std::vector<NodeId> bits;
    std::vector<SymValue> elems;

    static SymValue of_bool(NodeId n) {
        SymValue v;
        v.kind = TypeKind::Bool;
        v.bits = {n};
        return v;
    }
    static SymValue of_word(std::vector<NodeId> bits) {
        SymValue v;
        v.kind = TypeKind::Word;
        v.bits = std::move(bits);
        return v;
    }
};

struct NamedSignal {
    std::string name;  // flat signal key (instance path included)
    DataType type;
    std::vector<NodeId> bits;  // arrays flattened, elements lo..hi, words LSB first
};

struct AssertionBit {
    std::string req_id;
    std::size_t cycle = 0;  // 0-based
    NodeId bit = 0;
};

struct CycleSignals {
    std::vector<NamedSignal> outputs;
    std::vector<NamedSignal> statics_after;
    std::vector<AssertionBit> asserts;
};

// One persistent state cell: a STATIC variable or a persisting FB output,
// keyed by instance path.
struct StateCell {
    std::string key;
    const VarDecl* decl = nullptr;
};

namespace detail {

inline void collect_state_cells_walk(const Program& prog, const Pou& pou, const std::string& path,
                                     bool is_entry, std::vector<StateCell>& out) {
    bool persist_outputs = pou.kind == PouKind::FB;
    for (const auto& d : pou.decls) {
        if (d.section == Section::Static ||
            (persist_outputs && d.section == Section::Output))
            out.push_back({path + d.name, &d});
    }
    (void)is_entry;
    auto walk_body = [&](auto&& self, const std::vector<Stmt>& body) -> void {
        for (const auto& s : body) {
            switch (s.kind) {
            case StmtKind::Call: {
                const Pou* callee = prog.find_pou(s.callee);
                std::string sub = path + s.callee + "#" + std::to_string(s.call_id) + ".";
                collect_state_cells_walk(prog, *callee, sub, false, out);
                break;
            }
            case StmtKind::If:
                for (const auto& br : s.branches)
                    self(self, br.body);
                self(self, s.else_body);
                break;
            case StmtKind::For:
                self(self, s.body);
                break;
            default:
                break;
            }
        }
    };
    walk_body(walk_body, pou.body);
}

}  // namespace detail

inline std::vector<StateCell> collect_state_cells(const TypedProgram& tp) {
    std::vector<StateCell> out;
    detail::collect_state_cells_walk(tp.program, tp.entry_pou(), "", true, out);
    return out;
}

// Whether K=1 exhausts the program's behaviours: an FC entry whose call tree
// holds no persistent state and whose requirements avoid OLD().
inline bool is_combinational(const TypedProgram& tp) {
    if (tp.entry_pou().kind != PouKind::FC)
        return false;
    if (!collect_state_cells(tp).empty())
        return false;
    for (const auto& r : tp.program.requirements)
        if (r.uses_old)
            return false;
    return true;
}

// Symbolic executor: runs scan cycles over a bit circuit instead of values.
// Shapes and instance naming mirror the reference interpreter.
class SymbolicEncoder {
public:
    SymbolicEncoder(const TypedProgram& tp, BitCircuit& c) : tp_(tp), c_(c) {
        for (const auto& pou : tp.program.pous) {
            Layout lay;
            lay.pou = &pou;
            for (const auto& d : pou.decls) {
                lay.index[d.name] = static_cast<int>(lay.decls.size());
                lay.decls.push_back(&d);
            }
            layouts_[pou.name] = std::move(lay);
        }
        state_cells_ = collect_state_cells(tp);
    }

    using StateEnv = std::map<std::string, SymValue>;

    // initial state: declared initializers (zero default) as constant bits
    StateEnv initial_state() const {
        StateEnv env;
        for (const auto& cell : state_cells_) {
            Value v = cell.decl->init ? *cell.decl->init : Value::zero_of(cell.decl->dtype);
            env[cell.key] = const_sym(v);
        }
        return env;
    }

    // state variables as fresh circuit inputs (single-cycle template mode)
    StateEnv symbolic_state(int cycle) {
        StateEnv env;
        for (const auto& cell : state_cells_)
            env[cell.key] = fresh_sym(cell.decl->dtype, cell.key, cycle, BitClass::State);
        return env;
    }

    // Encodes one scan cycle: creates config bits (first cycle only; shared
    // thereafter) and per-cycle input bits, executes the entry body, returns
    // the cycle's outputs / next state / assertion bits.
    CycleSignals run_cycle(const StateEnv& state, StateEnv& next_state, std::size_t cycle) {
        const Pou& entry = tp_.entry_pou();
        const Layout& lay = layouts_.at(entry.name);

        if (config_.empty()) {
            for (const auto& d : entry.decls)
                if (d.section == Section::Config)
                    config_[d.name] = fresh_sym(d.dtype, d.name, 0, BitClass::Config);
        }

        Frame frame;
        frame.vals.resize(lay.decls.size());
        bool is_fb = entry.kind == PouKind::FB;
        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            switch (d.section) {
            case Section::Config:
                frame.vals[i] = config_.at(d.name);
                break;
            case Section::Input:
                frame.vals[i] =
                    fresh_sym(d.dtype, d.name, static_cast<int>(cycle), BitClass::Input);
                break;
            case Section::Static:
                frame.vals[i] = state.at(d.name);
                break;
            case Section::Output:
                frame.vals[i] = is_fb ? state.at(d.name) : default_sym(d);
                break;
            case Section::Temp:
            case Section::InOut:
                frame.vals[i] = default_sym(d);
                break;
            }
        }
        Frame old_frame = frame;

        StateEnv working = state;  // evolves through the cycle, like the interpreter
        Ctx ctx;
        ctx.working = &working;
        CycleSignals sig;
        ctx.sig = &sig;
        ctx.cycle = cycle;
        ctx.active = c_.const_bit(true);

        exec_body(entry.body, lay, frame, old_frame, "", ctx);

        for (const auto& req : tp_.program.requirements) {
            if (req.origin == ReqOrigin::InlineComment)
                continue;
            SymValue v = eval(*req.expr, lay, frame, &old_frame, ctx);
            sig.asserts.push_back({req.id, cycle, v.bits[0]});
        }

        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            if (d.section == Section::Static || (is_fb && d.section == Section::Output))
                working[d.name] = frame.vals[i];
            if (d.section == Section::Output)
                sig.outputs.push_back({d.name, d.dtype, flatten_bits(frame.vals[i])});
        }
        next_state = std::move(working);
        for (const auto& cell : state_cells_)
            sig.statics_after.push_back(
                {cell.key, cell.decl->dtype, flatten_bits(next_state.at(cell.key))});
        return sig;
    }

    const std::vector<StateCell>& state_cells() const { return state_cells_; }

    SymValue const_sym(const Value& v) const {
        SymValue s;
        s.kind = v.kind;
        switch (v.kind) {
        case TypeKind::Bool:
            s.bits = {c_.const_bit(v.b)};
            break;
        case TypeKind::Word:
            for (int b = 0; b < kWordBits; ++b)
                s.bits.push_back(c_.const_bit(word_bit(v.w, b)));
            break;
        case TypeKind::Array:
            for (const auto& e : v.elems)
                s.elems.push_back(const_sym(e));
            break;
        default:
            break;
        }
        return s;
    }

private:
    struct Layout {
        const Pou* pou = nullptr;
        std::map<std::string, int> index;
        std::vector<const VarDecl*> decls;
    };

    struct Frame {
        std::vector<SymValue> vals;
    };

    struct LoopBinding {
        const std::string* name;
        int value;
    };

    struct Ctx {
        StateEnv* working = nullptr;
        CycleSignals* sig = nullptr;
        std::size_t cycle = 0;
        NodeId active = 1;  // path condition guarding assertion bits
        std::vector<LoopBinding> loops;
    };

    SymValue default_sym(const VarDecl& d) const {
        return const_sym(d.init ? *d.init : Value::zero_of(d.dtype));
    }

    SymValue fresh_sym(const DataType& t, const std::string& name, int cycle, BitClass cls) {
        SymValue s;
        s.kind = t.kind;
        switch (t.kind) {
        case TypeKind::Bool:
            s.bits = {c_.add_input({name, 0, cycle, cls, false})};
            break;
        case TypeKind::Word:
            for (int b = 0; b < kWordBits; ++b)
                s.bits.push_back(c_.add_input({name, b, cycle, cls, true}));
            break;
        case TypeKind::Array:
            for (int i = t.lo; i <= t.hi; ++i)
                s.elems.push_back(
                    fresh_sym(*t.elem, name + "[" + std::to_string(i) + "]", cycle, cls));
            break;
        default:
            break;
        }
        return s;
    }

    static std::vector<NodeId> flatten_bits(const SymValue& v) {
        std::vector<NodeId> out;
        auto rec = [&](auto&& self, const SymValue& s) -> void {
            for (NodeId b : s.bits)
                out.push_back(b);
            for (const auto& e : s.elems)
                self(self, e);
        };
        rec(rec, v);
        return out;
    }

    static Ctx make_branch_ctx(const Ctx& base, StateEnv* working, NodeId active) {
        Ctx ctx;
        ctx.working = working;
        ctx.sig = base.sig;
        ctx.cycle = base.cycle;
        ctx.active = active;
        ctx.loops = base.loops;
        return ctx;
    }

    int selector_value(const ConstOrLoopVar& sel, const Ctx& ctx) const {
        if (!sel.is_var)
            return sel.value;
        for (auto it = ctx.loops.rbegin(); it != ctx.loops.rend(); ++it)
            if (*it->name == sel.var)
                return it->value;
        throw std::runtime_error("loop variable '" + sel.var + "' not bound");
    }

    SymValue eval(const Expr& e, const Layout& lay, const Frame& f, const Frame* old_f,
                  const Ctx& ctx) {
        switch (e.kind) {
        case ExprKind::IntConst:
            return e.type.is_bool() ? const_sym(Value::of_bool(e.int_value != 0))
                                    : const_sym(Value::of_word(static_cast<Word>(e.int_value)));
        case ExprKind::BoolConst:
            return const_sym(Value::of_bool(e.bool_value));
        case ExprKind::VarRef:
            return f.vals[static_cast<std::size_t>(e.slot)];
        case ExprKind::Old:
            if (!old_f)
                throw std::runtime_error("OLD() outside requirement evaluation");
            return old_f->vals[static_cast<std::size_t>(e.slot)];
        case ExprKind::Index: {
            SymValue base = eval(*e.a, lay, f, old_f, ctx);
            int idx = selector_value(e.sel, ctx) - e.a->type.lo;
            return base.elems[static_cast<std::size_t>(idx)];
        }
        case ExprKind::BitSel: {
            SymValue base = eval(*e.a, lay, f, old_f, ctx);
            return SymValue::of_bool(base.bits[static_cast<std::size_t>(selector_value(e.sel, ctx))]);
        }
        case ExprKind::Not: {
            SymValue a = eval(*e.a, lay, f, old_f, ctx);
            SymValue r;
            r.kind = a.kind;
            for (NodeId b : a.bits)
                r.bits.push_back(c_.mk_not(b));
            return r;
        }
        case ExprKind::And:
        case ExprKind::Or:
        case ExprKind::Xor: {
            SymValue a = eval(*e.a, lay, f, old_f, ctx);
            SymValue b = eval(*e.b, lay, f, old_f, ctx);
            SymValue r;
            r.kind = a.kind;
            for (std::size_t i = 0; i < a.bits.size(); ++i) {
                NodeId n = e.kind == ExprKind::And  ? c_.mk_and(a.bits[i], b.bits[i])
                           : e.kind == ExprKind::Or ? c_.mk_or(a.bits[i], b.bits[i])
                                                    : c_.mk_xor(a.bits[i], b.bits[i]);
                r.bits.push_back(n);
            }
            return r;
        }
        case ExprKind::Eq:
        case ExprKind::Neq: {
            SymValue a = eval(*e.a, lay, f, old_f, ctx);
            SymValue b = eval(*e.b, lay, f, old_f, ctx);
            NodeId acc = c_.const_bit(true);
            for (std::size_t i = 0; i < a.bits.size(); ++i)
                acc = c_.mk_and(acc, c_.mk_xnor(a.bits[i], b.bits[i]));
            return SymValue::of_bool(e.kind == ExprKind::Eq ? acc : c_.mk_not(acc));
        }
        }
        throw std::runtime_error("unreachable expression kind");
    }

    SymValue* resolve_storage(const Expr& e, Frame& f, const Ctx& ctx) {
        switch (e.kind) {
        case ExprKind::VarRef:
            return &f.vals[static_cast<std::size_t>(e.slot)];
        case ExprKind::Index: {
            SymValue* base = resolve_storage(*e.a, f, ctx);
            int idx = selector_value(e.sel, ctx) - e.a->type.lo;
            return &base->elems[static_cast<std::size_t>(idx)];
        }
        default:
            throw std::runtime_error("expression is not a storage location");
        }
    }

    void write_lvalue(const Expr& lhs, SymValue v, Frame& f, const Ctx& ctx) {
        if (lhs.kind == ExprKind::BitSel) {
            SymValue* w = resolve_storage(*lhs.a, f, ctx);
            w->bits[static_cast<std::size_t>(selector_value(lhs.sel, ctx))] = v.bits[0];
            return;
        }
        *resolve_storage(lhs, f, ctx) = std::move(v);
    }

    static void merge_sym(BitCircuit& c, NodeId sel, SymValue& t, const SymValue& f) {
        for (std::size_t i = 0; i < t.bits.size(); ++i)
            t.bits[i] = c.mk_mux(sel, t.bits[i], f.bits[i]);
        for (std::size_t i = 0; i < t.elems.size(); ++i)
            merge_sym(c, sel, t.elems[i], f.elems[i]);
    }

    void exec_body(const std::vector<Stmt>& body, const Layout& lay, Frame& f, const Frame& old_f,
                   const std::string& path, Ctx& ctx) {
        for (const auto& s : body)
            exec_stmt(s, lay, f, old_f, path, ctx);
    }

    void exec_stmt(const Stmt& s, const Layout& lay, Frame& f, const Frame& old_f,
                   const std::string& path, Ctx& ctx) {
        switch (s.kind) {
        case StmtKind::Assign:
            write_lvalue(*s.lhs, eval(*s.rhs, lay, f, nullptr, ctx), f, ctx);
            break;
        case StmtKind::If: {
            // each branch runs on copies of the frame and instance state under
            // its path condition; results are muxed backwards through the chain
            std::vector<Frame> branch_frames;
            std::vector<StateEnv> branch_states;
            std::vector<NodeId> conds;
            NodeId none_prior = c_.const_bit(true);
            for (const auto& br : s.branches) {
                NodeId cond = eval(*br.cond, lay, f, nullptr, ctx).bits[0];
                conds.push_back(cond);
                Frame bf = f;
                StateEnv bs = *ctx.working;
                Ctx bctx = make_branch_ctx(ctx, &bs, c_.mk_and(ctx.active, c_.mk_and(none_prior, cond)));
                exec_body(br.body, lay, bf, old_f, path, bctx);
                branch_frames.push_back(std::move(bf));
                branch_states.push_back(std::move(bs));
                none_prior = c_.mk_and(none_prior, c_.mk_not(cond));
            }
            Frame ef = f;
            StateEnv es = *ctx.working;
            Ctx ectx = make_branch_ctx(ctx, &es, c_.mk_and(ctx.active, none_prior));
            exec_body(s.else_body, lay, ef, old_f, path, ectx);
            Frame acc_f = std::move(ef);
            StateEnv acc_s = std::move(es);
            for (std::size_t i = s.branches.size(); i-- > 0;) {
                for (std::size_t v = 0; v < acc_f.vals.size(); ++v)
                    merge_sym(c_, conds[i], branch_frames[i].vals[v], acc_f.vals[v]);
                for (auto& [key, val] : branch_states[i])
                    merge_sym(c_, conds[i], val, acc_s.at(key));
                acc_f = std::move(branch_frames[i]);
                acc_s = std::move(branch_states[i]);
            }
            f = std::move(acc_f);
            *ctx.working = std::move(acc_s);
            break;
        }
        case StmtKind::For: {
            ctx.loops.push_back({&s.loop_var, s.lo});
            for (int v = s.lo; v <= s.hi; ++v) {
                ctx.loops.back().value = v;
                exec_body(s.body, lay, f, old_f, path, ctx);
            }
            ctx.loops.pop_back();
            break;
        }
        case StmtKind::Call:
            exec_call(s, lay, f, path, ctx);
            break;
        case StmtKind::Assert: {
            const Requirement* req = tp_.program.find_requirement(s.req_id);
            SymValue v = eval(*req->expr, lay, f, &old_f, ctx);
            // holds vacuously when this program point is not reached
            NodeId guarded = c_.mk_or(c_.mk_not(ctx.active), v.bits[0]);
            ctx.sig->asserts.push_back({s.req_id, ctx.cycle, guarded});
            break;
        }
        }
    }

    void exec_call(const Stmt& s, const Layout& caller_lay, Frame& caller_f,
                   const std::string& path, Ctx& ctx) {
        const Layout& lay = layouts_.at(s.callee);
        std::string sub_path = path + s.callee + "#" + std::to_string(s.call_id) + ".";
        bool is_fb = lay.pou->kind == PouKind::FB;

        Frame f;
        f.vals.resize(lay.decls.size());
        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            if (d.section == Section::Static || (is_fb && d.section == Section::Output))
                f.vals[i] = ctx.working->at(sub_path + d.name);
            else
                f.vals[i] = default_sym(d);
        }
        for (const auto& b : s.bindings) {
            if (b.is_output)
                continue;
            int slot = lay.index.at(b.param);
            f.vals[static_cast<std::size_t>(slot)] = eval(*b.expr, caller_lay, caller_f, nullptr, ctx);
        }
        Frame old_f = f;
        Ctx sub_ctx;
        sub_ctx.working = ctx.working;
        sub_ctx.sig = ctx.sig;
        sub_ctx.cycle = ctx.cycle;
        sub_ctx.active = ctx.active;
        exec_body(lay.pou->body, lay, f, old_f, sub_path, sub_ctx);
        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            if (d.section == Section::Static || (is_fb && d.section == Section::Output))
                (*ctx.working)[sub_path + d.name] = f.vals[i];
        }
        for (const auto& b : s.bindings) {
            int slot = lay.index.at(b.param);
            const VarDecl& d = *lay.decls[static_cast<std::size_t>(slot)];
            if (b.is_output || d.section == Section::InOut)
                write_lvalue(*b.expr, f.vals[static_cast<std::size_t>(slot)], caller_f, ctx);
        }
    }

    const TypedProgram& tp_;
    BitCircuit& c_;
    std::map<std::string, Layout> layouts_;
    std::map<std::string, SymValue> config_;
    std::vector<StateCell> state_cells_;
};

// Single-cycle circuit template: state bits appear as circuit inputs, outputs
// cover entry outputs, next-state values and assertion bits.
struct CycleTemplate {
    BitCircuit circuit;
    CycleSignals signals;
};

inline CycleTemplate encode_cycle(const TypedProgram& tp, bool hashing = true) {
    CycleTemplate t{BitCircuit(hashing), {}};
    SymbolicEncoder enc(tp, t.circuit);
    SymbolicEncoder::StateEnv state = enc.symbolic_state(0);
    SymbolicEncoder::StateEnv next;
    t.signals = enc.run_cycle(state, next, 0);
    return t;
}

// K-cycle unrolling: config bits shared, fresh inputs per cycle, state chained
// from declared initializers. violation = OR over cycles and (selected)
// requirements of NOT(assertion bit).
struct UnrolledSystem {
    BitCircuit circuit;
    std::vector<CycleSignals> cycles;
    NodeId violation = 0;
};

inline UnrolledSystem unroll(const TypedProgram& tp, std::size_t K,
                             const std::set<std::string>* req_filter = nullptr,
                             bool hashing = true) {
    if (K == 0)
        throw std::invalid_argument("unroll bound K must be >= 1");
    UnrolledSystem u{BitCircuit(hashing), {}, 0};
    SymbolicEncoder enc(tp, u.circuit);
    SymbolicEncoder::StateEnv state = enc.initial_state();
    NodeId violation = u.circuit.const_bit(false);
    for (std::size_t k = 0; k < K; ++k) {
        SymbolicEncoder::StateEnv next;
        CycleSignals sig = enc.run_cycle(state, next, k);
        for (const auto& ab : sig.asserts) {
            if (req_filter && !req_filter->count(ab.req_id))
                continue;
            violation = u.circuit.mk_or(violation, u.circuit.mk_not(ab.bit));
        }
        u.cycles.push_back(std::move(sig));
        state = std::move(next);
    }
    u.violation = violation;
    return u;
}

}  // namespace scanverif
