#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/typecheck.hpp"

namespace scanverif {

using Valuation = std::map<std::string, Value>;

// Execution state between scan cycles. `config` is frozen at cycle 0;
// `statics` carries STATIC variables and persisting FB outputs, keyed by
// instance path (plain names for the entry POU, `Callee#<id>.name` below).
struct CycleState {
    Valuation config;
    std::map<std::string, Value> statics;
    std::uint64_t cycle_index = 0;
};

struct AssertionResult {
    std::string req_id;
    bool holds = false;
};

struct CycleOutcome {
    CycleState next_state;
    Valuation outputs;
    std::vector<AssertionResult> assertions;
};

struct CycleRecord {
    Valuation inputs;
    Valuation outputs;
    std::map<std::string, Value> statics_after;
    std::vector<AssertionResult> assertions;
};

struct Trace {
    std::vector<CycleRecord> cycles;

    // first (cycle, requirement) whose assertion failed, if any
    bool first_failure(std::size_t& cycle, std::string& req_id) const {
        for (std::size_t k = 0; k < cycles.size(); ++k) {
            for (const auto& a : cycles[k].assertions) {
                if (!a.holds) {
                    cycle = k;
                    req_id = a.req_id;
                    return true;
                }
            }
        }
        return false;
    }
};

namespace detail {

struct PouLayout {
    const Pou* pou = nullptr;
    std::map<std::string, int> index;
    std::vector<const VarDecl*> decls;
};

struct LoopBinding {
    const std::string* name;
    int value;
};

}  // namespace detail

// Deterministic tree-walking interpreter for typed programs. Immutable after
// construction; safe to share across threads.
class Interpreter {
public:
    explicit Interpreter(const TypedProgram& tp) : tp_(tp) {
        for (const auto& pou : tp.program.pous) {
            detail::PouLayout lay;
            lay.pou = &pou;
            for (const auto& d : pou.decls) {
                lay.index[d.name] = static_cast<int>(lay.decls.size());
                lay.decls.push_back(&d);
            }
            layouts_[pou.name] = std::move(lay);
        }
    }

    const TypedProgram& typed_program() const { return tp_; }

    CycleState initial_state(const Valuation& config) const {
        CycleState st;
        st.config = config;
        st.cycle_index = 0;
        return st;
    }

    CycleOutcome run_cycle(const CycleState& state, const Valuation& inputs) const {
        const Pou& entry = tp_.entry_pou();
        const detail::PouLayout& lay = layouts_.at(entry.name);

        CycleOutcome out;
        out.next_state.config = state.config;
        out.next_state.cycle_index = state.cycle_index + 1;
        // instance state evolves through the cycle: a call site executed twice
        // sees the first execution's writes
        std::map<std::string, Value> working = state.statics;
        Ctx ctx;
        ctx.working = &working;
        ctx.assertions = &out.assertions;

        Frame frame = build_frame(lay, "", &state.config, &inputs, working);
        Frame old_frame = frame;  // cycle-start snapshot for OLD()

        exec_body(entry.body, lay, frame, old_frame, "", ctx);

        // end-of-body requirements (manifest / template origin)
        for (const auto& req : tp_.program.requirements) {
            if (req.origin == ReqOrigin::InlineComment)
                continue;
            bool holds = eval(*req.expr, lay, frame, &old_frame, ctx).b;
            out.assertions.push_back({req.id, holds});
        }

        flush_state(lay, frame, "", working);
        out.next_state.statics = std::move(working);
        for (std::size_t i = 0; i < lay.decls.size(); ++i)
            if (lay.decls[i]->section == Section::Output)
                out.outputs[lay.decls[i]->name] = frame.vals[i];
        return out;
    }

    Trace run_scenario(const Valuation& config, const std::vector<Valuation>& input_sequence) const {
        if (input_sequence.empty())
            throw std::runtime_error("run_scenario requires at least one input valuation");
        Trace tr;
        CycleState st = initial_state(config);
        for (const auto& in : input_sequence) {
            CycleOutcome oc = run_cycle(st, in);
            CycleRecord rec;
            rec.inputs = in;
            rec.outputs = std::move(oc.outputs);
            rec.statics_after = oc.next_state.statics;
            rec.assertions = std::move(oc.assertions);
            tr.cycles.push_back(std::move(rec));
            st = std::move(oc.next_state);
        }
        return tr;
    }

    // Entry nondeterministic variables, CONFIG first then INPUT, declaration
    // order (the enumeration order of the explicit engine).
    std::vector<const VarDecl*> nondet_vars() const {
        std::vector<const VarDecl*> vars;
        for (const auto& d : tp_.entry_pou().decls)
            if (d.section == Section::Config)
                vars.push_back(&d);
        for (const auto& d : tp_.entry_pou().decls)
            if (d.section == Section::Input)
                vars.push_back(&d);
        return vars;
    }

private:
    struct Frame {
        std::vector<Value> vals;
    };

    struct Ctx {
        std::map<std::string, Value>* working = nullptr;
        std::vector<AssertionResult>* assertions = nullptr;
        std::vector<detail::LoopBinding> loops;
    };

    static Value default_value(const VarDecl& d) {
        if (d.init)
            return *d.init;
        return Value::zero_of(d.dtype);
    }

    // Builds a fresh frame for one POU instance at cycle start. `path` is the
    // instance prefix for persistent-state lookup ("" = entry).
    Frame build_frame(const detail::PouLayout& lay, const std::string& path,
                      const Valuation* config, const Valuation* inputs,
                      const std::map<std::string, Value>& statics) const {
        Frame f;
        f.vals.resize(lay.decls.size());
        bool is_fb = lay.pou->kind == PouKind::FB;
        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            switch (d.section) {
            case Section::Config: {
                auto it = config ? config->find(d.name) : Valuation::const_iterator{};
                if (!config || it == config->end())
                    throw std::runtime_error("missing CONFIG binding for '" + d.name + "'");
                f.vals[i] = it->second;
                break;
            }
            case Section::Input: {
                if (inputs) {
                    auto it = inputs->find(d.name);
                    if (it == inputs->end())
                        throw std::runtime_error("missing INPUT binding for '" + d.name + "'");
                    f.vals[i] = it->second;
                } else {
                    f.vals[i] = default_value(d);  // overwritten by call binding
                }
                break;
            }
            case Section::Static:
                f.vals[i] = lookup_state(statics, path + d.name, d);
                break;
            case Section::Output:
                f.vals[i] = is_fb ? lookup_state(statics, path + d.name, d) : default_value(d);
                break;
            case Section::Temp:
            case Section::InOut:
                f.vals[i] = default_value(d);
                break;
            }
        }
        return f;
    }

    static Value lookup_state(const std::map<std::string, Value>& statics, const std::string& key,
                              const VarDecl& d) {
        auto it = statics.find(key);
        if (it != statics.end())
            return it->second;
        return default_value(d);
    }

    void flush_state(const detail::PouLayout& lay, const Frame& f, const std::string& path,
                     std::map<std::string, Value>& out) const {
        bool is_fb = lay.pou->kind == PouKind::FB;
        for (std::size_t i = 0; i < lay.decls.size(); ++i) {
            const VarDecl& d = *lay.decls[i];
            if (d.section == Section::Static || (is_fb && d.section == Section::Output))
                out[path + d.name] = f.vals[i];
        }
    }

    static int slot_of(const Expr& e) {
        if (e.slot < 0)
            throw std::runtime_error("unresolved identifier '" + e.name + "'");
        return e.slot;
    }

    int selector_value(const ConstOrLoopVar& sel, const Ctx& ctx) const {
        if (!sel.is_var)
            return sel.value;
        for (auto it = ctx.loops.rbegin(); it != ctx.loops.rend(); ++it)
            if (*it->name == sel.var)
                return it->value;
        throw std::runtime_error("loop variable '" + sel.var + "' not bound");
    }

    Value eval(const Expr& e, const detail::PouLayout& lay, const Frame& f, const Frame* old_f,
               const Ctx& ctx) const {
        switch (e.kind) {
        case ExprKind::IntConst:
            return e.type.is_bool() ? Value::of_bool(e.int_value != 0)
                                    : Value::of_word(static_cast<Word>(e.int_value));
        case ExprKind::BoolConst:
            return Value::of_bool(e.bool_value);
        case ExprKind::VarRef:
            return f.vals[slot_of(e)];
        case ExprKind::Old:
            if (!old_f)
                throw std::runtime_error("OLD() outside requirement evaluation");
            return old_f->vals[slot_of(e)];
        case ExprKind::Index: {
            Value base = eval(*e.a, lay, f, old_f, ctx);
            int idx = selector_value(e.sel, ctx) - e.a->type.lo;
            return base.elems[static_cast<std::size_t>(idx)];
        }
        case ExprKind::BitSel: {
            Value base = eval(*e.a, lay, f, old_f, ctx);
            return Value::of_bool(word_bit(base.w, selector_value(e.sel, ctx)));
        }
        case ExprKind::Not: {
            Value a = eval(*e.a, lay, f, old_f, ctx);
            return a.is_bool() ? Value::of_bool(!a.b) : Value::of_word(static_cast<Word>(~a.w));
        }
        case ExprKind::And:
        case ExprKind::Or:
        case ExprKind::Xor: {
            Value a = eval(*e.a, lay, f, old_f, ctx);
            Value b = eval(*e.b, lay, f, old_f, ctx);
            if (a.is_bool()) {
                bool r = e.kind == ExprKind::And   ? (a.b && b.b)
                         : e.kind == ExprKind::Or  ? (a.b || b.b)
                                                   : (a.b != b.b);
                return Value::of_bool(r);
            }
            Word r = e.kind == ExprKind::And   ? static_cast<Word>(a.w & b.w)
                     : e.kind == ExprKind::Or  ? static_cast<Word>(a.w | b.w)
                                               : static_cast<Word>(a.w ^ b.w);
            return Value::of_word(r);
        }
        case ExprKind::Eq:
        case ExprKind::Neq: {
            Value a = eval(*e.a, lay, f, old_f, ctx);
            Value b = eval(*e.b, lay, f, old_f, ctx);
            bool eq = a == b;
            return Value::of_bool(e.kind == ExprKind::Eq ? eq : !eq);
        }
        }
        throw std::runtime_error("unreachable expression kind");
    }

    Value* resolve_storage(const Expr& e, const detail::PouLayout& lay, Frame& f,
                           const Ctx& ctx) const {
        switch (e.kind) {
        case ExprKind::VarRef:
            return &f.vals[slot_of(e)];
        case ExprKind::Index: {
            Value* base = resolve_storage(*e.a, lay, f, ctx);
            int idx = selector_value(e.sel, ctx) - e.a->type.lo;
            return &base->elems[static_cast<std::size_t>(idx)];
        }
        default:
            throw std::runtime_error("expression is not a storage location");
        }
    }

    void write_lvalue(const Expr& lhs, Value v, const detail::PouLayout& lay, Frame& f,
                      const Ctx& ctx) const {
        if (lhs.kind == ExprKind::BitSel) {
            Value* w = resolve_storage(*lhs.a, lay, f, ctx);
            w->w = set_word_bit(w->w, selector_value(lhs.sel, ctx), v.b);
            return;
        }
        *resolve_storage(lhs, lay, f, ctx) = std::move(v);
    }

    void exec_body(const std::vector<Stmt>& body, const detail::PouLayout& lay, Frame& f,
                   const Frame& old_f, const std::string& path, Ctx& ctx) const {
        for (const auto& s : body)
            exec_stmt(s, lay, f, old_f, path, ctx);
    }

    void exec_stmt(const Stmt& s, const detail::PouLayout& lay, Frame& f, const Frame& old_f,
                   const std::string& path, Ctx& ctx) const {
        switch (s.kind) {
        case StmtKind::Assign:
            write_lvalue(*s.lhs, eval(*s.rhs, lay, f, nullptr, ctx), lay, f, ctx);
            break;
        case StmtKind::If: {
            for (const auto& br : s.branches) {
                if (eval(*br.cond, lay, f, nullptr, ctx).b) {
                    exec_body(br.body, lay, f, old_f, path, ctx);
                    return;
                }
            }
            exec_body(s.else_body, lay, f, old_f, path, ctx);
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
            bool holds = eval(*req->expr, lay, f, &old_f, ctx).b;
            ctx.assertions->push_back({s.req_id, holds});
            break;
        }
        }
    }

    void exec_call(const Stmt& s, const detail::PouLayout& caller_lay, Frame& caller_f,
                   const std::string& path, Ctx& ctx) const {
        const detail::PouLayout& lay = layouts_.at(s.callee);
        std::string sub_path = path + s.callee + "#" + std::to_string(s.call_id) + ".";

        Frame f = build_frame(lay, sub_path, nullptr, nullptr, *ctx.working);
        // copy-in
        for (const auto& b : s.bindings) {
            if (b.is_output)
                continue;
            int slot = lay.index.at(b.param);
            f.vals[slot] = eval(*b.expr, caller_lay, caller_f, nullptr, ctx);
        }
        Frame old_f = f;
        Ctx sub_ctx;
        sub_ctx.working = ctx.working;
        sub_ctx.assertions = ctx.assertions;
        exec_body(lay.pou->body, lay, f, old_f, sub_path, sub_ctx);
        flush_state(lay, f, sub_path, *ctx.working);
        // copy-out
        for (const auto& b : s.bindings) {
            int slot = lay.index.at(b.param);
            const VarDecl& d = *lay.decls[slot];
            if (b.is_output || d.section == Section::InOut)
                write_lvalue(*b.expr, f.vals[slot], caller_lay, caller_f, ctx);
        }
    }

    const TypedProgram& tp_;
    std::map<std::string, detail::PouLayout> layouts_;
};

// Evaluates a typed expression against an ad-hoc environment (test helper and
// template truth-table oracle).
inline Value eval_expr(const Expr& e, const std::map<std::string, Value>& env,
                       const std::map<std::string, Value>* old_env = nullptr) {
    switch (e.kind) {
    case ExprKind::IntConst:
        return e.type.is_bool() ? Value::of_bool(e.int_value != 0)
                                : Value::of_word(static_cast<Word>(e.int_value));
    case ExprKind::BoolConst:
        return Value::of_bool(e.bool_value);
    case ExprKind::VarRef: {
        auto it = env.find(e.name);
        if (it == env.end())
            throw std::runtime_error("unbound variable '" + e.name + "'");
        return it->second;
    }
    case ExprKind::Old: {
        if (!old_env)
            throw std::runtime_error("no OLD() bindings supplied");
        auto it = old_env->find(e.name);
        if (it == old_env->end())
            throw std::runtime_error("unbound OLD variable '" + e.name + "'");
        return it->second;
    }
    case ExprKind::Index: {
        Value base = eval_expr(*e.a, env, old_env);
        if (e.sel.is_var)
            throw std::runtime_error("loop variable outside interpreter context");
        return base.elems[static_cast<std::size_t>(e.sel.value - e.a->type.lo)];
    }
    case ExprKind::BitSel: {
        Value base = eval_expr(*e.a, env, old_env);
        if (e.sel.is_var)
            throw std::runtime_error("loop variable outside interpreter context");
        return Value::of_bool(word_bit(base.w, e.sel.value));
    }
    case ExprKind::Not: {
        Value a = eval_expr(*e.a, env, old_env);
        return a.is_bool() ? Value::of_bool(!a.b) : Value::of_word(static_cast<Word>(~a.w));
    }
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Xor: {
        Value a = eval_expr(*e.a, env, old_env);
        Value b = eval_expr(*e.b, env, old_env);
        if (a.is_bool()) {
            bool r = e.kind == ExprKind::And   ? (a.b && b.b)
                     : e.kind == ExprKind::Or  ? (a.b || b.b)
                                               : (a.b != b.b);
            return Value::of_bool(r);
        }
        Word r = e.kind == ExprKind::And   ? static_cast<Word>(a.w & b.w)
                 : e.kind == ExprKind::Or  ? static_cast<Word>(a.w | b.w)
                                           : static_cast<Word>(a.w ^ b.w);
        return Value::of_word(r);
    }
    case ExprKind::Eq:
    case ExprKind::Neq: {
        Value a = eval_expr(*e.a, env, old_env);
        Value b = eval_expr(*e.b, env, old_env);
        bool eq = a == b;
        return Value::of_bool(e.kind == ExprKind::Eq ? eq : !eq);
    }
    }
    throw std::runtime_error("unreachable expression kind");
}

}  // namespace scanverif
