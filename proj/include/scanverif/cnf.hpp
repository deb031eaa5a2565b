#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "scanverif/circuit.hpp"

namespace scanverif {

// Structural (Tseitin-style) encoding of a circuit, asserting one output bit.
// Every node has a defining literal in `node_lit` (Not nodes reuse the negated
// operand literal; no variable or clauses of their own).
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;  // DIMACS literals
    std::vector<int> node_lit;              // node id -> literal (0 = none)
    int const_true_var = 0;                 // materialized only when referenced

    std::size_t num_clauses() const { return clauses.size(); }
};

inline CnfFormula to_cnf(const BitCircuit& c, NodeId assert_true) {
    CnfFormula f;
    f.node_lit.assign(c.num_nodes(), 0);
    const auto& nodes = c.nodes();

    auto const_lit = [&](bool v) {
        if (f.const_true_var == 0) {
            f.const_true_var = ++f.num_vars;
            f.clauses.push_back({f.const_true_var});
        }
        return v ? f.const_true_var : -f.const_true_var;
    };
    auto lit = [&](NodeId n) {
        if (n == 0)
            return const_lit(false);
        if (n == 1)
            return const_lit(true);
        return f.node_lit[n];
    };

    for (std::size_t i = 2; i < nodes.size(); ++i) {
        const CircuitNode& n = nodes[i];
        switch (n.op) {
        case Gate::Input:
            f.node_lit[i] = ++f.num_vars;
            break;
        case Gate::Not:
            f.node_lit[i] = -lit(n.a);
            break;
        case Gate::And2: {
            int a = lit(n.a), b = lit(n.b);
            int x = ++f.num_vars;
            f.node_lit[i] = x;
            f.clauses.push_back({-x, a});
            f.clauses.push_back({-x, b});
            f.clauses.push_back({x, -a, -b});
            break;
        }
        case Gate::Or2: {
            int a = lit(n.a), b = lit(n.b);
            int x = ++f.num_vars;
            f.node_lit[i] = x;
            f.clauses.push_back({x, -a});
            f.clauses.push_back({x, -b});
            f.clauses.push_back({-x, a, b});
            break;
        }
        case Gate::Xor2: {
            int a = lit(n.a), b = lit(n.b);
            int x = ++f.num_vars;
            f.node_lit[i] = x;
            f.clauses.push_back({-x, a, b});
            f.clauses.push_back({-x, -a, -b});
            f.clauses.push_back({x, -a, b});
            f.clauses.push_back({x, a, -b});
            break;
        }
        default:
            break;
        }
    }
    f.clauses.push_back({lit(assert_true)});
    return f;
}

// DIMACS CNF with a deterministic variable-description comment block.
inline void write_dimacs(std::ostream& os, const CnfFormula& f, const BitCircuit& c,
                         const std::string& case_id) {
    os << "c scanverif CNF dump";
    if (!case_id.empty())
        os << " for case " << case_id;
    os << "\n";
    if (f.const_true_var != 0)
        os << "c var " << f.const_true_var << " = constant TRUE\n";
    const auto& nodes = c.nodes();
    for (std::size_t i = 2; i < nodes.size(); ++i) {
        if (nodes[i].op != Gate::Input)
            continue;
        const InputBitInfo& info = c.inputs()[nodes[i].a];
        os << "c var " << f.node_lit[i] << " = "
           << (info.cls == BitClass::Config   ? "config"
               : info.cls == BitClass::State ? "state"
                                             : "input")
           << " " << info.var << " bit " << info.bit << " cycle " << info.cycle + 1 << "\n";
    }
    os << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
    for (const auto& cl : f.clauses) {
        for (int l : cl)
            os << l << " ";
        os << "0\n";
    }
}

}  // namespace scanverif
