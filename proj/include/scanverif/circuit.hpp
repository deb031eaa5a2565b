#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "scanverif/types.hpp"

namespace scanverif {

using NodeId = std::uint32_t;

enum class Gate : std::uint8_t { ConstFalse, ConstTrue, Input, And2, Or2, Xor2, Not };

struct CircuitNode {
    Gate op;
    NodeId a = 0;  // input meta index for Gate::Input
    NodeId b = 0;
};

enum class BitClass : std::uint8_t { Config, Input, State };

struct InputBitInfo {
    std::string var;  // flat signal name (instance path included)
    int bit = 0;      // 0 for BOOL, 0..15 for WORD lanes
    int cycle = 0;    // 0-based; config bits use cycle 0 (shared)
    BitClass cls = BitClass::Input;
    bool word_lane = false;  // bit of a WORD vs a plain BOOL
};

// Acyclic bit-level circuit with structural hashing and local constant
// folding. Node ids are topologically ordered by construction; node 0 is
// constant false, node 1 constant true.
class BitCircuit {
public:
    explicit BitCircuit(bool enable_hashing = true) : hashing_(enable_hashing) {
        nodes_.push_back({Gate::ConstFalse, 0, 0});
        nodes_.push_back({Gate::ConstTrue, 0, 0});
    }

    NodeId const_bit(bool v) const { return v ? 1 : 0; }

    NodeId add_input(InputBitInfo info) {
        NodeId id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({Gate::Input, static_cast<NodeId>(inputs_.size()), 0});
        inputs_.push_back(std::move(info));
        return id;
    }

    NodeId mk_not(NodeId a) {
        if (a == 0)
            return 1;
        if (a == 1)
            return 0;
        if (hashing_ && nodes_[a].op == Gate::Not)
            return nodes_[a].a;
        return emit(Gate::Not, a, 0);
    }

    NodeId mk_and(NodeId a, NodeId b) {
        if (hashing_) {
            if (a == 0 || b == 0)
                return 0;
            if (a == 1)
                return b;
            if (b == 1)
                return a;
            if (a == b)
                return a;
            if (complement(a, b))
                return 0;
            if (a > b)
                std::swap(a, b);
        }
        return emit(Gate::And2, a, b);
    }

    NodeId mk_or(NodeId a, NodeId b) {
        if (hashing_) {
            if (a == 1 || b == 1)
                return 1;
            if (a == 0)
                return b;
            if (b == 0)
                return a;
            if (a == b)
                return a;
            if (complement(a, b))
                return 1;
            if (a > b)
                std::swap(a, b);
        }
        return emit(Gate::Or2, a, b);
    }

    NodeId mk_xor(NodeId a, NodeId b) {
        if (hashing_) {
            if (a == b)
                return 0;
            if (a == 0)
                return b;
            if (b == 0)
                return a;
            if (a == 1)
                return mk_not(b);
            if (b == 1)
                return mk_not(a);
            if (complement(a, b))
                return 1;
            if (a > b)
                std::swap(a, b);
        }
        return emit(Gate::Xor2, a, b);
    }

    NodeId mk_xnor(NodeId a, NodeId b) { return mk_not(mk_xor(a, b)); }

    NodeId mk_mux(NodeId sel, NodeId t, NodeId f) {
        if (t == f)
            return t;
        return mk_or(mk_and(sel, t), mk_and(mk_not(sel), f));
    }

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_inputs() const { return inputs_.size(); }
    const std::vector<CircuitNode>& nodes() const { return nodes_; }
    const std::vector<InputBitInfo>& inputs() const { return inputs_; }
    const InputBitInfo& input_info(NodeId n) const { return inputs_[nodes_[n].a]; }

    bool is_const(NodeId n) const { return n <= 1; }

    // Evaluates every node under the given input-bit assignment (indexed like
    // inputs()); returns per-node values.
    std::vector<bool> eval(const std::vector<bool>& input_values) const {
        if (input_values.size() != inputs_.size())
            throw std::runtime_error("input assignment size mismatch");
        std::vector<bool> val(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const CircuitNode& n = nodes_[i];
            switch (n.op) {
            case Gate::ConstFalse: val[i] = false; break;
            case Gate::ConstTrue: val[i] = true; break;
            case Gate::Input: val[i] = input_values[n.a]; break;
            case Gate::And2: val[i] = val[n.a] && val[n.b]; break;
            case Gate::Or2: val[i] = val[n.a] || val[n.b]; break;
            case Gate::Xor2: val[i] = val[n.a] != val[n.b]; break;
            case Gate::Not: val[i] = !val[n.a]; break;
            }
        }
        return val;
    }

private:
    bool complement(NodeId a, NodeId b) const {
        return (nodes_[a].op == Gate::Not && nodes_[a].a == b) ||
               (nodes_[b].op == Gate::Not && nodes_[b].a == a);
    }

    NodeId emit(Gate op, NodeId a, NodeId b) {
        if (hashing_) {
            std::uint64_t key = (static_cast<std::uint64_t>(op) << 58) |
                                (static_cast<std::uint64_t>(a) << 29) | b;
            auto it = hash_.find(key);
            if (it != hash_.end())
                return it->second;
            NodeId id = static_cast<NodeId>(nodes_.size());
            nodes_.push_back({op, a, b});
            hash_.emplace(key, id);
            return id;
        }
        NodeId id = static_cast<NodeId>(nodes_.size());
        nodes_.push_back({op, a, b});
        return id;
    }

    std::vector<CircuitNode> nodes_;
    std::vector<InputBitInfo> inputs_;
    std::unordered_map<std::uint64_t, NodeId> hash_;
    bool hashing_;
};

}  // namespace scanverif
