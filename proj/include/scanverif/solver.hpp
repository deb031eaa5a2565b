#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scanverif {

enum class SatOutcome : std::uint8_t { Sat, Unsat, Unknown };

struct SolveLimits {
    std::uint64_t max_conflicts = 10'000'000;
    double timeout_seconds = 300.0;
};

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
    std::uint64_t learned_clauses = 0;
};

// Conflict-driven clause learning with two watched literals and first-UIP
// learning. Fully deterministic: decisions take the lowest-index unassigned
// variable, false first; no restarts, no activity heuristics, no clause
// deletion.
class CdclSolver {
public:
    explicit CdclSolver(int num_vars) : nvars_(num_vars) {
        assigns_.assign(static_cast<std::size_t>(nvars_) + 1, 0);
        level_.assign(static_cast<std::size_t>(nvars_) + 1, 0);
        reason_.assign(static_cast<std::size_t>(nvars_) + 1, -1);
        watches_.assign(2 * (static_cast<std::size_t>(nvars_) + 1), {});
        seen_.assign(static_cast<std::size_t>(nvars_) + 1, 0);
    }

    // DIMACS-style clause (non-zero literals, |lit| <= num_vars).
    void add_clause(const std::vector<int>& lits) {
        std::vector<int> cl;
        for (int l : lits) {
            if (l == 0 || std::abs(l) > nvars_)
                throw std::invalid_argument("literal out of range");
            bool dup = false;
            for (int x : cl) {
                if (x == l)
                    dup = true;
                if (x == -l)
                    return;  // tautology
            }
            if (!dup)
                cl.push_back(l);
        }
        if (cl.empty()) {
            contradiction_ = true;
            return;
        }
        if (cl.size() == 1) {
            units_.push_back(cl[0]);
            return;
        }
        attach(std::move(cl));
    }

    SatOutcome solve(const SolveLimits& limits, SolveStats& stats) {
        stats_ = &stats;
        start_ = std::chrono::steady_clock::now();
        if (contradiction_)
            return SatOutcome::Unsat;
        for (int u : units_) {
            if (value(u) < 0)
                return SatOutcome::Unsat;
            if (value(u) == 0)
                enqueue(u, -1);
        }
        if (propagate() != -2)
            return SatOutcome::Unsat;

        while (true) {
            int confl = propagate();
            if (confl != -2) {
                ++stats.conflicts;
                if (decision_level() == 0)
                    return SatOutcome::Unsat;
                if (stats.conflicts >= limits.max_conflicts)
                    return SatOutcome::Unknown;
                if ((stats.conflicts & 0xFF) == 0 && timed_out(limits))
                    return SatOutcome::Unknown;
                std::vector<int> learnt;
                int back_level = analyze(confl, learnt);
                backtrack(back_level);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], -1);
                } else {
                    int idx = attach(std::move(learnt));
                    ++stats.learned_clauses;
                    enqueue(clauses_[static_cast<std::size_t>(idx)][0], idx);
                }
            } else {
                int next = next_decision_var();
                if (next != 0)
                    hint_ = next + 1;
                if (next == 0) {
                    model_.assign(static_cast<std::size_t>(nvars_) + 1, false);
                    for (int v = 1; v <= nvars_; ++v)
                        model_[static_cast<std::size_t>(v)] = assigns_[static_cast<std::size_t>(v)] > 0;
                    return SatOutcome::Sat;
                }
                ++stats.decisions;
                trail_lim_.push_back(static_cast<int>(trail_.size()));
                enqueue(-next, -1);  // false-first polarity
            }
        }
    }

    // valid after Sat; index by DIMACS variable (1-based)
    const std::vector<bool>& model() const { return model_; }

private:
    int value(int lit) const {  // +1 true, -1 false, 0 unassigned
        int v = assigns_[static_cast<std::size_t>(std::abs(lit))];
        return lit > 0 ? v : -v;
    }

    static std::size_t widx(int lit) {
        // watch slot for a literal: 2*var + (sign ? 1 : 0)
        int v = std::abs(lit);
        return 2 * static_cast<std::size_t>(v) + (lit < 0 ? 1 : 0);
    }

    int attach(std::vector<int> cl) {
        int idx = static_cast<int>(clauses_.size());
        watches_[widx(cl[0])].push_back(idx);
        watches_[widx(cl[1])].push_back(idx);
        clauses_.push_back(std::move(cl));
        return idx;
    }

    void enqueue(int lit, int reason) {
        int v = std::abs(lit);
        assigns_[static_cast<std::size_t>(v)] = lit > 0 ? 1 : -1;
        level_[static_cast<std::size_t>(v)] = decision_level();
        reason_[static_cast<std::size_t>(v)] = reason;
        trail_.push_back(lit);
        if (reason >= 0 && stats_)
            ++stats_->propagations;
    }

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    bool timed_out(const SolveLimits& limits) const {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - start_).count();
        return s > limits.timeout_seconds;
    }

    // Returns -2 when propagation completes, else the conflicting clause index.
    int propagate() {
        while (qhead_ < trail_.size()) {
            int lit = trail_[qhead_++];
            int flit = -lit;  // literals watching ~lit become candidates
            auto& wl = watches_[widx(flit)];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < wl.size(); ++i) {
                int ci = wl[i];
                auto& cl = clauses_[static_cast<std::size_t>(ci)];
                if (cl[0] == flit)
                    std::swap(cl[0], cl[1]);
                // cl[1] == flit now
                if (value(cl[0]) > 0) {
                    wl[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < cl.size(); ++k) {
                    if (value(cl[k]) >= 0) {
                        std::swap(cl[1], cl[k]);
                        watches_[widx(cl[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                wl[keep++] = ci;
                if (value(cl[0]) < 0) {
                    // conflict: restore remaining watches and bail out
                    for (std::size_t k = i + 1; k < wl.size(); ++k)
                        wl[keep++] = wl[k];
                    wl.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueue(cl[0], ci);
            }
            wl.resize(keep);
        }
        return -2;
    }

    // First-UIP conflict analysis; returns the backjump level, learnt[0] is the
    // asserting literal. Relies on the invariant that a reason clause's first
    // literal is the literal it propagated.
    int analyze(int confl, std::vector<int>& learnt) {
        learnt.push_back(0);  // slot for the asserting literal
        int path_count = 0;
        int p = 0;
        std::size_t index = trail_.size();
        std::vector<int> to_clear;

        do {
            const auto& cl = clauses_[static_cast<std::size_t>(confl)];
            for (std::size_t k = (p == 0 ? 0 : 1); k < cl.size(); ++k) {
                int q = cl[k];
                int v = std::abs(q);
                if (seen_[static_cast<std::size_t>(v)] || level_[static_cast<std::size_t>(v)] == 0)
                    continue;
                seen_[static_cast<std::size_t>(v)] = 1;
                to_clear.push_back(v);
                if (level_[static_cast<std::size_t>(v)] == decision_level())
                    ++path_count;
                else
                    learnt.push_back(q);
            }
            while (!seen_[static_cast<std::size_t>(std::abs(trail_[index - 1]))])
                --index;
            --index;
            p = trail_[index];
            seen_[static_cast<std::size_t>(std::abs(p))] = 0;
            --path_count;
            if (path_count > 0)
                confl = reason_[static_cast<std::size_t>(std::abs(p))];
        } while (path_count > 0);
        learnt[0] = -p;

        int back = 0;
        std::size_t max_i = 1;
        for (std::size_t i = 1; i < learnt.size(); ++i) {
            int lv = level_[static_cast<std::size_t>(std::abs(learnt[i]))];
            if (lv > back) {
                back = lv;
                max_i = i;
            }
        }
        if (learnt.size() > 1)
            std::swap(learnt[1], learnt[max_i]);
        for (int v : to_clear)
            seen_[static_cast<std::size_t>(v)] = 0;
        return back;
    }

    void backtrack(int to_level) {
        if (decision_level() <= to_level)
            return;
        std::size_t lim = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(to_level)]);
        for (std::size_t i = trail_.size(); i-- > lim;) {
            int v = std::abs(trail_[i]);
            assigns_[static_cast<std::size_t>(v)] = 0;
            reason_[static_cast<std::size_t>(v)] = -1;
        }
        trail_.resize(lim);
        trail_lim_.resize(static_cast<std::size_t>(to_level));
        qhead_ = trail_.size();
        hint_ = 1;
    }

    // lowest-index unassigned variable; between conflicts assignments only
    // grow, so scanning can resume from the previous pick
    int next_decision_var() const {
        for (int v = hint_; v <= nvars_; ++v)
            if (assigns_[static_cast<std::size_t>(v)] == 0)
                return v;
        return 0;
    }

    int nvars_;
    bool contradiction_ = false;
    std::vector<int> units_;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<int8_t> assigns_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<int8_t> seen_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    int hint_ = 1;
    SolveStats* stats_ = nullptr;
    std::vector<bool> model_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace scanverif
