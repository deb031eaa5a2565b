#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "scanverif/engine.hpp"
#include "scanverif/version.hpp"

#include "json.hpp"

namespace scanverif {

struct CaseReport {
    std::string id;
    std::string engine;
    std::size_t bound = 1;
    Verdict verdict;
};

struct RunReport {
    std::string manifest_path;
    std::vector<std::string> programs;
    std::string entry;
    std::vector<CaseReport> cases;

    std::size_t count(Outcome o) const {
        std::size_t n = 0;
        for (const auto& c : cases)
            if (c.verdict.outcome == o)
                ++n;
        return n;
    }

    // 0 all satisfied; 1 any violated; 2 unknown or engine error
    int exit_code() const {
        if (count(Outcome::Violated) > 0)
            return 1;
        if (count(Outcome::Unknown) > 0 || count(Outcome::EngineError) > 0)
            return 2;
        return 0;
    }
};

namespace detail_report {

inline nlohmann::ordered_json value_json(const Value& v) {
    switch (v.kind) {
    case TypeKind::Bool:
        return v.b;
    case TypeKind::Word:
        return v.str();  // "16#hhhh"
    case TypeKind::Array: {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : v.elems)
            arr.push_back(value_json(e));
        return arr;
    }
    default:
        return nullptr;
    }
}

inline nlohmann::ordered_json valuation_json(const std::map<std::string, Value>& v) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, val] : v)
        o[k] = value_json(val);
    return o;
}

}  // namespace detail_report

// Machine-readable report; key order and value formatting are deterministic.
// Timing fields live under "timing" so consumers can exclude them.
inline nlohmann::ordered_json render_report_json(const RunReport& run) {
    nlohmann::ordered_json root;
    root["tool"] = {{"name", "scanverif"}, {"version", kVersion}};
    root["determinism"] =
        "seed-free: identical manifests and limits reproduce this report byte-for-byte "
        "(timing fields excluded)";
    root["manifest"] = run.manifest_path;
    root["programs"] = run.programs;
    root["entry"] = run.entry;
    nlohmann::ordered_json cases = nlohmann::ordered_json::array();
    for (const auto& c : run.cases) {
        nlohmann::ordered_json cj;
        cj["id"] = c.id;
        cj["engine"] = c.engine;
        cj["bound"] = c.bound;
        cj["verdict"] = outcome_name(c.verdict.outcome);
        if (c.verdict.outcome == Outcome::Satisfied) {
            cj["complete"] = c.verdict.complete;
            cj["holds_up_to_bound"] = c.verdict.bound;
        }
        if (!c.verdict.message.empty())
            cj["message"] = c.verdict.message;
        nlohmann::ordered_json stats;
        stats["variables"] = c.verdict.stats.variables;
        stats["clauses"] = c.verdict.stats.clauses;
        stats["decisions"] = c.verdict.stats.decisions;
        stats["conflicts"] = c.verdict.stats.conflicts;
        stats["propagations"] = c.verdict.stats.propagations;
        stats["learned_clauses"] = c.verdict.stats.learned_clauses;
        stats["evaluations"] = c.verdict.stats.evaluations;
        cj["statistics"] = stats;
        cj["timing"] = {{"encode_seconds", c.verdict.stats.encode_seconds},
                        {"solve_seconds", c.verdict.stats.solve_seconds}};
        if (c.verdict.cex) {
            const Counterexample& cex = *c.verdict.cex;
            nlohmann::ordered_json xj;
            xj["requirement"] = cex.requirement_id;
            xj["violating_cycle"] = cex.violating_cycle + 1;  // 1-based for humans
            xj["config"] = detail_report::valuation_json(cex.config);
            nlohmann::ordered_json cycles = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < cex.inputs.size(); ++k) {
                nlohmann::ordered_json kj;
                kj["cycle"] = k + 1;
                kj["inputs"] = detail_report::valuation_json(cex.inputs[k]);
                if (k < cex.outputs.size())
                    kj["outputs"] = detail_report::valuation_json(cex.outputs[k]);
                if (k < cex.statics_after.size())
                    kj["state_after"] = detail_report::valuation_json(cex.statics_after[k]);
                cycles.push_back(std::move(kj));
            }
            xj["cycles"] = std::move(cycles);
            cj["counterexample"] = std::move(xj);
        }
        cases.push_back(std::move(cj));
    }
    root["cases"] = std::move(cases);
    root["summary"] = {{"total", run.cases.size()},
                       {"satisfied", run.count(Outcome::Satisfied)},
                       {"violated", run.count(Outcome::Violated)},
                       {"unknown", run.count(Outcome::Unknown)},
                       {"engine_errors", run.count(Outcome::EngineError)}};
    root["exit_code"] = run.exit_code();
    return root;
}

namespace detail_report {

// signal x cycle grid for one counterexample
inline void render_cex_table(std::ostringstream& os, const Counterexample& cex) {
    os << "    counterexample: requirement '" << cex.requirement_id << "' fails at cycle "
       << cex.violating_cycle + 1 << "\n";
    if (!cex.config.empty()) {
        os << "    config (frozen):\n";
        for (const auto& [k, v] : cex.config)
            os << "      " << k << " = " << v.str() << "\n";
    }
    std::size_t K = cex.inputs.size();
    std::vector<std::pair<std::string, const std::vector<Valuation>*>> groups;
    groups.emplace_back("input", &cex.inputs);
    groups.emplace_back("output", &cex.outputs);

    std::size_t name_w = 6;
    auto widen = [&](const std::map<std::string, Value>& v) {
        for (const auto& [k, val] : v)
            name_w = std::max(name_w, k.size());
    };
    for (const auto& [_, vals] : groups)
        for (const auto& v : *vals)
            widen(v);
    for (const auto& v : cex.statics_after)
        widen(v);

    auto row = [&](const std::string& cls, const std::string& name,
                   const std::vector<std::string>& cells) {
        os << "      " << std::left << std::setw(8) << cls << std::setw(static_cast<int>(name_w) + 2)
           << name;
        for (const auto& c : cells)
            os << "| " << std::setw(9) << c;
        os << "\n";
    };
    {
        std::vector<std::string> hdr;
        for (std::size_t k = 0; k < K; ++k)
            hdr.push_back("cycle " + std::to_string(k + 1));
        row("", "signal", hdr);
    }
    for (const auto& [cls, vals] : groups) {
        if (vals->empty())
            continue;
        std::vector<std::string> names;
        for (const auto& [k, v] : (*vals)[0])
            names.push_back(k);
        for (const auto& name : names) {
            std::vector<std::string> cells;
            for (std::size_t k = 0; k < K; ++k)
                cells.push_back(k < vals->size() && (*vals)[k].count(name)
                                    ? (*vals)[k].at(name).str()
                                    : "-");
            row(cls, name, cells);
        }
    }
    if (!cex.statics_after.empty() && !cex.statics_after[0].empty()) {
        std::vector<std::string> names;
        for (const auto& [k, v] : cex.statics_after[0])
            names.push_back(k);
        for (const auto& name : names) {
            std::vector<std::string> cells;
            for (std::size_t k = 0; k < K; ++k)
                cells.push_back(k < cex.statics_after.size() && cex.statics_after[k].count(name)
                                    ? cex.statics_after[k].at(name).str()
                                    : "-");
            row("state", name, cells);
        }
    }
}

}  // namespace detail_report

inline std::string render_report_text(const RunReport& run) {
    std::ostringstream os;
    os << "scanverif " << kVersion << " verification report\n";
    os << "manifest: " << run.manifest_path << "\n";
    os << "entry:    " << run.entry << "\n\n";
    for (const auto& c : run.cases) {
        os << "[" << outcome_name(c.verdict.outcome) << "] " << c.id << " (engine " << c.engine
           << ", bound " << c.bound << ")";
        if (c.verdict.outcome == Outcome::Satisfied)
            os << (c.verdict.complete ? " - exhaustive" : " - up to bound");
        if (!c.verdict.message.empty())
            os << " - " << c.verdict.message;
        os << "\n";
        if (c.verdict.cex)
            detail_report::render_cex_table(os, *c.verdict.cex);
    }
    os << "\nsummary: " << run.count(Outcome::Satisfied) << " satisfied, "
       << run.count(Outcome::Violated) << " violated, " << run.count(Outcome::Unknown)
       << " unknown, " << run.count(Outcome::EngineError) << " engine errors ("
       << run.cases.size() << " cases)\n";
    return os.str();
}

}  // namespace scanverif
