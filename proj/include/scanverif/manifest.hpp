#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scanverif/diag.hpp"
#include "scanverif/engine.hpp"
#include "scanverif/fbd.hpp"
#include "scanverif/parser.hpp"
#include "scanverif/requirements.hpp"
#include "scanverif/typecheck.hpp"

#include "json.hpp"

namespace scanverif {

// Requirement manifest entry: either a closed expression or a chain template.
struct ManifestRequirement {
    std::string id;        // closed form
    std::string id_prefix; // template form
    std::string expr;
    int range_lo = 0, range_hi = 15;
    bool is_template = false;
};

struct Manifest {
    std::vector<std::string> programs;
    std::string entry;
    std::string engine = "bmc";
    std::optional<std::size_t> bound;
    std::optional<double> timeout_seconds;
    std::optional<std::uint64_t> max_conflicts;
    std::optional<std::uint64_t> explicit_bit_budget;
    bool include_inline_assertions = true;
    std::vector<ManifestRequirement> requirements;
    std::map<std::string, Section> fbd_sections;
    std::filesystem::path base_dir;
    std::string path;
};

inline std::optional<std::string> read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool parse_section_name(const std::string& s, Section& out) {
    std::string up = Lexer::upper(s);
    if (up == "INPUT") out = Section::Input;
    else if (up == "OUTPUT") out = Section::Output;
    else if (up == "IN_OUT" || up == "INOUT") out = Section::InOut;
    else if (up == "STATIC" || up == "VAR") out = Section::Static;
    else if (up == "TEMP") out = Section::Temp;
    else if (up == "CONFIG") out = Section::Config;
    else return false;
    return true;
}

inline std::optional<Manifest> load_manifest(const std::string& path, Diagnostics& diags) {
    auto text = read_text_file(path);
    if (!text) {
        add_diag(diags, {}, "cannot read manifest file '" + path + "'");
        return std::nullopt;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*text);
    } catch (const std::exception& e) {
        add_diag(diags, {}, "manifest JSON error: " + std::string(e.what()));
        return std::nullopt;
    }
    Manifest m;
    m.path = path;
    m.base_dir = std::filesystem::path(path).parent_path();
    try {
        if (!j.contains("programs") || !j["programs"].is_array() || j["programs"].empty()) {
            add_diag(diags, {}, "manifest needs a non-empty 'programs' array");
            return std::nullopt;
        }
        for (const auto& p : j["programs"])
            m.programs.push_back(p.get<std::string>());
        if (j.contains("entry"))
            m.entry = j["entry"].get<std::string>();
        if (j.contains("engine")) {
            m.engine = j["engine"].get<std::string>();
            if (m.engine != "bmc" && m.engine != "explicit") {
                add_diag(diags, {}, "unknown engine '" + m.engine + "' (bmc or explicit)");
                return std::nullopt;
            }
        }
        if (j.contains("bound") && !j["bound"].is_null()) {
            long long b = j["bound"].get<long long>();
            if (b < 1) {
                add_diag(diags, {}, "bound must be >= 1");
                return std::nullopt;
            }
            m.bound = static_cast<std::size_t>(b);
        }
        if (j.contains("limits")) {
            const auto& l = j["limits"];
            if (l.contains("timeout_seconds"))
                m.timeout_seconds = l["timeout_seconds"].get<double>();
            if (l.contains("max_conflicts"))
                m.max_conflicts = l["max_conflicts"].get<std::uint64_t>();
            if (l.contains("explicit_bit_budget"))
                m.explicit_bit_budget = l["explicit_bit_budget"].get<std::uint64_t>();
        }
        if (j.contains("include_inline_assertions"))
            m.include_inline_assertions = j["include_inline_assertions"].get<bool>();
        if (j.contains("requirements")) {
            for (const auto& r : j["requirements"]) {
                ManifestRequirement mr;
                if (r.contains("template")) {
                    mr.is_template = true;
                    mr.expr = r["template"].get<std::string>();
                    mr.id_prefix = r.value("id_prefix", std::string("case"));
                    if (r.contains("range")) {
                        mr.range_lo = r["range"][0].get<int>();
                        mr.range_hi = r["range"][1].get<int>();
                    }
                } else {
                    if (!r.contains("id") || !r.contains("expr")) {
                        add_diag(diags, {}, "requirement entry needs 'id' and 'expr'");
                        return std::nullopt;
                    }
                    mr.id = r["id"].get<std::string>();
                    mr.expr = r["expr"].get<std::string>();
                }
                m.requirements.push_back(std::move(mr));
            }
        }
        if (j.contains("fbd_sections")) {
            for (auto it = j["fbd_sections"].begin(); it != j["fbd_sections"].end(); ++it) {
                Section sec;
                if (!parse_section_name(it.value().get<std::string>(), sec)) {
                    add_diag(diags, {}, "unknown section '" + it.value().get<std::string>() +
                                            "' in fbd_sections");
                    return std::nullopt;
                }
                m.fbd_sections[it.key()] = sec;
            }
        }
    } catch (const std::exception& e) {
        add_diag(diags, {}, "manifest field error: " + std::string(e.what()));
        return std::nullopt;
    }
    return m;
}

// Loads one program source (.il text or .xml gate network) into POUs merged
// into `prog`.
inline bool load_program_file(const std::filesystem::path& path, Program& prog,
                              const std::map<std::string, Section>& fbd_sections,
                              Diagnostics& diags) {
    auto text = read_text_file(path);
    if (!text) {
        add_diag(diags, {}, "cannot read program file '" + path.string() + "'");
        return false;
    }
    std::string ext = path.extension().string();
    for (auto& c : ext)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".xml") {
        auto nets = parse_fbd_xml(*text, diags);
        if (!nets)
            return false;
        auto pou = fbd_to_pou(*nets, path.stem().string(), fbd_sections, diags);
        if (!pou)
            return false;
        if (prog.find_pou(pou->name)) {
            add_diag(diags, {}, "duplicate POU '" + pou->name + "' from " + path.string());
            return false;
        }
        prog.pous.push_back(std::move(*pou));
        return true;
    }
    ParseResult pr = parse_source(*text, path.string());
    for (auto& d : pr.diags) {
        d.file = path.string();
        diags.push_back(d);
    }
    if (!pr.ok)
        return false;
    for (auto& pou : pr.program.pous) {
        if (prog.find_pou(pou.name)) {
            add_diag(diags, {}, "duplicate POU '" + pou.name + "' from " + path.string());
            return false;
        }
        prog.pous.push_back(std::move(pou));
    }
    for (auto& req : pr.program.requirements) {
        if (prog.find_requirement(req.id)) {
            add_diag(diags, {}, "duplicate requirement id '" + req.id + "'");
            return false;
        }
        prog.requirements.push_back(std::move(req));
    }
    return true;
}

// Everything cmd_verify needs: the typed program and the ordered case list.
struct VerificationJob {
    std::shared_ptr<const TypedProgram> program;
    std::vector<VerificationCase> cases;
    std::string engine = "bmc";
    EngineLimits limits;
    std::size_t bound = 1;
};

inline std::optional<VerificationJob> build_job(const Manifest& m, Diagnostics& diags) {
    Program prog;
    for (const auto& rel : m.programs) {
        std::filesystem::path p = m.base_dir / rel;
        if (!load_program_file(p, prog, m.fbd_sections, diags))
            return std::nullopt;
    }
    prog.entry_name = m.entry;
    if (!m.include_inline_assertions) {
        for (auto& pou : prog.pous) {
            std::erase_if(pou.body, [](const Stmt& s) { return s.kind == StmtKind::Assert; });
        }
        prog.requirements.clear();
    }
    auto tp = typecheck_program(std::move(prog), diags);
    if (!tp)
        return std::nullopt;

    for (const auto& mr : m.requirements) {
        if (mr.is_template) {
            ChainTemplate ct;
            ct.id_prefix = mr.id_prefix;
            ct.expr_template = mr.expr;
            ct.lo = mr.range_lo;
            ct.hi = mr.range_hi;
            auto reqs = instantiate_chain_cases(ct, *tp, diags);
            if (!reqs)
                return std::nullopt;
            for (auto& r : *reqs) {
                if (tp->program.find_requirement(r.id)) {
                    add_diag(diags, {}, "duplicate requirement id '" + r.id + "'");
                    return std::nullopt;
                }
                tp->program.requirements.push_back(std::move(r));
            }
        } else {
            auto req = parse_assertion(mr.expr, mr.id, *tp, diags);
            if (!req)
                return std::nullopt;
            if (tp->program.find_requirement(req->id)) {
                add_diag(diags, {}, "duplicate requirement id '" + req->id + "'");
                return std::nullopt;
            }
            tp->program.requirements.push_back(std::move(*req));
        }
    }
    if (tp->program.requirements.empty()) {
        add_diag(diags, {}, "no requirements: nothing to verify");
        return std::nullopt;
    }

    VerificationJob job;
    job.engine = m.engine;
    job.bound = m.bound.value_or(default_bound(*tp));
    if (m.timeout_seconds)
        job.limits.timeout_seconds = *m.timeout_seconds;
    if (m.max_conflicts)
        job.limits.max_conflicts = *m.max_conflicts;
    if (m.explicit_bit_budget)
        job.limits.explicit_bit_budget = *m.explicit_bit_budget;
    job.program = std::make_shared<const TypedProgram>(std::move(*tp));
    for (const auto& r : job.program->program.requirements)
        job.cases.push_back({job.program, r.id, job.bound});
    return job;
}

}  // namespace scanverif
