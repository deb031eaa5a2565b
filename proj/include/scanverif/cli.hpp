#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "scanverif/cnf.hpp"
#include "scanverif/corpus.hpp"
#include "scanverif/manifest.hpp"
#include "scanverif/report.hpp"
#include "scanverif/smv.hpp"

#include "CLI11.hpp"

namespace scanverif {

struct VerifyOptions {
    std::string manifest_path;
    std::string engine;  // empty = manifest's choice
    std::optional<std::size_t> bound;
    std::optional<double> timeout_seconds;
    std::string json_path;
    std::string dump_cnf_dir;
    std::string emit_smv_dir;
    unsigned jobs = 1;
};

namespace detail_cli {

inline Verdict run_one(const VerificationCase& vc, const std::string& engine,
                       const EngineLimits& limits) {
    return engine == "explicit" ? verify_explicit(vc, limits) : verify_bmc(vc, limits);
}

// cases run on a small worker pool; results land in case order regardless of
// completion order
inline std::vector<CaseReport> run_cases(const VerificationJob& job, unsigned jobs) {
    std::vector<CaseReport> reports(job.cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= job.cases.size())
                return;
            const VerificationCase& vc = job.cases[i];
            CaseReport rep;
            rep.id = vc.requirement_id;
            rep.engine = job.engine;
            rep.bound = vc.bound;
            try {
                rep.verdict = run_one(vc, job.engine, job.limits);
            } catch (const std::exception& e) {
                rep.verdict.outcome = Outcome::EngineError;
                rep.verdict.message = e.what();
            }
            reports[i] = std::move(rep);
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(jobs, std::thread::hardware_concurrency()));
    if (n <= 1 || job.cases.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return reports;
}

inline std::size_t count_stmts(const std::vector<Stmt>& body) {
    std::size_t n = 0;
    for (const auto& s : body) {
        ++n;
        switch (s.kind) {
        case StmtKind::If:
            for (const auto& br : s.branches)
                n += count_stmts(br.body);
            n += count_stmts(s.else_body);
            break;
        case StmtKind::For:
            n += count_stmts(s.body);
            break;
        default:
            break;
        }
    }
    return n;
}

inline bool write_file(const std::filesystem::path& p, const std::string& text,
                       std::ostream& err) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        err << "error: cannot write " << p.string() << "\n";
        return false;
    }
    out << text;
    return true;
}

}  // namespace detail_cli

inline int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
    Diagnostics diags;
    auto manifest = load_manifest(opts.manifest_path, diags);
    if (!manifest) {
        err << join_diags(diags);
        return 3;
    }
    if (!opts.engine.empty())
        manifest->engine = opts.engine;
    if (opts.bound)
        manifest->bound = opts.bound;
    if (opts.timeout_seconds) {
        manifest->timeout_seconds = opts.timeout_seconds;
    } else if (!manifest->timeout_seconds) {
        if (const char* env = std::getenv("SCANVERIF_TIMEOUT")) {
            try {
                manifest->timeout_seconds = std::stod(env);
            } catch (...) {
                err << "error: SCANVERIF_TIMEOUT is not a number: " << env << "\n";
                return 3;
            }
        }
    }
    auto job = build_job(*manifest, diags);
    if (!job) {
        err << join_diags(diags);
        return 3;
    }

    if (!opts.dump_cnf_dir.empty() || !opts.emit_smv_dir.empty()) {
        std::error_code ec;
        if (!opts.dump_cnf_dir.empty())
            std::filesystem::create_directories(opts.dump_cnf_dir, ec);
        if (!opts.emit_smv_dir.empty())
            std::filesystem::create_directories(opts.emit_smv_dir, ec);
        for (const auto& vc : job->cases) {
            if (!opts.dump_cnf_dir.empty()) {
                std::set<std::string> filter{vc.requirement_id};
                UnrolledSystem u = unroll(*vc.program, vc.bound, &filter);
                CnfFormula f = to_cnf(u.circuit, u.violation);
                std::ofstream os(std::filesystem::path(opts.dump_cnf_dir) /
                                 (vc.requirement_id + ".cnf"));
                write_dimacs(os, f, u.circuit, vc.requirement_id);
            }
            if (!opts.emit_smv_dir.empty()) {
                std::ofstream os(std::filesystem::path(opts.emit_smv_dir) /
                                 (vc.requirement_id + ".smv"));
                os << emit_smv(*vc.program, vc.requirement_id, vc.bound);
            }
        }
    }

    RunReport run;
    run.manifest_path = opts.manifest_path;
    run.programs = manifest->programs;
    run.entry = job->program->entry;
    run.cases = detail_cli::run_cases(*job, opts.jobs);

    out << render_report_text(run);
    if (!opts.json_path.empty()) {
        nlohmann::ordered_json j = render_report_json(run);
        if (!detail_cli::write_file(opts.json_path, j.dump(2) + "\n", err))
            return 3;
    }
    return run.exit_code();
}

inline int cmd_inspect(const std::string& path, const std::string& entry, std::ostream& out,
                       std::ostream& err) {
    Diagnostics diags;
    Program prog;
    if (!load_program_file(path, prog, {}, diags)) {
        err << join_diags(diags);
        return 3;
    }
    prog.entry_name = entry;
    std::size_t inline_asserts = prog.requirements.size();
    auto tp = typecheck_program(std::move(prog), diags);
    if (!tp) {
        err << join_diags(diags);
        return 3;
    }
    out << "program: " << path << "\n";
    for (const auto& pou : tp->program.pous) {
        out << "  POU " << pou.name << " ("
            << (pou.kind == PouKind::FB ? "FUNCTION_BLOCK" : "FUNCTION") << ")"
            << (pou.name == tp->entry ? " [entry]" : "") << "\n";
        for (Section sec : {Section::Input, Section::Output, Section::InOut, Section::Static,
                            Section::Temp, Section::Config}) {
            std::size_t words = 0, bools = 0, arrays = 0, bits = 0;
            for (const auto& d : pou.decls) {
                if (d.section != sec)
                    continue;
                bits += d.dtype.bit_width();
                if (d.dtype.is_word())
                    ++words;
                else if (d.dtype.is_bool())
                    ++bools;
                else
                    ++arrays;
            }
            if (words + bools + arrays == 0)
                continue;
            out << "    " << section_name(sec) << ": ";
            bool first = true;
            if (words) {
                out << words << " WORD";
                first = false;
            }
            if (bools) {
                out << (first ? "" : ", ") << bools << " BOOL";
                first = false;
            }
            if (arrays)
                out << (first ? "" : ", ") << arrays << " ARRAY";
            out << " (" << bits << " bits)\n";
        }
        out << "    statements: " << detail_cli::count_stmts(pou.body) << "\n";
    }
    out << "log2 input space: " << tp->log2_input_space() << "\n";
    out << "inline assertions: " << inline_asserts << "\n";
    for (const auto& r : tp->program.requirements)
        out << "  //#ASSERT" << r.raw_text << ";\n";
    return 0;
}

struct GenOptions {
    std::string target;  // "sif-x1" | "sif-2"
    std::string out_dir = "corpus";
    std::string defect = "none";
    bool reduced = false;
    int chains = 2;
    int eisa = 4;
    bool no_pu = false;
    bool no_key_distrib = false;
};

inline int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
    GeneratedCorpus gen;
    if (opts.target == "sif-x1") {
        SifX1Params p;
        p.word_scale = !opts.reduced;
        p.chains = opts.chains;
        p.eisa = opts.eisa;
        p.with_pu = !opts.no_pu;
        p.with_key_distrib = !opts.no_key_distrib;
        if (opts.defect == "none")
            p.defect = SifX1Defect::None;
        else if (opts.defect == "missing-bypass")
            p.defect = SifX1Defect::MissingBypass;
        else {
            err << "error: unknown sif-x1 defect '" << opts.defect << "'\n";
            return 3;
        }
        gen = gen_sif_x1(p);
    } else if (opts.target == "sif-2") {
        Sif2Defect d;
        std::string label;
        if (opts.defect == "none")
            d = Sif2Defect::None;
        else if (opts.defect == "missing-spec-var") {
            d = Sif2Defect::MissingSpecVar;
            label = "missing_spec_var";
        } else if (opts.defect == "missing-program-var") {
            d = Sif2Defect::MissingProgramVar;
            label = "missing_program_var";
        } else if (opts.defect == "fixed") {
            d = Sif2Defect::None;
            label = "fixed";
        } else {
            err << "error: unknown sif-2 defect '" << opts.defect << "'\n";
            return 3;
        }
        gen = gen_sif_2(d, label);
    } else {
        err << "error: unknown generator target '" << opts.target << "'\n";
        return 3;
    }

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    std::filesystem::path dir(opts.out_dir);
    gen.manifest["programs"] = {gen.program_name + ".il"};
    if (!detail_cli::write_file(dir / (gen.program_name + ".il"), gen.il_text, err))
        return 3;
    if (!detail_cli::write_file(dir / (gen.program_name + ".manifest.json"),
                                gen.manifest.dump(2) + "\n", err))
        return 3;
    if (!detail_cli::write_file(dir / (gen.program_name + ".genlock.json"),
                                gen.genlock.dump(2) + "\n", err))
        return 3;
    out << "wrote " << (dir / (gen.program_name + ".il")).string() << "\n";
    out << "wrote " << (dir / (gen.program_name + ".manifest.json")).string() << "\n";
    out << "wrote " << (dir / (gen.program_name + ".genlock.json")).string() << "\n";
    return 0;
}

// Full command-line front end; drives the three subcommands. Exposed here so
// tests can exercise the exact CLI paths in-process.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"scanverif: scan-cycle program verification toolkit"};
    app.require_subcommand(1);

    VerifyOptions vo;
    CLI::App* verify = app.add_subcommand("verify", "verify a manifest's requirements");
    verify->add_option("manifest", vo.manifest_path, "verification manifest (JSON)")->required();
    verify->add_option("--engine", vo.engine, "engine: bmc or explicit")
        ->check(CLI::IsMember({"bmc", "explicit"}));
    std::size_t bound_opt = 0;
    CLI::Option* bopt = verify->add_option("--bound", bound_opt, "unroll bound K (cycles)");
    double timeout_opt = 0;
    CLI::Option* topt = verify->add_option("--timeout", timeout_opt, "per-case timeout, seconds");
    verify->add_option("--json", vo.json_path, "write the JSON report to this path");
    verify->add_option("--dump-cnf", vo.dump_cnf_dir, "write per-case DIMACS files to this directory");
    verify->add_option("--emit-smv", vo.emit_smv_dir, "write per-case SMV models to this directory");
    verify->add_option("--jobs", vo.jobs, "parallel verification jobs")->check(CLI::PositiveNumber);

    std::string inspect_path, inspect_entry;
    CLI::App* inspect = app.add_subcommand("inspect", "summarize a program file");
    inspect->add_option("program", inspect_path, "program file (.il or .xml)")->required();
    inspect->add_option("--entry", inspect_entry, "entry POU override");

    GenOptions go;
    CLI::App* gen = app.add_subcommand("gen", "generate a demonstration corpus program");
    gen->add_option("target", go.target, "sif-x1 or sif-2")
        ->required()
        ->check(CLI::IsMember({"sif-x1", "sif-2"}));
    gen->add_option("--out", go.out_dir, "output directory (default corpus)");
    gen->add_option("--defect", go.defect,
                    "seeded defect: none | missing-bypass | missing-spec-var | "
                    "missing-program-var | fixed");
    gen->add_flag("--reduced", go.reduced, "reduced BOOL-array scale (sif-x1)");
    gen->add_option("--chains", go.chains, "safety chains at reduced scale");
    gen->add_option("--eisa", go.eisa, "elements per zone at reduced scale");
    gen->add_flag("--no-pu", go.no_pu, "drop the emergency-handle bank (reduced)");
    gen->add_flag("--no-key-distrib", go.no_key_distrib, "drop AP handle/token signals (reduced)");

    std::vector<const char*> argv;
    argv.push_back("scanverif");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 3;
    }

    if (*verify) {
        if (bopt->count())
            vo.bound = bound_opt;
        if (topt->count())
            vo.timeout_seconds = timeout_opt;
        return cmd_verify(vo, out, err);
    }
    if (*inspect)
        return cmd_inspect(inspect_path, inspect_entry, out, err);
    if (*gen)
        return cmd_gen(go, out, err);
    return 3;
}

}  // namespace scanverif

