#pragma once

#include <string>
#include <vector>

#include "scanverif/ast.hpp"
#include "scanverif/interp.hpp"
#include "scanverif/printer.hpp"

#include "json.hpp"

namespace scanverif {

// Generated program + its requirement manifest + the generation lockfile.
struct GeneratedCorpus {
    std::string program_name;  // file stem
    std::string il_text;
    nlohmann::ordered_json manifest;
    nlohmann::ordered_json genlock;
};

enum class SifX1Defect : std::uint8_t { None, MissingBypass };
enum class Sif2Defect : std::uint8_t { None, MissingSpecVar, MissingProgramVar };

// Access-zone safety-chain monitor generation knobs. Word scale reproduces the
// published interface counts (94/4 config words/bools, 21/2 input words/bools,
// 16 chains x 16 elements); the reduced BOOL-array scale shrinks the
// nondeterministic bit count for explicit-engine cross-checks.
struct SifX1Params {
    bool word_scale = true;
    int chains = 16;             // reduced scale only
    int eisa = 16;               // reduced scale only
    bool with_pu = true;         // emergency-handle bank
    bool with_key_distrib = true;  // access-point handle/token words
    SifX1Defect defect = SifX1Defect::None;
};

namespace detail_corpus {

inline VarDecl word_decl(std::string name, Section sec, std::string original = {}) {
    VarDecl d;
    d.name = std::move(name);
    d.dtype = DataType::word();
    d.section = sec;
    d.original_name = std::move(original);
    return d;
}
inline VarDecl bool_decl(std::string name, Section sec) {
    VarDecl d;
    d.name = std::move(name);
    d.dtype = DataType::boolean();
    d.section = sec;
    return d;
}
inline VarDecl array_decl(std::string name, Section sec, DataType t) {
    VarDecl d;
    d.name = std::move(name);
    d.dtype = std::move(t);
    d.section = sec;
    return d;
}

inline Stmt assign(ExprPtr lhs, ExprPtr rhs) {
    Stmt s(StmtKind::Assign);
    s.lhs = std::move(lhs);
    s.rhs = std::move(rhs);
    return s;
}

inline ConstOrLoopVar idx(int v) {
    ConstOrLoopVar s;
    s.value = v;
    return s;
}
inline ConstOrLoopVar loop_idx(const std::string& var) {
    ConstOrLoopVar s;
    s.is_var = true;
    s.var = var;
    return s;
}

inline std::string num2(int i) {
    std::string s = std::to_string(i);
    return s.size() < 2 ? "0" + s : s;
}

}  // namespace detail_corpus

// Full-scale body, one chain per word bit:
//   mask := SC[j] AND installed; ok := ((stat OR bypass) AND mask) = mask
// per element bank, AND the access point's own per-chain bits.
inline GeneratedCorpus gen_sif_x1(const SifX1Params& p = {}) {
    using namespace detail_corpus;
    GeneratedCorpus out;
    Pou pou;
    pou.kind = PouKind::FC;

    std::string chain_template;
    if (p.word_scale) {
        pou.name = "SIF_X1";
        out.program_name = "sif_x1";
        pou.decls.push_back(word_decl("I_EISa_Pos_Stat", Section::Input));
        pou.decls.push_back(word_decl("I_EISa_PU_Stat", Section::Input));
        pou.decls.push_back(word_decl("I_EISa_Bypass", Section::Input));
        pou.decls.push_back(word_decl("S0_AP_Pos", Section::Input));
        pou.decls.push_back(word_decl("S0_AP_PU", Section::Input));
        pou.decls.push_back(word_decl("S0_AP_Key_Distrib", Section::Input));
        for (int i = 0; i < 15; ++i)
            pou.decls.push_back(word_decl("I_SPARE_W" + num2(i), Section::Input));
        for (int i = 0; i < 2; ++i)
            pou.decls.push_back(bool_decl("I_SPARE_B" + std::to_string(i), Section::Input));
        pou.decls.push_back(word_decl("I_EISa_Pos", Section::Config));
        pou.decls.push_back(word_decl("I_EISa_PU", Section::Config));
        for (int j = 0; j < 16; ++j)
            pou.decls.push_back(word_decl("SC_S_" + std::to_string(j), Section::Config,
                                          "SC-S_" + std::to_string(j)));
        for (int i = 0; i < 76; ++i)
            pou.decls.push_back(word_decl("C_SPARE_W" + num2(i), Section::Config));
        for (int i = 0; i < 4; ++i)
            pou.decls.push_back(bool_decl("C_SPARE_B" + std::to_string(i), Section::Config));
        pou.decls.push_back(word_decl("N_EISa_Safe", Section::Output));
        pou.decls.push_back(
            array_decl("SC", Section::Temp, DataType::array(DataType::word(), 0, 15)));
        pou.decls.push_back(word_decl("mask_pos", Section::Temp));
        pou.decls.push_back(word_decl("mask_pu", Section::Temp));
        pou.decls.push_back(bool_decl("pos_ok", Section::Temp));
        pou.decls.push_back(bool_decl("pu_ok", Section::Temp));
        pou.decls.push_back(bool_decl("ap_ok", Section::Temp));

        for (int j = 0; j < 16; ++j)
            pou.body.push_back(assign(mk_index(mk_var("SC"), idx(j)),
                                      mk_var("SC_S_" + std::to_string(j))));

        Stmt loop(StmtKind::For);
        loop.loop_var = "j";
        loop.lo_expr = mk_int(0);
        loop.hi_expr = mk_int(15);
        auto scj = [&]() { return mk_index(mk_var("SC"), loop_idx("j")); };
        loop.body.push_back(
            assign(mk_var("mask_pos"), mk_and(scj(), mk_var("I_EISa_Pos"))));
        loop.body.push_back(assign(mk_var("mask_pu"), mk_and(scj(), mk_var("I_EISa_PU"))));
        ExprPtr pos_stat = p.defect == SifX1Defect::MissingBypass
                               ? mk_var("I_EISa_Pos_Stat")
                               : mk_or(mk_var("I_EISa_Pos_Stat"), mk_var("I_EISa_Bypass"));
        loop.body.push_back(assign(
            mk_var("pos_ok"),
            mk_eq(mk_and(std::move(pos_stat), mk_var("mask_pos")), mk_var("mask_pos"))));
        loop.body.push_back(assign(
            mk_var("pu_ok"),
            mk_eq(mk_and(mk_or(mk_var("I_EISa_PU_Stat"), mk_var("I_EISa_Bypass")),
                         mk_var("mask_pu")),
                  mk_var("mask_pu"))));
        loop.body.push_back(
            assign(mk_var("ap_ok"),
                   mk_and(mk_and(mk_bitsel(mk_var("S0_AP_Pos"), loop_idx("j")),
                                 mk_bitsel(mk_var("S0_AP_PU"), loop_idx("j"))),
                          mk_bitsel(mk_var("S0_AP_Key_Distrib"), loop_idx("j")))));
        loop.body.push_back(assign(mk_bitsel(mk_var("N_EISa_Safe"), loop_idx("j")),
                                   mk_and(mk_and(mk_var("pos_ok"), mk_var("pu_ok")),
                                          mk_var("ap_ok"))));
        pou.body.push_back(std::move(loop));

        chain_template =
            "N_EISa_Safe.%X{j} = ("
            "(((I_EISa_Pos_Stat OR I_EISa_Bypass) AND (SC_S_{j} AND I_EISa_Pos))"
            " = (SC_S_{j} AND I_EISa_Pos))"
            " AND (((I_EISa_PU_Stat OR I_EISa_Bypass) AND (SC_S_{j} AND I_EISa_PU))"
            " = (SC_S_{j} AND I_EISa_PU))"
            " AND S0_AP_Pos.%X{j} AND S0_AP_PU.%X{j} AND S0_AP_Key_Distrib.%X{j})";
    } else {
        pou.name = "SIF_X1R";
        out.program_name = "sif_x1_reduced";
        int C = p.chains, E = p.eisa;
        DataType bools_e = DataType::array(DataType::boolean(), 0, E - 1);
        DataType bools_c = DataType::array(DataType::boolean(), 0, C - 1);
        pou.decls.push_back(array_decl("I_EISa_Pos_Stat", Section::Input, bools_e));
        pou.decls.push_back(array_decl("I_EISa_Bypass", Section::Input, bools_e));
        if (p.with_pu)
            pou.decls.push_back(array_decl("I_EISa_PU_Stat", Section::Input, bools_e));
        pou.decls.push_back(array_decl("S0_AP_Pos", Section::Input, bools_c));
        if (p.with_key_distrib) {
            pou.decls.push_back(array_decl("S0_AP_PU", Section::Input, bools_c));
            pou.decls.push_back(array_decl("S0_AP_Key_Distrib", Section::Input, bools_c));
        }
        pou.decls.push_back(array_decl("I_EISa_Pos", Section::Config, bools_e));
        if (p.with_pu)
            pou.decls.push_back(array_decl("I_EISa_PU", Section::Config, bools_e));
        pou.decls.push_back(
            array_decl("SC_S", Section::Config, DataType::array(bools_e, 0, C - 1)));
        pou.decls.push_back(array_decl("N_EISa_Safe", Section::Output, bools_c));
        pou.decls.push_back(bool_decl("ok", Section::Temp));

        Stmt loop(StmtKind::For);
        loop.loop_var = "j";
        loop.lo_expr = mk_int(0);
        loop.hi_expr = mk_int(C - 1);
        ExprPtr ap = mk_index(mk_var("S0_AP_Pos"), loop_idx("j"));
        if (p.with_key_distrib)
            ap = mk_and(mk_and(std::move(ap), mk_index(mk_var("S0_AP_PU"), loop_idx("j"))),
                        mk_index(mk_var("S0_AP_Key_Distrib"), loop_idx("j")));
        loop.body.push_back(assign(mk_var("ok"), std::move(ap)));
        Stmt inner(StmtKind::For);
        inner.loop_var = "i";
        inner.lo_expr = mk_int(0);
        inner.hi_expr = mk_int(E - 1);
        auto in_chain = [&](const char* bank) {
            return mk_and(mk_index(mk_index(mk_var("SC_S"), loop_idx("j")), loop_idx("i")),
                          mk_index(mk_var(bank), loop_idx("i")));
        };
        ExprPtr pos_safe = mk_index(mk_var("I_EISa_Pos_Stat"), loop_idx("i"));
        if (p.defect != SifX1Defect::MissingBypass)
            pos_safe = mk_or(std::move(pos_safe), mk_index(mk_var("I_EISa_Bypass"), loop_idx("i")));
        inner.body.push_back(assign(
            mk_var("ok"), mk_and(mk_var("ok"), mk_or(mk_not(in_chain("I_EISa_Pos")),
                                                     std::move(pos_safe)))));
        if (p.with_pu) {
            ExprPtr pu_safe = mk_or(mk_index(mk_var("I_EISa_PU_Stat"), loop_idx("i")),
                                    mk_index(mk_var("I_EISa_Bypass"), loop_idx("i")));
            inner.body.push_back(assign(
                mk_var("ok"), mk_and(mk_var("ok"), mk_or(mk_not(in_chain("I_EISa_PU")),
                                                         std::move(pu_safe)))));
        }
        loop.body.push_back(std::move(inner));
        loop.body.push_back(
            assign(mk_index(mk_var("N_EISa_Safe"), loop_idx("j")), mk_var("ok")));
        pou.body.push_back(std::move(loop));

        // closed-form requirement per chain, elements expanded textually
        std::string req = "N_EISa_Safe[{j}] = (S0_AP_Pos[{j}]";
        if (p.with_key_distrib)
            req += " AND S0_AP_PU[{j}] AND S0_AP_Key_Distrib[{j}]";
        for (int i = 0; i < E; ++i) {
            std::string si = std::to_string(i);
            req += " AND ((NOT (SC_S[{j}][" + si + "] AND I_EISa_Pos[" + si + "])) OR I_EISa_Pos_Stat[" +
                   si + "] OR I_EISa_Bypass[" + si + "])";
            if (p.with_pu)
                req += " AND ((NOT (SC_S[{j}][" + si + "] AND I_EISa_PU[" + si +
                       "])) OR I_EISa_PU_Stat[" + si + "] OR I_EISa_Bypass[" + si + "])";
        }
        req += ")";
        chain_template = req;
    }

    Program prog;
    prog.pous.push_back(std::move(pou));
    out.il_text = print_program(prog);

    int hi_chain = (p.word_scale ? 16 : p.chains) - 1;
    out.manifest = nlohmann::ordered_json{
        {"programs", {out.program_name + ".il"}},
        {"entry", prog.pous[0].name},
        {"engine", "bmc"},
        {"bound", 1},
        {"requirements",
         nlohmann::ordered_json::array(
             {nlohmann::ordered_json{{"id_prefix", "chain_safe"},
                                     {"template", chain_template},
                                     {"range", {0, hi_chain}}}})},
    };
    out.genlock = nlohmann::ordered_json{
        {"generator", "sif-x1"},
        {"parameters",
         {{"word_scale", p.word_scale},
          {"chains", p.chains},
          {"eisa", p.eisa},
          {"with_pu", p.with_pu},
          {"with_key_distrib", p.with_key_distrib},
          {"defect", p.defect == SifX1Defect::None ? "none" : "missing_bypass"}}},
    };
    return out;
}

// Table-1 demonstration values for the full-scale program: two installed
// doors (element bits 0 and 3), one with an emergency handle, chains 0 and 1
// holding one door each; words absent from the table are all-safe.
struct Scenario {
    Valuation config;
    Valuation inputs;
};

inline Scenario sif_x1_table1_scenario() {
    Scenario sc;
    auto& c = sc.config;
    c["I_EISa_Pos"] = Value::of_word(0x0009);
    c["I_EISa_PU"] = Value::of_word(0x0001);
    c["SC_S_0"] = Value::of_word(0x0001);
    c["SC_S_1"] = Value::of_word(0x0008);
    for (int j = 2; j < 16; ++j)
        c["SC_S_" + std::to_string(j)] = Value::of_word(0x0000);
    for (int i = 0; i < 76; ++i)
        c["C_SPARE_W" + detail_corpus::num2(i)] = Value::of_word(0);
    for (int i = 0; i < 4; ++i)
        c["C_SPARE_B" + std::to_string(i)] = Value::of_bool(false);
    auto& in = sc.inputs;
    in["I_EISa_Pos_Stat"] = Value::of_word(0x0009);
    in["I_EISa_PU_Stat"] = Value::of_word(0x0001);
    in["I_EISa_Bypass"] = Value::of_word(0x0000);
    in["S0_AP_Pos"] = Value::of_word(0x0009);
    in["S0_AP_PU"] = Value::of_word(0xFFFF);
    in["S0_AP_Key_Distrib"] = Value::of_word(0xFFFF);
    for (int i = 0; i < 15; ++i)
        in["I_SPARE_W" + detail_corpus::num2(i)] = Value::of_word(0);
    for (int i = 0; i < 2; ++i)
        in["I_SPARE_B" + std::to_string(i)] = Value::of_bool(false);
    return sc;
}

// Mode-transition / key-release block: beam permission is active-low over the
// access conditions; key release requires no pending down-request and healthy
// safety status. Seeded defects drop one conjunct on either side.
inline GeneratedCorpus gen_sif_2(Sif2Defect defect = Sif2Defect::None,
                                 const std::string& label = {}) {
    using namespace detail_corpus;
    GeneratedCorpus out;
    Pou pou;
    pou.kind = PouKind::FB;
    pou.name = "SIF_2";
    out.program_name = label.empty() ? "sif_2" : "sif_2_" + label;

    pou.decls.push_back(word_decl("N_EXT_ACCE_OK", Section::Input));
    pou.decls.push_back(word_decl("N_NO_SAFETY_ERR", Section::Input, "N_NO-SAFETY_ERR"));
    pou.decls.push_back(word_decl("I_PB_TEST_ON", Section::Input));
    pou.decls.push_back(word_decl("I_Key_TEST", Section::Input));
    pou.decls.push_back(word_decl("I_PB_Acce_ON", Section::Input));
    pou.decls.push_back(word_decl("I_Key_Acce", Section::Input));
    pou.decls.push_back(word_decl("N_SECU_NO_REQ_Down", Section::Input, "N_SECU_NO-REQ_Down"));
    for (int i = 0; i < 12; ++i)
        pou.decls.push_back(word_decl("I_SPARE_W" + num2(i), Section::Input));
    pou.decls.push_back(bool_decl("I_SPARE_B0", Section::Input));
    pou.decls.push_back(word_decl("N_MODE_BEAM", Section::Output));
    pou.decls.push_back(word_decl("O_RLS_ACCESS", Section::Output));

    // N_MODE_BEAM := NOT ((EXT AND ERR) AND ((TEST keys) OR (ACCESS keys)))
    ExprPtr cond = mk_and(mk_and(mk_var("N_EXT_ACCE_OK"), mk_var("N_NO_SAFETY_ERR")),
                          mk_or(mk_and(mk_var("I_PB_TEST_ON"), mk_var("I_Key_TEST")),
                                mk_and(mk_var("I_PB_Acce_ON"), mk_var("I_Key_Acce"))));
    pou.body.push_back(assign(mk_var("N_MODE_BEAM"), mk_not(std::move(cond))));

    ExprPtr release = mk_and(mk_var("N_SECU_NO_REQ_Down"), mk_var("N_NO_SAFETY_ERR"));
    if (defect != Sif2Defect::MissingProgramVar)
        release = mk_and(std::move(release), mk_var("N_EXT_ACCE_OK"));
    pou.body.push_back(assign(mk_var("O_RLS_ACCESS"), std::move(release)));

    Program prog;
    prog.pous.push_back(std::move(pou));
    out.il_text = print_program(prog);

    std::string beam_spec =
        defect == Sif2Defect::MissingSpecVar
            ? "((NOT (N_EXT_ACCE_OK AND ((I_PB_TEST_ON AND I_Key_TEST) OR (I_PB_Acce_ON AND "
              "I_Key_Acce))) OR (NOT N_MODE_BEAM)) = 16#FFFF)"
            : "((NOT ((N_EXT_ACCE_OK AND N_NO_SAFETY_ERR) AND ((I_PB_TEST_ON AND I_Key_TEST) OR "
              "(I_PB_Acce_ON AND I_Key_Acce))) OR (NOT N_MODE_BEAM)) = 16#FFFF)";
    std::string key_spec =
        "(O_RLS_ACCESS = (N_SECU_NO_REQ_Down AND N_NO_SAFETY_ERR AND N_EXT_ACCE_OK))";

    out.manifest = nlohmann::ordered_json{
        {"programs", {out.program_name + ".il"}},
        {"entry", "SIF_2"},
        {"engine", "bmc"},
        {"requirements",
         nlohmann::ordered_json::array(
             {nlohmann::ordered_json{{"id", "beam_mode"}, {"expr", beam_spec}},
              nlohmann::ordered_json{{"id", "key_release"}, {"expr", key_spec}}})},
    };
    const char* defect_name = defect == Sif2Defect::None              ? "none"
                              : defect == Sif2Defect::MissingSpecVar ? "missing_spec_var"
                                                                     : "missing_program_var";
    out.genlock = nlohmann::ordered_json{
        {"generator", "sif-2"},
        {"parameters", {{"defect", defect_name}, {"label", label.empty() ? "default" : label}}},
    };
    return out;
}

}  // namespace scanverif
