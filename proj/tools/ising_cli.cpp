// Command-line front end; uses only the C API from isingmc.h.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "isingmc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

int fail(const std::string& context) {
    std::cerr << "error: " << context << ": " << ising_last_error() << "\n";
    return kExitConfigError;
}

bool write_text(const std::string& path, const char* text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    return bool(out);
}

int parse_engine(const std::string& name, ising_engine& out) {
    if (name == "reference") out = ISING_ENGINE_REFERENCE;
    else if (name == "basic") out = ISING_ENGINE_BASIC;
    else if (name == "vector4") out = ISING_ENGINE_VECTOR4;
    else if (name == "coalesced") out = ISING_ENGINE_COALESCED;
    else return -1;
    return 0;
}

int parse_exp(const std::string& name, int& out) {
    if (name == "default") out = ISING_EXP_ENGINE_DEFAULT;
    else if (name == "exact") out = ISING_EXP_EXACT;
    else if (name == "fast") out = ISING_EXP_FAST;
    else if (name == "accurate") out = ISING_EXP_ACCURATE;
    else return -1;
    return 0;
}

// Applies a flat "key = value" file to a subcommand: every key names one of
// its long flags; values given on the command line win over the file.
int apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open config file " << path << "\n";
        return -1;
    }
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto strip = [](std::string s) {
            const size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: " << path << ":" << line_no << ": expected key = value\n";
            return -1;
        }
        const std::string key = strip(text.substr(0, eq));
        const std::string value = strip(text.substr(eq + 1));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            std::cerr << "error: " << path << ":" << line_no << ": unknown key '" << key
                      << "' for subcommand " << cmd->get_name() << "\n";
            return -1;
        }
        if (opt->count() > 0) continue;  // command line overrides the file
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            std::cerr << "error: " << path << ":" << line_no << ": " << e.what() << "\n";
            return -1;
        }
    }
    return 0;
}

struct ModelHandle {
    ising_model* model = nullptr;
    ~ModelHandle() { ising_model_free(model); }
};

struct StringHandle {
    char* s = nullptr;
    ~StringHandle() { ising_string_free(s); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-Ising Metropolis Monte Carlo engine"};
    app.require_subcommand(1);
    std::string config_path;
    const auto with_config = [&config_path](CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "flat key = value file mirroring this subcommand's flags; "
                        "flags override it");
    };

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "generate a layered model file");
    with_config(gen_cmd);
    ising_generate_spec gen{};
    gen.layers = 64;
    gen.per_layer = 8;
    gen.space_degree_min = 4;
    gen.space_degree_max = 6;
    gen.j_tau = 1.0f;
    gen.seed = 1;
    std::string gen_couplings = "pm1";
    std::string gen_out;
    bool gen_tau_ring = false;
    gen_cmd->add_option("--layers", gen.layers, "layer count L (>= 4)");
    gen_cmd->add_option("--per-layer", gen.per_layer, "positions per layer P");
    gen_cmd->add_option("--degree-min", gen.space_degree_min, "minimum space degree");
    gen_cmd->add_option("--degree-max", gen.space_degree_max, "maximum space degree");
    gen_cmd->add_option("--couplings", gen_couplings, "pm1 | uniform")
        ->check(CLI::IsMember({"pm1", "uniform"}));
    gen_cmd->add_option("--j-tau", gen.j_tau, "tau coupling");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_flag("--allow-tau-ring", gen_tau_ring, "permit per-layer = 1 (degree-2 ring)");
    gen_cmd->add_option("--out", gen_out, "output model file");

    // run
    auto* run_cmd = app.add_subcommand("run", "run one engine on a model");
    with_config(run_cmd);
    std::string run_model;
    std::string run_engine = "basic";
    std::string run_exp = "default";
    std::string run_out;
    std::vector<uint32_t> run_widths;
    ising_run_params run{};
    run.sweeps = 1000;
    run.beta = 1.0f;
    run.tau_scale = 1.0f;
    run.seed = 1;
    run.workers = 1;
    run_cmd->add_option("--model", run_model, "model file");
    run_cmd->add_option("--engine", run_engine, "reference | basic | vector4 | coalesced")
        ->check(CLI::IsMember({"reference", "basic", "vector4", "coalesced"}));
    run_cmd->add_option("--sweeps", run.sweeps, "sweeps to run");
    run_cmd->add_option("--beta", run.beta, "inverse temperature");
    run_cmd->add_option("--tau-scale", run.tau_scale, "tau field multiplier");
    run_cmd->add_option("--exp", run_exp, "default | exact | fast | accurate")
        ->check(CLI::IsMember({"default", "exact", "fast", "accurate"}));
    run_cmd->add_option("--seed", run.seed, "RNG base seed");
    run_cmd->add_option("--workers", run.workers, "coalesced schedule workers");
    run_cmd->add_option("--stats-widths", run_widths, "group widths for wait statistics")
        ->delimiter(',');
    run_cmd->add_option("--out", run_out, "report JSON path ('-' = stdout)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "benchmark engines against each other");
    with_config(bench_cmd);
    std::string bench_model;
    std::vector<std::string> bench_engines = {"reference", "basic", "vector4"};
    std::vector<float> bench_betas = {0.15f, 0.35f, 0.8f, 2.0f};
    std::string bench_exp = "default";
    std::string bench_format = "csv";
    std::string bench_out;
    bool bench_single = false;
    ising_bench_params bench{};
    bench.sweeps = 1000;
    bench.repetitions = 10;
    bench.tau_scale = 1.0f;
    bench.seed = 1;
    bench.workers = 0;  // 0 = one chain per available core
    ising_generate_spec bench_gen{};
    bench_gen.layers = 256;
    bench_gen.per_layer = 96;
    bench_gen.space_degree_min = 4;
    bench_gen.space_degree_max = 6;
    bench_gen.j_tau = 1.0f;
    bench_gen.seed = 1;
    bench_cmd->add_option("--model", bench_model, "model file (generated when omitted)");
    bench_cmd->add_option("--engines", bench_engines, "engines to time")->delimiter(',');
    bench_cmd->add_option("--sweeps", bench.sweeps, "sweeps per chain");
    bench_cmd->add_option("--reps", bench.repetitions, "timed repetitions");
    bench_cmd->add_option("--betas", bench_betas, "beta ladder, one chain per value")
        ->delimiter(',');
    bench_cmd->add_option("--exp", bench_exp, "default | exact | fast | accurate")
        ->check(CLI::IsMember({"default", "exact", "fast", "accurate"}));
    bench_cmd->add_option("--seed", bench.seed, "RNG base seed");
    bench_cmd->add_option("--workers", bench.workers, "chains in flight (0 = all cores)");
    bench_cmd->add_flag("--single", bench_single, "pin everything to one worker");
    bench_cmd->add_option("--gen-layers", bench_gen.layers, "generated model: layers");
    bench_cmd->add_option("--gen-per-layer", bench_gen.per_layer, "generated model: positions");
    bench_cmd->add_option("--gen-seed", bench_gen.seed, "generated model: seed");
    bench_cmd->add_option("--format", bench_format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    bench_cmd->add_option("--out", bench_out, "report path ('-' = stdout)");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "run a validation suite");
    with_config(val_cmd);
    std::string val_suite = "all";
    std::string val_out;
    val_cmd->add_option("--suite", val_suite, "rng | exp | trajectory | boltzmann | all")
        ->check(CLI::IsMember({"rng", "exp", "trajectory", "boltzmann", "all"}));
    val_cmd->add_option("--out", val_out, "JSON detail report path ('-' = stdout)");

    // exp-scan
    auto* scan_cmd = app.add_subcommand("exp-scan", "scan exponential approximation error");
    with_config(scan_cmd);
    std::string scan_variant = "fast";
    double scan_lo = -80.0, scan_hi = 80.0;
    long long scan_samples = 1000000;
    long long scan_rows = 4096;
    std::string scan_out;
    scan_cmd->add_option("--variant", scan_variant, "fast | accurate")
        ->check(CLI::IsMember({"fast", "accurate"}));
    scan_cmd->add_option("--lo", scan_lo, "domain lower bound");
    scan_cmd->add_option("--hi", scan_hi, "domain upper bound");
    scan_cmd->add_option("--samples", scan_samples, "evenly spaced sample count");
    scan_cmd->add_option("--max-rows", scan_rows, "CSV sample rows (thinned)");
    scan_cmd->add_option("--out", scan_out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    for (CLI::App* cmd : {gen_cmd, run_cmd, bench_cmd, val_cmd, scan_cmd}) {
        if (cmd->parsed() && !config_path.empty()) {
            if (apply_config_file(cmd, config_path) != 0) return kExitConfigError;
        }
    }
    const auto require_value = [](const std::string& value, const char* flag) {
        if (!value.empty()) return true;
        std::cerr << "error: " << flag << " is required (flag or config file)\n";
        return false;
    };
    if (gen_cmd->parsed() && !require_value(gen_out, "--out")) return kExitConfigError;
    if (run_cmd->parsed() && !require_value(run_model, "--model")) return kExitConfigError;
    if (scan_cmd->parsed() && !require_value(scan_out, "--out")) return kExitConfigError;

    if (gen_cmd->parsed()) {
        gen.couplings_uniform = gen_couplings == "uniform" ? 1 : 0;
        gen.allow_tau_ring = gen_tau_ring ? 1 : 0;
        ModelHandle m;
        if (ising_model_generate(&gen, &m.model) != ISING_OK) return fail("generate");
        if (ising_model_save(m.model, gen_out.c_str()) != ISING_OK) return fail("save");
        std::cerr << "wrote " << gen_out << " (" << ising_model_spins(m.model) << " spins)\n";
        return kExitOk;
    }

    if (run_cmd->parsed()) {
        if (parse_engine(run_engine, run.engine) != 0) return kExitConfigError;
        if (parse_exp(run_exp, run.exp_kind) != 0) return kExitConfigError;
        run.stats_widths = run_widths.data();
        run.n_stats_widths = uint32_t(run_widths.size());
        ModelHandle m;
        if (ising_model_load(run_model.c_str(), &m.model) != ISING_OK) return fail("load");
        StringHandle json;
        if (ising_run_json(m.model, &run, nullptr, &json.s) != ISING_OK) return fail("run");
        if (!write_text(run_out.empty() ? "-" : run_out, json.s)) {
            std::cerr << "error: cannot write " << run_out << "\n";
            return kExitConfigError;
        }
        return kExitOk;
    }

    if (bench_cmd->parsed()) {
        std::vector<ising_engine> engines;
        for (const std::string& name : bench_engines) {
            ising_engine e;
            if (parse_engine(name, e) != 0) {
                std::cerr << "error: unknown engine '" << name << "'\n";
                return kExitConfigError;
            }
            engines.push_back(e);
        }
        if (parse_exp(bench_exp, bench.exp_kind) != 0) return kExitConfigError;
        bench.engines = engines.data();
        bench.n_engines = uint32_t(engines.size());
        bench.betas = bench_betas.data();
        bench.n_betas = uint32_t(bench_betas.size());
        if (bench_single) {
            bench.workers = 1;
        } else if (bench.workers == 0) {
            bench.workers = std::max(1u, std::thread::hardware_concurrency());
        }

        ModelHandle m;
        if (!bench_model.empty()) {
            if (ising_model_load(bench_model.c_str(), &m.model) != ISING_OK) return fail("load");
        } else {
            if (ising_model_generate(&bench_gen, &m.model) != ISING_OK) return fail("generate");
            std::cerr << "generated benchmark model: " << ising_model_spins(m.model)
                      << " spins\n";
        }
        ising_bench_report* report = nullptr;
        if (ising_bench_run(m.model, &bench, &report) != ISING_OK) return fail("bench");
        StringHandle text;
        const ising_status st = bench_format == "json" ? ising_bench_report_json(report, &text.s)
                                                       : ising_bench_report_csv(report, &text.s);
        ising_bench_report_free(report);
        if (st != ISING_OK) return fail("bench report");
        if (!write_text(bench_out.empty() ? "-" : bench_out, text.s)) {
            std::cerr << "error: cannot write " << bench_out << "\n";
            return kExitConfigError;
        }
        return kExitOk;
    }

    if (val_cmd->parsed()) {
        int failures = 0;
        StringHandle json;
        if (ising_validate(val_suite.c_str(), &failures, &json.s) != ISING_OK) {
            return fail("validate");
        }
        if (!val_out.empty()) {
            if (!write_text(val_out, json.s)) {
                std::cerr << "error: cannot write " << val_out << "\n";
                return kExitConfigError;
            }
        } else {
            std::cout << json.s << "\n";
        }
        if (failures > 0) {
            std::cerr << "validate: " << failures << " check(s) failed\n";
            return kExitValidationFailure;
        }
        std::cerr << "validate: all checks passed\n";
        return kExitOk;
    }

    if (scan_cmd->parsed()) {
        ising_exp_scan_summary summary{};
        const int variant = scan_variant == "fast" ? 0 : 1;
        if (ising_exp_scan(variant, scan_lo, scan_hi, scan_samples, scan_out.c_str(), scan_rows,
                           &summary) != ISING_OK) {
            return fail("exp-scan");
        }
        std::printf("scan %s over [%g, %g], %lld samples: min=%.6g max=%.6g mean=%.6g\n",
                    scan_variant.c_str(), summary.lo, summary.hi, summary.samples, summary.min_rel,
                    summary.max_rel, summary.mean_rel);
        return kExitOk;
    }

    return kExitConfigError;
}
