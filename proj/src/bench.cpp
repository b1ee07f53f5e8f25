#include "isingmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <sys/utsname.h>

#include "isingmc/fastexp.hpp"
#include <json.hpp>

namespace isingmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Smallest observable nonzero tick of the steady clock.
double timer_granularity() {
    double best = 1.0;
    for (int i = 0; i < 16; ++i) {
        const auto a = Clock::now();
        auto b = Clock::now();
        while (b == a) b = Clock::now();
        best = std::min(best, std::chrono::duration<double>(b - a).count());
    }
    return best;
}

struct ChainSetup {
    const SpinModel* model;
    SpinPermutation perm;
};

struct RepResult {
    double seconds;
    uint64_t checksum;
};

// One repetition: every beta chain run to completion with identical seeds.
// Chains may run on parallel workers; results are worker-count invariant.
RepResult run_repetition(const ChainSetup& setup, const BenchConfig& cfg, EngineKind engine,
                         ExpKind exp_kind, std::vector<uint32_t> stats_widths,
                         FlipStats* stats_out, std::vector<double>* per_beta_flip) {
    const size_t chains = cfg.betas.size();
    std::vector<SweepState> states;
    states.reserve(chains);
    for (size_t c = 0; c < chains; ++c) {
        EngineConfig ec;
        ec.engine = engine;
        ec.params.beta = cfg.betas[c];
        ec.params.tau_scale = cfg.tau_scale;
        ec.params.exp_kind = exp_kind;
        ec.seed = cfg.seed + uint32_t(c) * 0x1000u;
        ec.stats_widths = stats_widths;
        ec.workers = 1;
        states.push_back(init_state(*setup.model, ec));
    }

    const auto run_chain = [&](size_t c) { run_sweeps(states[c], *setup.model, cfg.sweeps); };

    const auto t0 = Clock::now();
    if (cfg.workers <= 1 || chains <= 1) {
        for (size_t c = 0; c < chains; ++c) run_chain(c);
    } else {
        const uint32_t pool = std::min<uint32_t>(cfg.workers, uint32_t(chains));
        std::vector<std::thread> threads;
        std::atomic<size_t> next{0};
        for (uint32_t w = 0; w < pool; ++w) {
            threads.emplace_back([&]() {
                for (size_t c = next.fetch_add(1); c < chains; c = next.fetch_add(1)) run_chain(c);
            });
        }
        for (std::thread& t : threads) t.join();
    }
    const double elapsed = seconds_since(t0);

    uint64_t checksum = 1469598103934665603ull;
    for (size_t c = 0; c < chains; ++c) {
        checksum ^= state_checksum(states[c].spins, &setup.perm) + 0x9E3779B97F4A7C15ull +
                    (checksum << 6) + (checksum >> 2);
    }
    if (stats_out != nullptr) {
        FlipStats total;
        for (const SweepState& st : states) {
            total.attempts += st.stats.attempts;
            total.flips += st.stats.flips;
            for (const auto& [w, c] : st.stats.group_wait) {
                total.group_wait[w].groups += c.groups;
                total.group_wait[w].with_flip += c.with_flip;
            }
        }
        *stats_out = total;
    }
    if (per_beta_flip != nullptr) {
        per_beta_flip->clear();
        for (const SweepState& st : states) per_beta_flip->push_back(st.stats.flip_rate());
    }
    return {elapsed, checksum};
}

}  // namespace

std::string environment_descriptor() {
    utsname u{};
    std::string host = "unknown";
    if (uname(&u) == 0) {
        host = std::string(u.nodename) + " " + u.sysname + " " + u.release + " " + u.machine;
    }
#ifdef NDEBUG
    const char* profile = "optimized";
#else
    const char* profile = "debug";
#endif
    return host + "; build=" + profile + "; compiler=" + __VERSION__;
}

BenchReport run_benchmark(const SpinModel& model, const BenchConfig& config) {
    if (config.engines.empty()) throw Error("run_benchmark: no engines configured");
    if (config.repetitions < 1) throw Error("run_benchmark: repetitions must be >= 1");
    if (config.betas.empty()) throw Error("run_benchmark: beta ladder is empty");

    BenchReport report;
    report.spins = model.n_spins;
    report.sweeps = config.sweeps;
    report.repetitions = config.repetitions;
    report.betas = config.betas;
    report.environment = environment_descriptor();

    std::vector<uint32_t> widths;
    for (uint32_t w : config.stats_widths) {
        if (w > 0 && model.n_spins % w == 0) widths.push_back(w);
    }

    const double granularity = timer_granularity();
    BenchConfig cfg = config;

    for (EngineKind engine : config.engines) {
        ChainSetup setup_storage;
        auto [emodel, perm] = prepare_model_for_engine(model, engine);
        setup_storage.model = &emodel;
        setup_storage.perm = std::move(perm);
        const ExpKind exp_kind = cfg.exp_kind.value_or(default_exp_kind(engine));

        EngineBenchResult result;
        result.engine = engine;
        result.exp_kind = exp_kind;

        // Warmup repetition, untimed, carrying the statistics accounting.
        FlipStats stats;
        run_repetition(setup_storage, cfg, engine, exp_kind, widths, &stats,
                       &result.per_beta_flip_rate);
        result.flip_rate = stats.flip_rate();
        for (uint32_t w : widths) {
            const GroupCounter& c = stats.group_wait.at(w);
            result.wait[w] = c.groups ? double(c.with_flip) / double(c.groups) : 0.0;
        }

        for (;;) {
            result.rep_seconds.clear();
            uint64_t checksum = 0;
            for (uint32_t rep = 0; rep < cfg.repetitions; ++rep) {
                const RepResult r = run_repetition(setup_storage, cfg, engine, exp_kind, {},
                                                   nullptr, nullptr);
                result.rep_seconds.push_back(r.seconds);
                if (rep == 0) {
                    checksum = r.checksum;
                } else if (checksum != r.checksum) {
                    throw Error("run_benchmark: nondeterministic result for engine " +
                                std::string(engine_name(engine)));
                }
            }
            result.checksum = checksum;
            double mean = 0.0;
            for (double s : result.rep_seconds) mean += s;
            mean /= double(result.rep_seconds.size());
            if (mean >= 100.0 * granularity || cfg.sweeps >= config.sweeps * 1000) {
                break;
            }
            report.warnings.push_back(std::string("engine ") + engine_name(engine) +
                                      ": timer resolution below 1% of run time; sweeps raised to " +
                                      std::to_string(cfg.sweeps * 10));
            cfg.sweeps *= 10;
            report.sweeps = cfg.sweeps;
        }

        double mean = 0.0;
        for (double s : result.rep_seconds) mean += s;
        mean /= double(result.rep_seconds.size());
        double var = 0.0;
        for (double s : result.rep_seconds) var += (s - mean) * (s - mean);
        var = result.rep_seconds.size() > 1 ? var / double(result.rep_seconds.size() - 1) : 0.0;
        result.mean_seconds = mean;
        result.sd_seconds = std::sqrt(var);
        result.spin_updates_per_sec =
            double(model.n_spins) * double(cfg.sweeps) * double(cfg.betas.size()) / mean;
        report.engines.push_back(std::move(result));
    }

    // Ratios against the reference engine (first engine when absent).
    size_t base = 0;
    for (size_t i = 0; i < report.engines.size(); ++i) {
        if (report.engines[i].engine == EngineKind::reference) {
            base = i;
            break;
        }
    }
    const double base_time = report.engines[base].mean_seconds;
    for (EngineBenchResult& r : report.engines) {
        r.speedup_vs_reference = base_time / r.mean_seconds;
    }
    return report;
}

std::string report_to_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "engine,spins,sweeps,reps,mean_seconds,sd_seconds,spin_updates_per_sec,"
           "speedup_vs_reference,flip_rate,wait_w4,wait_w32\n";
    const auto wait_or_nan = [](const EngineBenchResult& r, uint32_t w) {
        const auto it = r.wait.find(w);
        return it == r.wait.end() ? std::string("nan") : std::to_string(it->second);
    };
    for (const EngineBenchResult& r : report.engines) {
        out << engine_name(r.engine) << "," << report.spins << "," << report.sweeps << ","
            << report.repetitions << "," << r.mean_seconds << "," << r.sd_seconds << ","
            << r.spin_updates_per_sec << "," << r.speedup_vs_reference << "," << r.flip_rate << ","
            << wait_or_nan(r, 4) << "," << wait_or_nan(r, 32) << "\n";
    }
    out << "# environment: " << report.environment << "\n";
    out << "# beta_ladder (" << report.beta_ladder_origin << "):";
    for (float b : report.betas) out << " " << b;
    out << "\n";
    for (const std::string& w : report.warnings) out << "# warning: " << w << "\n";
    return out.str();
}

std::string report_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["spins"] = report.spins;
    j["sweeps"] = report.sweeps;
    j["reps"] = report.repetitions;
    j["betas"] = report.betas;
    j["beta_ladder_origin"] = report.beta_ladder_origin;
    j["environment"] = report.environment;
    j["warnings"] = report.warnings;
    j["engines"] = nlohmann::json::array();
    for (const EngineBenchResult& r : report.engines) {
        nlohmann::json e;
        e["engine"] = engine_name(r.engine);
        e["exp"] = exp_kind_name(r.exp_kind);
        e["spins"] = report.spins;
        e["sweeps"] = report.sweeps;
        e["reps"] = report.repetitions;
        e["mean_seconds"] = r.mean_seconds;
        e["sd_seconds"] = r.sd_seconds;
        e["spin_updates_per_sec"] = r.spin_updates_per_sec;
        e["speedup_vs_reference"] = r.speedup_vs_reference;
        e["flip_rate"] = r.flip_rate;
        nlohmann::json wait = nlohmann::json::object();
        for (const auto& [w, p] : r.wait) wait[std::to_string(w)] = p;
        e["wait"] = wait;
        e["per_beta_flip_rate"] = r.per_beta_flip_rate;
        e["rep_seconds"] = r.rep_seconds;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(r.checksum));
        e["checksum"] = buf;
        j["engines"].push_back(std::move(e));
    }
    return j.dump(2);
}

void write_report(const BenchReport& report, const std::string& path, bool as_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_report: cannot open " + path);
    out << (as_json ? report_to_json(report) : report_to_csv(report));
    if (!out) throw Error("write_report: write failed for " + path);
    out << std::flush;
}

ExpBenchResult bench_exp_fast(uint32_t n_values, uint32_t repetitions) {
    std::vector<float> xs(n_values);
    for (uint32_t i = 0; i < n_values; ++i) {
        xs[i] = -20.0f * float(i % 1024) / 1024.0f;  // Metropolis-typical arguments
    }
    std::vector<float> out(n_values);
    // Map loops, so neither side is throttled by an accumulator dependence;
    // the barrier keeps the stores from being optimized away. The fast side
    // runs the 4-wide kernel the lane-parallel engine uses.
    const auto consume = [&]() { asm volatile("" : : "r"(out.data()) : "memory"); };

    double best_fast = 1e300;
    double best_libm = 1e300;
    for (uint32_t rep = 0; rep < repetitions + 1; ++rep) {
        auto t0 = Clock::now();
        exp_fast_map(xs.data(), out.data(), n_values);
        consume();
        const double fast_s = seconds_since(t0);

        t0 = Clock::now();
        for (uint32_t i = 0; i < n_values; ++i) out[i] = std::exp(xs[i]);
        consume();
        const double libm_s = seconds_since(t0);

        if (rep == 0) continue;  // warmup
        best_fast = std::min(best_fast, fast_s);
        best_libm = std::min(best_libm, libm_s);
    }
    ExpBenchResult r;
    r.fast_ns_per_call = best_fast / double(n_values) * 1e9;
    r.libm_ns_per_call = best_libm / double(n_values) * 1e9;
    r.speedup = best_libm / best_fast;
    return r;
}

}  // namespace isingmc
