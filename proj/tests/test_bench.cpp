#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <sstream>

#include "isingmc/bench.hpp"
#include "isingmc/model_io.hpp"

#include <json.hpp>

using namespace isingmc;

namespace {

GenerateSpec small_spec() {
    GenerateSpec spec;
    spec.layers = 16;
    spec.per_layer = 6;
    spec.seed = 3;
    return spec;
}

}  // namespace

TEST_CASE("generator hits the paper-scale spin count") {
    GenerateSpec spec;
    spec.layers = 256;
    spec.per_layer = 96;
    const SpinModel m = generate_model(spec);
    CHECK(m.n_spins == 24576);
    for (uint32_t i = 0; i < m.n_spins; ++i) {
        CHECK(m.adjacency[i].degree() >= 6);
        CHECK(m.adjacency[i].degree() <= 8);
    }
}

TEST_CASE("tau ring needs the explicit flag") {
    GenerateSpec spec;
    spec.layers = 4;
    spec.per_layer = 1;
    CHECK_THROWS(generate_model(spec));
    spec.allow_tau_ring = true;
    const SpinModel m = generate_model(spec);
    CHECK(m.n_spins == 4);
    CHECK(m.adjacency[0].degree() == 2);
}

TEST_CASE("unattainable degree targets are rejected") {
    GenerateSpec spec;
    spec.layers = 4;
    spec.per_layer = 3;
    spec.space_degree_min = 4;  // only 2 other positions exist
    CHECK_THROWS(generate_model(spec));
}

TEST_CASE("same seed gives byte-identical model files") {
    const SpinModel a = generate_model(small_spec());
    const SpinModel b = generate_model(small_spec());
    CHECK(model_to_string(a) == model_to_string(b));
    GenerateSpec other = small_spec();
    other.seed = 4;
    CHECK(model_to_string(generate_model(other)) != model_to_string(a));
}

TEST_CASE("benchmark report: determinism, ratios, and serialization") {
    const SpinModel m = generate_model(small_spec());
    BenchConfig cfg;
    cfg.engines = {EngineKind::reference, EngineKind::basic, EngineKind::vector4};
    cfg.sweeps = 200;
    cfg.repetitions = 3;
    cfg.betas = {0.2f, 0.8f};
    cfg.seed = 5;
    cfg.workers = 1;
    const BenchReport report = run_benchmark(m, cfg);

    REQUIRE(report.engines.size() == 3);
    CHECK(report.engines[0].engine == EngineKind::reference);
    CHECK(report.engines[0].speedup_vs_reference == doctest::Approx(1.0));
    for (const EngineBenchResult& r : report.engines) {
        CHECK(r.mean_seconds > 0.0);
        CHECK(r.sd_seconds >= 0.0);
        CHECK(r.rep_seconds.size() == 3);
        CHECK(r.flip_rate > 0.0);
        CHECK(r.wait.count(4) == 1);
        CHECK(r.wait.count(32) == 1);
    }
    CHECK(!report.environment.empty());

    // Reciprocal ratio structure between any engine pair.
    const double ab = report.engines[1].mean_seconds / report.engines[2].mean_seconds;
    const double ba = report.engines[2].mean_seconds / report.engines[1].mean_seconds;
    CHECK(ab * ba == doctest::Approx(1.0).epsilon(0.01));

    // CSV: header + one row per engine, then '#' trailer lines.
    const std::string csv = report_to_csv(report);
    std::istringstream lines(csv);
    std::string line;
    int data_rows = 0, comment_rows = 0;
    std::getline(lines, line);
    CHECK(line ==
          "engine,spins,sweeps,reps,mean_seconds,sd_seconds,spin_updates_per_sec,"
          "speedup_vs_reference,flip_rate,wait_w4,wait_w32");
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        (line[0] == '#' ? comment_rows : data_rows) += 1;
    }
    CHECK(data_rows == 3);
    CHECK(comment_rows >= 1);

    // JSON round trip preserves every numeric field bit-exactly.
    const std::string json_text = report_to_json(report);
    const nlohmann::json parsed = nlohmann::json::parse(json_text);
    REQUIRE(parsed["engines"].size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        const auto& e = parsed["engines"][i];
        const EngineBenchResult& r = report.engines[i];
        CHECK(std::bit_cast<uint64_t>(e["mean_seconds"].get<double>()) ==
              std::bit_cast<uint64_t>(r.mean_seconds));
        CHECK(std::bit_cast<uint64_t>(e["sd_seconds"].get<double>()) ==
              std::bit_cast<uint64_t>(r.sd_seconds));
        CHECK(std::bit_cast<uint64_t>(e["spin_updates_per_sec"].get<double>()) ==
              std::bit_cast<uint64_t>(r.spin_updates_per_sec));
        CHECK(std::bit_cast<uint64_t>(e["speedup_vs_reference"].get<double>()) ==
              std::bit_cast<uint64_t>(r.speedup_vs_reference));
        CHECK(std::bit_cast<uint64_t>(e["flip_rate"].get<double>()) ==
              std::bit_cast<uint64_t>(r.flip_rate));
    }
}

TEST_CASE("single-engine benchmark: speedup column is 1") {
    const SpinModel m = generate_model(small_spec());
    BenchConfig cfg;
    cfg.engines = {EngineKind::basic};
    cfg.sweeps = 100;
    cfg.repetitions = 2;
    cfg.betas = {0.4f};
    const BenchReport report = run_benchmark(m, cfg);
    REQUIRE(report.engines.size() == 1);
    CHECK(report.engines[0].speedup_vs_reference == doctest::Approx(1.0));
}

TEST_CASE("benchmark rejects empty configurations") {
    const SpinModel m = generate_model(small_spec());
    BenchConfig cfg;
    cfg.engines = {};
    CHECK_THROWS(run_benchmark(m, cfg));
    cfg.engines = {EngineKind::basic};
    cfg.betas = {};
    CHECK_THROWS(run_benchmark(m, cfg));
}

TEST_CASE("parallel chains produce the same checksums as single-worker runs") {
    const SpinModel m = generate_model(small_spec());
    BenchConfig cfg;
    cfg.engines = {EngineKind::basic};
    cfg.sweeps = 150;
    cfg.repetitions = 2;
    cfg.betas = {0.2f, 0.5f, 1.0f};
    cfg.seed = 6;
    cfg.workers = 1;
    const BenchReport single = run_benchmark(m, cfg);
    cfg.workers = 2;
    const BenchReport parallel = run_benchmark(m, cfg);
    CHECK(single.engines[0].checksum == parallel.engines[0].checksum);
}

TEST_CASE("exp microbenchmark runs and reports a positive ratio") {
    const ExpBenchResult r = bench_exp_fast(1u << 16, 2);
    CHECK(r.fast_ns_per_call > 0.0);
    CHECK(r.libm_ns_per_call > 0.0);
    CHECK(r.speedup > 0.0);
}
