// Exercises the shared-library surface the CLI is built on.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "isingmc.h"

#include <json.hpp>

namespace {

ising_model* generated_model(uint32_t layers, uint32_t per_layer, uint32_t seed) {
    ising_generate_spec spec{};
    spec.layers = layers;
    spec.per_layer = per_layer;
    spec.space_degree_min = 4;
    spec.space_degree_max = 6;
    spec.j_tau = 1.0f;
    spec.seed = seed;
    ising_model* m = nullptr;
    REQUIRE(ising_model_generate(&spec, &m) == ISING_OK);
    return m;
}

}  // namespace

TEST_CASE("generate, save, load, and query a model") {
    ising_model* m = generated_model(16, 6, 3);
    CHECK(ising_model_spins(m) == 96);
    uint32_t L = 0, P = 0;
    CHECK(ising_model_layers(m, &L, &P) == 1);
    CHECK(L == 16);
    CHECK(P == 6);

    const char* path = "/tmp/isingmc_capi_model.txt";
    REQUIRE(ising_model_save(m, path) == ISING_OK);
    ising_model* back = nullptr;
    REQUIRE(ising_model_load(path, &back) == ISING_OK);
    CHECK(ising_model_spins(back) == 96);

    char* text_a = nullptr;
    char* text_b = nullptr;
    REQUIRE(ising_model_to_string(m, &text_a) == ISING_OK);
    REQUIRE(ising_model_to_string(back, &text_b) == ISING_OK);
    CHECK(std::strcmp(text_a, text_b) == 0);
    ising_string_free(text_a);
    ising_string_free(text_b);

    std::vector<int8_t> spins(96, 1);
    double cost = 0.0;
    CHECK(ising_model_cost(m, spins.data(), 96, &cost) == ISING_OK);
    CHECK(std::isfinite(cost));

    ising_model_free(m);
    ising_model_free(back);
    std::remove(path);
}

TEST_CASE("error paths set status and message") {
    ising_model* m = nullptr;
    CHECK(ising_model_load("/tmp/isingmc_no_such_file.txt", &m) == ISING_ERR_IO);
    CHECK(std::strlen(ising_last_error()) > 0);

    CHECK(ising_model_from_string("ising-model v1\nspins 2\nwhat 1\n", &m) == ISING_ERR_PARSE);
    CHECK(std::string(ising_last_error()).find("line 3") != std::string::npos);

    ising_generate_spec bad{};
    bad.layers = 2;  // < 4
    bad.per_layer = 4;
    CHECK(ising_model_generate(&bad, &m) == ISING_ERR_ARGUMENT);
    CHECK(ising_model_load(nullptr, &m) == ISING_ERR_ARGUMENT);
}

TEST_CASE("run every engine through the C surface") {
    ising_model* m = generated_model(16, 6, 3);
    const uint32_t widths[] = {1, 4, 32};
    for (ising_engine engine : {ISING_ENGINE_REFERENCE, ISING_ENGINE_BASIC, ISING_ENGINE_VECTOR4,
                                ISING_ENGINE_COALESCED}) {
        ising_run_params p{};
        p.engine = engine;
        p.sweeps = 300;
        p.beta = 0.4f;
        p.tau_scale = 1.0f;
        p.exp_kind = ISING_EXP_ENGINE_DEFAULT;
        p.seed = 7;
        p.workers = 1;
        p.stats_widths = widths;
        p.n_stats_widths = 3;
        ising_run_report rep{};
        REQUIRE(ising_run(m, &p, &rep) == ISING_OK);
        CHECK(rep.attempts == 300ull * 96ull);
        CHECK(rep.flip_rate > 0.0);
        CHECK(rep.n_wait == 3);
        CHECK(rep.wait_probability[0] <= rep.wait_probability[1]);
        CHECK(rep.wait_probability[1] <= rep.wait_probability[2]);
    }
    ising_model_free(m);
}

TEST_CASE("run JSON report carries the contract fields") {
    ising_model* m = generated_model(16, 6, 3);
    ising_run_params p{};
    p.engine = ISING_ENGINE_BASIC;
    p.sweeps = 100;
    p.beta = 0.4f;
    p.tau_scale = 1.0f;
    p.exp_kind = ISING_EXP_FAST;
    p.seed = 1;
    p.workers = 1;
    char* json_text = nullptr;
    ising_run_report rep{};
    REQUIRE(ising_run_json(m, &p, &rep, &json_text) == ISING_OK);
    const nlohmann::json j = nlohmann::json::parse(json_text);
    CHECK(j["engine"] == "basic");
    CHECK(j["exp"] == "fast");
    CHECK(j.contains("final_cost"));
    CHECK(j.contains("flip_rate"));
    CHECK(j.contains("wait"));
    CHECK(j.contains("checksum"));
    CHECK(j.contains("environment"));
    ising_string_free(json_text);
    ising_model_free(m);
}

TEST_CASE("identical seeds give identical checksums across the C boundary") {
    ising_model* m = generated_model(16, 6, 3);
    ising_run_params p{};
    p.engine = ISING_ENGINE_REFERENCE;
    p.sweeps = 500;
    p.beta = 0.4f;
    p.tau_scale = 1.0f;
    p.exp_kind = ISING_EXP_EXACT;
    p.seed = 9;
    p.workers = 1;
    ising_run_report a{}, b{};
    REQUIRE(ising_run(m, &p, &a) == ISING_OK);
    REQUIRE(ising_run(m, &p, &b) == ISING_OK);
    CHECK(a.checksum == b.checksum);
    p.engine = ISING_ENGINE_BASIC;
    ising_run_report c{};
    REQUIRE(ising_run(m, &p, &c) == ISING_OK);
    CHECK(c.checksum == a.checksum);  // tier equivalence through the C API
    ising_model_free(m);
}

TEST_CASE("bench handle lifecycle and serializers") {
    ising_model* m = generated_model(16, 6, 3);
    const ising_engine engines[] = {ISING_ENGINE_REFERENCE, ISING_ENGINE_BASIC};
    const float betas[] = {0.3f, 0.8f};
    ising_bench_params p{};
    p.engines = engines;
    p.n_engines = 2;
    p.sweeps = 100;
    p.repetitions = 2;
    p.betas = betas;
    p.n_betas = 2;
    p.tau_scale = 1.0f;
    p.exp_kind = ISING_EXP_ENGINE_DEFAULT;
    p.seed = 4;
    p.workers = 1;
    ising_bench_report* rep = nullptr;
    REQUIRE(ising_bench_run(m, &p, &rep) == ISING_OK);
    char* csv = nullptr;
    char* js = nullptr;
    REQUIRE(ising_bench_report_csv(rep, &csv) == ISING_OK);
    REQUIRE(ising_bench_report_json(rep, &js) == ISING_OK);
    CHECK(std::string(csv).find("engine,spins,sweeps") == 0);
    CHECK(nlohmann::json::parse(js)["engines"].size() == 2);
    ising_string_free(csv);
    ising_string_free(js);
    ising_bench_report_free(rep);
    ising_model_free(m);
}

TEST_CASE("validate suite and exp scan through the C surface") {
    int failures = -1;
    char* js = nullptr;
    REQUIRE(ising_validate("rng", &failures, &js) == ISING_OK);
    CHECK(failures == 0);
    CHECK(nlohmann::json::parse(js)["suite"] == "rng");
    ising_string_free(js);
    CHECK(ising_validate("bogus", &failures, nullptr) == ISING_ERR_ARGUMENT);

    const char* csv_path = "/tmp/isingmc_capi_scan.csv";
    ising_exp_scan_summary summary{};
    REQUIRE(ising_exp_scan(0, -20.0, 20.0, 100000, csv_path, 64, &summary) == ISING_OK);
    CHECK(summary.max_rel <= 0.0205);
    CHECK(summary.min_rel >= -0.0395);
    std::FILE* f = std::fopen(csv_path, "r");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::strncmp(line, "x,relative_error", 16) == 0);
    std::fclose(f);
    std::remove(csv_path);

    CHECK(ising_exp_scan(2, 0.0, 1.0, 10, nullptr, 0, &summary) == ISING_ERR_ARGUMENT);
}
