#include "isingmc/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "isingmc/bench.hpp"
#include "isingmc/fastexp.hpp"
#include "isingmc/model.hpp"
#include "isingmc/oracle.hpp"
#include "isingmc/rng.hpp"
#include "isingmc/sweep.hpp"

#include <json.hpp>

namespace isingmc {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Suite {
    SuiteReport report;

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        report.checks.push_back({name, pass, detail});
        if (!pass) ++report.failures;
    }
};

SpinModel trajectory_model() {
    GenerateSpec spec;
    spec.layers = 16;
    spec.per_layer = 6;
    spec.seed = 3;
    return generate_model(spec);  // 96 spins, degrees 6..8
}

SpinModel enumerable_model_l4p3() {
    LayerSpec layer;
    layer.positions = 3;
    layer.h = {1.0f, -1.0f, 0.0f};
    layer.edges = {{0, 1, 1.0f}, {1, 2, -1.0f}, {0, 2, 1.0f}};
    return build_layered_model(layer, 4, 1.0f);  // 12 spins
}

SpinModel enumerable_ring_l12() {
    LayerSpec layer;
    layer.positions = 1;
    layer.h = {0.5f};
    return build_layered_model(layer, 12, 1.0f);  // 12-spin tau ring
}

void suite_rng(Suite& s) {
    for (uint32_t seed : {1u, 5489u, 20260809u}) {
        Mt19937 mine(seed);
        std::mt19937 ref(seed);
        bool ok = true;
        for (int i = 0; i < 100000 && ok; ++i) ok = mine.next_u32() == ref();
        s.check("scalar matches canonical stream, seed " + std::to_string(seed), ok);
    }
    for (uint32_t lanes : {4u, 128u}) {
        InterlacedMt inter = InterlacedMt::with_base_seed(7, lanes);
        std::vector<Mt19937> scalars;
        for (uint32_t k = 0; k < lanes; ++k) scalars.emplace_back(7 + k);
        std::vector<uint32_t> block(lanes);
        bool ok = true;
        const int blocks = lanes == 4 ? 10000 : 1000;
        for (int m = 0; m < blocks && ok; ++m) {
            inter.next_block(block);
            for (uint32_t k = 0; k < lanes && ok; ++k) ok = block[k] == scalars[k].next_u32();
        }
        s.check("interlaced K=" + std::to_string(lanes) + " equals interleaved scalar streams", ok);
    }
    s.check("u32_to_unit endpoints",
            u32_to_unit(0) == 0.0f && u32_to_unit(0x80000000u) == 0.5f &&
                u32_to_unit(0xFFFFFFFFu) < 1.0f && u32_to_unit(0xFFFFFFFFu) == 0x1.fffffep-1f);
}

void suite_exp(Suite& s) {
    const ErrorScanReport fast = error_scan(ExpVariant::fast, -80.0, 80.0, 1000000);
    s.check("fast exp error in [-0.0395, +0.0205] over [-80, 80]",
            fast.max_rel <= 0.0205 && fast.min_rel >= -0.0395,
            "min=" + std::to_string(fast.min_rel) + " max=" + std::to_string(fast.max_rel));
    const ErrorScanReport octave = error_scan(ExpVariant::fast, -kLn2, 0.0, 200000);
    s.check("fast exp mean error per octave within 0.002", std::abs(octave.mean_rel) <= 0.002,
            "mean=" + std::to_string(octave.mean_rel));
    const ErrorScanReport acc = error_scan(ExpVariant::accurate, -21.8, 22.1, 1000000);
    s.check("accurate exp error in (-0.011, 0.0055) over [-21.8, 22.1]",
            acc.max_rel <= 0.0055 && acc.min_rel >= -0.011,
            "min=" + std::to_string(acc.min_rel) + " max=" + std::to_string(acc.max_rel));
    bool mask_ok = exp_accurate(0.0f) == 1.0f && exp_accurate(5.0f) == 1.0f &&
                   exp_accurate(1e-6f) == 1.0f && exp_accurate(float(-31.6 * kLn2)) == 0.0f &&
                   exp_accurate(-100.0f) == 0.0f && exp_accurate(-1.0f) > 0.0f;
    s.check("accurate exp masking: 1.0 for x >= 0, 0.0 below -31.5 ln 2", mask_ok);
}

void suite_trajectory(Suite& s) {
    const SpinModel model = trajectory_model();
    for (ExpKind kind : {ExpKind::exact, ExpKind::fast}) {
        EngineRun a{EngineKind::reference, {0.4f, 1.0f, kind}, 11, 1, true};
        EngineRun b{EngineKind::basic, {0.4f, 1.0f, kind}, 11, 1, true};
        const TrajectoryResult r = trajectory_equivalence(model, a, b, 2000);
        s.check(std::string("reference == basic, exp ") + exp_kind_name(kind), r.equal);
    }
    {
        auto [vmodel, perm] = prepare_model_for_engine(model, EngineKind::vector4);
        EngineRun a{EngineKind::vector4, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
        EngineRun b = a;
        b.vector4_group_updates = false;
        const TrajectoryResult r = trajectory_equivalence(vmodel, a, b, 2000);
        s.check("vector4 lane-parallel updates on == off", r.equal);
    }
    {
        auto [cmodel, perm] = prepare_model_for_engine(model, EngineKind::coalesced);
        const uint32_t W = cmodel.layered->lane_width;
        EngineRun a{EngineKind::coalesced, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
        for (uint32_t workers : {2u, W}) {
            EngineRun b = a;
            b.workers = workers;
            const TrajectoryResult r = trajectory_equivalence(cmodel, a, b, 500);
            s.check("coalesced workers 1 == " + std::to_string(workers), r.equal);
        }
    }
    {
        EngineRun a{EngineKind::reference, {0.4f, 1.0f, ExpKind::exact}, 11, 1, true};
        EngineRun b{EngineKind::reference, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
        const TrajectoryResult r = trajectory_equivalence(model, a, b, 2000);
        s.check("exact vs fast exponential diverges (negative control)", !r.equal,
                r.equal ? "" : "first divergence sweep " + std::to_string(r.first_divergence_sweep) +
                              " spin " + std::to_string(r.first_divergence_spin));
    }
}

void suite_boltzmann(Suite& s) {
    {
        // 2-spin ferromagnet: exact mean cost is -tanh(beta).
        SpinModel two;
        two.n_spins = 2;
        two.h = {0.0f, 0.0f};
        two.adjacency.resize(2);
        two.adjacency[0].edges = {{1, 1.0f}};
        two.adjacency[1].edges = {{0, 1.0f}};
        ChainStatsConfig cfg;
        cfg.engine = EngineKind::reference;
        cfg.params = {1.0f, 1.0f, ExpKind::exact};
        cfg.sweeps = 100000;
        cfg.burn_in = 5000;
        cfg.replicates = 8;
        cfg.base_seed = 21;
        const ChainStatsReport r = chain_statistics_test(two, cfg);
        s.check("2-spin mean cost = -tanh(1) within 4 SE",
                r.pass && std::abs(r.exact_cost - (-std::tanh(1.0))) < 1e-9,
                "est=" + std::to_string(r.est_cost) + " z=" + std::to_string(r.z_cost));
    }
    const SpinModel l4p3 = enumerable_model_l4p3();
    for (EngineKind engine : {EngineKind::reference, EngineKind::basic, EngineKind::coalesced}) {
        ChainStatsConfig cfg;
        cfg.engine = engine;
        cfg.params = {0.5f, 1.0f, ExpKind::exact};
        cfg.sweeps = 100000;
        cfg.burn_in = 5000;
        cfg.replicates = 8;
        cfg.base_seed = 33;
        const ChainStatsReport r = chain_statistics_test(l4p3, cfg);
        s.check(std::string("12-spin L=4 P=3 sampling, ") + engine_name(engine), r.pass,
                "z_cost=" + std::to_string(r.z_cost) + " z_mag=" + std::to_string(r.z_magnetization));
    }
    {
        ChainStatsConfig cfg;
        cfg.engine = EngineKind::vector4;
        cfg.params = {0.5f, 1.0f, ExpKind::exact};
        cfg.sweeps = 100000;
        cfg.burn_in = 5000;
        cfg.replicates = 8;
        cfg.base_seed = 33;
        const ChainStatsReport r = chain_statistics_test(enumerable_ring_l12(), cfg);
        s.check("12-spin L=12 P=1 sampling, vector4", r.pass,
                "z_cost=" + std::to_string(r.z_cost) + " z_mag=" + std::to_string(r.z_magnetization));
    }
}

}  // namespace

SuiteReport run_validation_suite(const std::string& suite) {
    Suite s;
    s.report.suite = suite;
    if (suite == "rng") {
        suite_rng(s);
    } else if (suite == "exp") {
        suite_exp(s);
    } else if (suite == "trajectory") {
        suite_trajectory(s);
    } else if (suite == "boltzmann") {
        suite_boltzmann(s);
    } else if (suite == "all") {
        suite_rng(s);
        suite_exp(s);
        suite_trajectory(s);
        suite_boltzmann(s);
    } else {
        throw Error("unknown validation suite '" + suite +
                    "' (expected rng|exp|trajectory|boltzmann|all)");
    }
    return s.report;
}

std::string suite_report_json(const SuiteReport& report) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["failures"] = report.failures;
    j["checks"] = nlohmann::json::array();
    for (const CheckResult& c : report.checks) {
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    return j.dump(2);
}

}  // namespace isingmc
