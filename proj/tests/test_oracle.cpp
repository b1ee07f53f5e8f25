#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "isingmc/bench.hpp"
#include "isingmc/model.hpp"
#include "isingmc/oracle.hpp"

using namespace isingmc;

namespace {

SpinModel two_spin_ferromagnet() {
    SpinModel m;
    m.n_spins = 2;
    m.h = {0.0f, 0.0f};
    m.adjacency.resize(2);
    m.adjacency[0].edges = {{1, 1.0f}};
    m.adjacency[1].edges = {{0, 1.0f}};
    return m;
}

SpinModel one_spin_field() {
    SpinModel m;
    m.n_spins = 1;
    m.h = {1.0f};
    m.adjacency.resize(1);
    return m;
}

SpinModel layered_12_l4p3() {
    LayerSpec layer;
    layer.positions = 3;
    layer.h = {1.0f, -1.0f, 0.0f};
    layer.edges = {{0, 1, 1.0f}, {1, 2, -1.0f}, {0, 2, 1.0f}};
    return build_layered_model(layer, 4, 1.0f);
}

}  // namespace

TEST_CASE("two-spin ferromagnet mean cost is -tanh(beta)") {
    const ExactDistribution d = enumerate_boltzmann(two_spin_ferromagnet(), 1.0);
    CHECK(d.mean_cost == doctest::Approx(-std::tanh(1.0)).epsilon(1e-12));
    CHECK(d.mean_magnetization == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("beta = 0 gives the uniform distribution") {
    const ExactDistribution d = enumerate_boltzmann(two_spin_ferromagnet(), 0.0);
    for (double p : d.probabilities) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(d.mean_magnetization == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d.mean_cost == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("single spin in a field: P(+1) = e^beta / (e^beta + e^-beta)") {
    const ExactDistribution d = enumerate_boltzmann(one_spin_field(), 1.0);
    // state bit set <=> spin +1; cost(+1) = -1.
    CHECK(d.probabilities[1] ==
          doctest::Approx(std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0))).epsilon(1e-12));
    CHECK(d.probabilities[1] == doctest::Approx(0.880797).epsilon(1e-5));
}

TEST_CASE("probabilities normalize to 1 within 2^-40") {
    const ExactDistribution d = enumerate_boltzmann(layered_12_l4p3(), 0.7);
    long double sum = 0.0L;
    for (double p : d.probabilities) sum += p;
    CHECK(std::abs(double(sum - 1.0L)) <= std::ldexp(1.0, -40));
}

TEST_CASE("large beta uses the shifted accumulation (no underflow)") {
    const ExactDistribution cold = enumerate_boltzmann(layered_12_l4p3(), 50.0);
    CHECK(std::isfinite(cold.mean_cost));
    CHECK(std::isfinite(cold.log_partition));
    const ExactDistribution flat = enumerate_boltzmann(layered_12_l4p3(), 0.0);
    CHECK(cold.mean_cost < flat.mean_cost);  // approaches the ground energy
    CHECK(cold.probabilities.size() == 4096);
}

TEST_CASE("enumeration cap") {
    SpinModel m;
    m.n_spins = 25;
    m.h.assign(25, 0.0f);
    m.adjacency.resize(25);
    CHECK_THROWS(enumerate_boltzmann(m, 1.0));
}

TEST_CASE("mean cost is invariant under spin permutation") {
    const SpinModel m = layered_12_l4p3();
    const SpinModel cm = apply_permutation(m, coalesce_permutation(m, 2));
    const ExactDistribution a = enumerate_boltzmann(m, 0.8);
    const ExactDistribution b = enumerate_boltzmann(cm, 0.8);
    CHECK(a.mean_cost == doctest::Approx(b.mean_cost).epsilon(1e-12));
    CHECK(a.mean_magnetization == doctest::Approx(b.mean_magnetization).epsilon(1e-12));
}

TEST_CASE("chain statistics: 2-spin chain hits -tanh(1) within 4 SE") {
    ChainStatsConfig cfg;
    cfg.engine = EngineKind::reference;
    cfg.params = {1.0f, 1.0f, ExpKind::exact};
    cfg.sweeps = 200000;
    cfg.burn_in = 10000;
    cfg.replicates = 8;
    cfg.base_seed = 41;
    const ChainStatsReport r = chain_statistics_test(two_spin_ferromagnet(), cfg);
    CHECK(r.exact_cost == doctest::Approx(-std::tanh(1.0)).epsilon(1e-9));
    CHECK(r.pass);
}

TEST_CASE("chain statistics: beta = 0 matches the uniform mean over replicates") {
    ChainStatsConfig cfg;
    cfg.engine = EngineKind::basic;
    cfg.params = {0.0f, 1.0f, ExpKind::exact};
    cfg.sweeps = 2000;
    cfg.burn_in = 100;
    cfg.replicates = 16;
    cfg.base_seed = 55;
    const ChainStatsReport r = chain_statistics_test(layered_12_l4p3(), cfg);
    CHECK(r.exact_cost == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.pass);
}

TEST_CASE("chain statistics: 12-spin layered model at beta 0.5") {
    ChainStatsConfig cfg;
    cfg.engine = EngineKind::basic;
    cfg.params = {0.5f, 1.0f, ExpKind::exact};
    cfg.sweeps = 100000;
    cfg.burn_in = 10000;
    cfg.replicates = 8;
    cfg.base_seed = 77;
    const ChainStatsReport r = chain_statistics_test(layered_12_l4p3(), cfg);
    CHECK(r.pass);
}

TEST_CASE("fast exponential bias stays under 5% of the exact mean cost") {
    ChainStatsConfig cfg;
    cfg.engine = EngineKind::basic;
    cfg.params = {0.5f, 1.0f, ExpKind::fast};
    cfg.sweeps = 150000;
    cfg.burn_in = 10000;
    cfg.replicates = 8;
    cfg.base_seed = 91;
    const ChainStatsReport r = chain_statistics_test(layered_12_l4p3(), cfg);
    CHECK(std::abs(r.est_cost - r.exact_cost) <= 0.05 * std::abs(r.exact_cost));
}

TEST_CASE("trajectory equivalence reports the first divergence") {
    GenerateSpec spec;
    spec.layers = 16;
    spec.per_layer = 6;
    spec.seed = 3;
    const SpinModel m = generate_model(spec);
    EngineRun a{EngineKind::reference, {0.4f, 1.0f, ExpKind::exact}, 11, 1, true};
    EngineRun b{EngineKind::reference, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
    const TrajectoryResult r = trajectory_equivalence(m, a, b, 5000);
    CHECK(!r.equal);
    CHECK(r.first_divergence_spin < m.n_spins);

    // Same configuration twice is trivially equal.
    const TrajectoryResult same = trajectory_equivalence(m, a, a, 200);
    CHECK(same.equal);
}

TEST_CASE("incompatible configurations are rejected") {
    GenerateSpec spec;
    spec.layers = 16;
    spec.per_layer = 6;
    spec.seed = 3;
    const SpinModel m = generate_model(spec);
    EngineRun scalar{EngineKind::basic, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
    EngineRun vec{EngineKind::vector4, {0.4f, 1.0f, ExpKind::fast}, 11, 1, true};
    CHECK_THROWS(trajectory_equivalence(m, scalar, vec, 10));  // vector4 needs its ordering
}
