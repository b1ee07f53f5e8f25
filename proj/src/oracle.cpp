#include "isingmc/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <tuple>

namespace isingmc {

namespace {

// Independent chains need well-separated base seeds: lane seeds are
// base_seed + lane, so consecutive replicate seeds would share streams.
uint32_t replicate_seed(uint32_t base, uint32_t replicate) {
    uint64_t z = (uint64_t(base) << 32) ^ (uint64_t(replicate) + 0x9E3779B97F4A7C15ull);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return uint32_t(z);
}

struct GrayWalk {
    // Dense double-precision adjacency for O(degree) cost deltas.
    std::vector<double> h;
    std::vector<std::vector<std::pair<uint32_t, double>>> edges;
    std::vector<int8_t> spins;
    double cost;

    explicit GrayWalk(const SpinModel& model) {
        const uint32_t n = model.n_spins;
        h.resize(n);
        edges.resize(n);
        for (uint32_t i = 0; i < n; ++i) {
            h[i] = double(model.h[i]);
            for (const EdgeRecord& e : model.adjacency[i].edges) {
                edges[i].push_back({e.target_spin, double(e.coupling)});
            }
        }
        spins.assign(n, -1);
        cost = 0.0;
        for (uint32_t i = 0; i < n; ++i) {
            cost -= h[i] * spins[i];
            for (const auto& [j, J] : edges[i]) {
                if (j > i) cost -= J * spins[i] * spins[j];
            }
        }
    }

    // Flips the spin and returns the new total cost.
    double flip(uint32_t b) {
        double field = h[b];
        for (const auto& [j, J] : edges[b]) field += J * spins[j];
        cost += 2.0 * spins[b] * field;
        spins[b] = int8_t(-spins[b]);
        return cost;
    }
};

}  // namespace

ExactDistribution enumerate_boltzmann(const SpinModel& model, double beta) {
    if (model.n_spins > 24) {
        throw Error("enumerate_boltzmann: " + std::to_string(model.n_spins) +
                    " spins exceed the 24-spin enumeration cap");
    }
    const uint32_t n = model.n_spins;
    const uint64_t n_states = uint64_t(1) << n;

    // Pass 1: minimum cost, so the weights can be shifted out of underflow.
    double min_cost;
    {
        GrayWalk walk(model);
        min_cost = walk.cost;
        for (uint64_t idx = 1; idx < n_states; ++idx) {
            const double c = walk.flip(uint32_t(std::countr_zero(idx)));
            if (c < min_cost) min_cost = c;
        }
    }

    ExactDistribution dist;
    dist.beta = beta;
    dist.n_spins = n;
    dist.probabilities.resize(n_states);

    long double z = 0.0L;
    long double cost_acc = 0.0L;
    long double mag_acc = 0.0L;
    GrayWalk walk(model);
    double cost = walk.cost;
    uint64_t gray = 0;
    for (uint64_t idx = 0;; ++idx) {
        const long double w = expl(-(long double)(beta) * (long double)(cost - min_cost));
        z += w;
        cost_acc += w * (long double)cost;
        mag_acc += w * (long double)(2.0 * double(std::popcount(gray)) - double(n));
        dist.probabilities[gray] = double(w);
        if (idx + 1 == n_states) break;
        cost = walk.flip(uint32_t(std::countr_zero(idx + 1)));
        gray = (idx + 1) ^ ((idx + 1) >> 1);
    }
    for (double& p : dist.probabilities) p = double((long double)p / z);
    dist.mean_cost = double(cost_acc / z);
    dist.mean_magnetization = double(mag_acc / z) / double(n);
    dist.log_partition = double(logl(z)) - beta * min_cost;
    return dist;
}

ChainStatsReport chain_statistics_test(const SpinModel& model, const ChainStatsConfig& cfg) {
    if (cfg.replicates < 2) throw Error("chain_statistics_test: need at least 2 replicates");
    const ExactDistribution exact = enumerate_boltzmann(model, double(cfg.params.beta));
    auto [emodel, perm] = prepare_model_for_engine(model, cfg.engine);

    const uint32_t n = emodel.n_spins;
    std::vector<double> rep_cost(cfg.replicates);
    std::vector<double> rep_mag(cfg.replicates);
    for (uint32_t r = 0; r < cfg.replicates; ++r) {
        EngineConfig ec;
        ec.engine = cfg.engine;
        ec.params = cfg.params;
        ec.seed = replicate_seed(cfg.base_seed, r);
        ec.workers = cfg.workers;
        SweepState st = init_state(emodel, ec);
        run_sweeps(st, emodel, cfg.burn_in);

        // cost = -(sum_i h_i s_i + sum_i s_i (h_space_i + h_tau_i)) / 2,
        // using the incrementally maintained fields.
        double cost_sum = 0.0;
        double mag_sum = 0.0;
        for (uint64_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
            run_sweeps(st, emodel, 1);
            double hs_dot = 0.0;
            double h_dot = 0.0;
            double mag = 0.0;
            for (uint32_t i = 0; i < n; ++i) {
                const double s = double(st.spins[i]);
                hs_dot += s * (double(st.h_eff_space[i]) + double(st.h_eff_tau[i]));
                h_dot += s * double(emodel.h[i]);
                mag += s;
            }
            cost_sum += -(hs_dot + h_dot) / 2.0;
            mag_sum += mag / double(n);
        }
        rep_cost[r] = cost_sum / double(cfg.sweeps);
        rep_mag[r] = mag_sum / double(cfg.sweeps);
    }

    const auto mean_se = [&](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= double(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= double(xs.size() - 1);
        return std::pair<double, double>{mean, std::sqrt(var / double(xs.size()))};
    };

    ChainStatsReport rep;
    rep.exact_cost = exact.mean_cost;
    rep.exact_magnetization = exact.mean_magnetization;
    std::tie(rep.est_cost, rep.se_cost) = mean_se(rep_cost);
    std::tie(rep.est_magnetization, rep.se_magnetization) = mean_se(rep_mag);
    const auto z_score = [](double est, double exact_v, double se) {
        const double diff = std::abs(est - exact_v);
        if (diff == 0.0) return 0.0;
        return se > 0.0 ? diff / se : std::numeric_limits<double>::infinity();
    };
    rep.z_cost = z_score(rep.est_cost, rep.exact_cost, rep.se_cost);
    rep.z_magnetization = z_score(rep.est_magnetization, rep.exact_magnetization, rep.se_magnetization);
    rep.pass = rep.z_cost <= cfg.z_threshold && rep.z_magnetization <= cfg.z_threshold;
    return rep;
}

TrajectoryResult trajectory_equivalence(const SpinModel& model, const EngineRun& a,
                                        const EngineRun& b, uint64_t sweeps) {
    const std::vector<int8_t> start = initial_spins(model.n_spins, a.seed);
    const auto make = [&](const EngineRun& run) {
        EngineConfig cfg;
        cfg.engine = run.engine;
        cfg.params = run.params;
        cfg.seed = run.seed;
        cfg.workers = run.workers;
        cfg.vector4_group_updates = run.vector4_group_updates;
        return init_state(model, cfg, start);
    };
    SweepState sa = make(a);
    SweepState sb = make(b);

    TrajectoryResult result;
    for (uint64_t sweep = 0; sweep < sweeps; ++sweep) {
        run_sweeps(sa, model, 1);
        run_sweeps(sb, model, 1);
        if (std::memcmp(sa.spins.data(), sb.spins.data(), sa.spins.size() * sizeof(float)) != 0) {
            for (uint32_t i = 0; i < model.n_spins; ++i) {
                if (std::bit_cast<uint32_t>(sa.spins[i]) != std::bit_cast<uint32_t>(sb.spins[i])) {
                    result.equal = false;
                    result.first_divergence_sweep = sweep;
                    result.first_divergence_spin = i;
                    return result;
                }
            }
        }
    }
    return result;
}

}  // namespace isingmc
