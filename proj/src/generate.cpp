#include "isingmc/bench.hpp"
#include "isingmc/rng.hpp"

#include <algorithm>
#include <set>

namespace isingmc {

namespace {

// Unbiased-enough deterministic mapping of a draw onto [0, m).
uint32_t draw_below(Mt19937& rng, uint32_t m) {
    return uint32_t((uint64_t(rng.next_u32()) * m) >> 32);
}

float draw_unit_open(Mt19937& rng) { return u32_to_unit(rng.next_u32()); }

}  // namespace

SpinModel generate_model(const GenerateSpec& spec) {
    if (spec.layers < 4) throw Error("generate_model: need at least 4 layers");
    if (spec.per_layer < 1) throw Error("generate_model: need at least 1 position");
    Mt19937 rng(spec.seed);

    const uint32_t P = spec.per_layer;
    LayerSpec layer;
    layer.positions = P;
    layer.h.resize(P);

    if (P == 1) {
        if (!spec.allow_tau_ring) {
            throw Error("generate_model: per_layer == 1 builds a bare tau ring; "
                        "pass allow_tau_ring to permit it");
        }
    } else {
        if (spec.space_degree_min > spec.space_degree_max) {
            throw Error("generate_model: degree_min > degree_max");
        }
        if (spec.space_degree_min > P - 1) {
            throw Error("generate_model: space degree " + std::to_string(spec.space_degree_min) +
                        " unattainable with " + std::to_string(P) + " positions");
        }

        std::vector<uint32_t> degree(P, 0);
        std::set<std::pair<uint32_t, uint32_t>> present;
        const auto add_edge = [&](uint32_t a, uint32_t b) {
            const auto key = std::minmax(a, b);
            if (a == b || !present.insert(key).second) return false;
            ++degree[a];
            ++degree[b];
            layer.edges.push_back({key.first, key.second, 0.0f});
            return true;
        };

        // Circulant base up to the requested minimum degree.
        uint32_t base_degree = 0;
        for (uint32_t o = 1; o <= P / 2 && base_degree < spec.space_degree_min; ++o) {
            for (uint32_t p = 0; p < P; ++p) add_edge(p, (p + o) % P);
            base_degree += (2 * o == P) ? 1 : 2;
        }
        if (base_degree < spec.space_degree_min) {
            throw Error("generate_model: cannot reach space degree " +
                        std::to_string(spec.space_degree_min) + " with " + std::to_string(P) +
                        " positions");
        }
        // Seeded extras spread degrees across the band.
        if (spec.space_degree_max > base_degree) {
            uint32_t budget = P / 2;
            uint32_t attempts = 8 * P + 64;
            while (budget > 0 && attempts-- > 0) {
                const uint32_t a = draw_below(rng, P);
                const uint32_t b = draw_below(rng, P);
                if (degree[a] >= spec.space_degree_max || degree[b] >= spec.space_degree_max) continue;
                if (add_edge(a, b)) --budget;
            }
        }
    }

    for (LayerEdge& e : layer.edges) {
        e.coupling = spec.couplings == CouplingDist::pm1
                         ? ((rng.next_u32() >> 31) ? -1.0f : 1.0f)
                         : 2.0f * draw_unit_open(rng) - 1.0f;
    }
    for (float& h : layer.h) {
        h = spec.couplings == CouplingDist::pm1 ? float(int(draw_below(rng, 3)) - 1)
                                                : 2.0f * draw_unit_open(rng) - 1.0f;
    }

    return build_layered_model(layer, spec.layers, spec.j_tau);
}

}  // namespace isingmc
