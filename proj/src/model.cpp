#include "isingmc/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

namespace isingmc {

namespace {

std::string spin_str(uint32_t i) { return std::to_string(i); }

// (layer, position) helpers for identity-ordered layered models.
struct LayerPos {
    uint32_t layer;
    uint32_t pos;
};

LayerPos layer_pos(const LayeredMeta& meta, uint32_t index) {
    return {index / meta.per_layer, index % meta.per_layer};
}

bool is_tau_pair(const LayeredMeta& meta, uint32_t i, uint32_t j) {
    const LayerPos a = layer_pos(meta, i);
    const LayerPos b = layer_pos(meta, j);
    if (a.pos != b.pos) return false;
    const uint32_t up = (a.layer + 1) % meta.layers;
    const uint32_t down = (a.layer + meta.layers - 1) % meta.layers;
    return b.layer == up || b.layer == down;
}

}  // namespace

const char* ordering_name(Ordering o) {
    switch (o) {
        case Ordering::identity: return "identity";
        case Ordering::vector4: return "vector4";
        case Ordering::coalesce: return "coalesce";
    }
    return "?";
}

uint64_t SpinModel::edge_count() const {
    uint64_t half_edges = 0;
    for (const SpinEdgeList& list : adjacency) half_edges += list.edges.size();
    return half_edges / 2;
}

SpinModel build_layered_model(const LayerSpec& layer, uint32_t n_layers, float j_tau) {
    if (n_layers < 4) throw Error("build_layered_model: need at least 4 layers");
    if (layer.positions == 0) throw Error("build_layered_model: empty layer");
    if (layer.h.size() != layer.positions) {
        throw Error("build_layered_model: layer field count != positions");
    }

    // Per-position space adjacency, validated and sorted into canonical order.
    std::vector<std::vector<EdgeRecord>> space(layer.positions);
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (const LayerEdge& e : layer.edges) {
        if (e.p >= layer.positions || e.q >= layer.positions) {
            throw Error("build_layered_model: edge endpoint out of range");
        }
        if (e.p == e.q) throw Error("build_layered_model: self edge at position " + spin_str(e.p));
        const auto key = std::minmax(e.p, e.q);
        if (!seen.insert(key).second) {
            throw Error("build_layered_model: duplicate or asymmetric edge " + spin_str(e.p) +
                        "-" + spin_str(e.q));
        }
        space[e.p].push_back({e.q, e.coupling});
        space[e.q].push_back({e.p, e.coupling});
    }
    for (auto& list : space) {
        std::sort(list.begin(), list.end(),
                  [](const EdgeRecord& a, const EdgeRecord& b) { return a.target_spin < b.target_spin; });
    }

    const uint32_t P = layer.positions;
    const uint32_t L = n_layers;
    SpinModel model;
    model.n_spins = L * P;
    model.h.resize(model.n_spins);
    model.adjacency.resize(model.n_spins);
    for (uint32_t l = 0; l < L; ++l) {
        const uint32_t base = l * P;
        const uint32_t up = ((l + 1) % L) * P;
        const uint32_t down = ((l + L - 1) % L) * P;
        for (uint32_t p = 0; p < P; ++p) {
            model.h[base + p] = layer.h[p];
            SpinEdgeList& list = model.adjacency[base + p];
            list.edges.reserve(space[p].size() + 2);
            for (const EdgeRecord& e : space[p]) {
                list.edges.push_back({base + e.target_spin, e.coupling});
            }
            list.edges.push_back({up + p, j_tau});
            list.edges.push_back({down + p, j_tau});
            list.tau_count = 2;
        }
    }
    model.layered = LayeredMeta{L, P, Ordering::identity, 0};
    return model;
}

namespace {

template <typename T>
double total_cost_impl(const SpinModel& model, std::span<const T> spins) {
    if (spins.size() != model.n_spins) throw Error("total_cost: spin count mismatch");
    for (size_t i = 0; i < spins.size(); ++i) {
        if (spins[i] != T(1) && spins[i] != T(-1)) {
            throw Error("total_cost: spin " + spin_str(uint32_t(i)) + " not +/-1");
        }
    }
    double cost = 0.0;
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        cost -= double(model.h[i]) * double(spins[i]);
        for (const EdgeRecord& e : model.adjacency[i].edges) {
            if (e.target_spin > i) {
                cost -= double(e.coupling) * double(spins[i]) * double(spins[e.target_spin]);
            }
        }
    }
    return cost;
}

}  // namespace

double total_cost(const SpinModel& model, std::span<const int8_t> spins) {
    return total_cost_impl(model, spins);
}

double total_cost(const SpinModel& model, std::span<const float> spins) {
    return total_cost_impl(model, spins);
}

SpinModel reorder_edges_tau_last(const SpinModel& model) {
    if (!model.is_layered()) throw Error("reorder_edges_tau_last: model is not layered");
    const LayeredMeta& meta = *model.layered;
    if (meta.ordering != Ordering::identity) {
        throw Error("reorder_edges_tau_last: model must be identity-ordered");
    }
    SpinModel out = model;
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        std::vector<EdgeRecord> space;
        std::vector<EdgeRecord> tau;
        for (const EdgeRecord& e : model.adjacency[i].edges) {
            (is_tau_pair(meta, i, e.target_spin) ? tau : space).push_back(e);
        }
        if (tau.size() != 2) {
            throw Error("reorder_edges_tau_last: spin " + spin_str(i) + " has " +
                        std::to_string(tau.size()) + " tau edges, expected 2");
        }
        SpinEdgeList& list = out.adjacency[i];
        list.edges = std::move(space);
        list.edges.insert(list.edges.end(), tau.begin(), tau.end());
        list.tau_count = 2;
    }
    return out;
}

SpinPermutation vector4_permutation(const SpinModel& model) {
    if (!model.is_layered()) throw Error("vector4_permutation: model is not layered");
    const LayeredMeta& meta = *model.layered;
    if (meta.ordering != Ordering::identity) {
        throw Error("vector4_permutation: model must be identity-ordered");
    }
    if (meta.layers % 4 != 0) {
        throw Error("vector4_permutation: layer count " + std::to_string(meta.layers) +
                    " is not a multiple of 4");
    }
    const uint32_t section = meta.layers / 4;
    const uint32_t P = meta.per_layer;
    SpinPermutation perm;
    perm.kind = Ordering::vector4;
    perm.forward.resize(model.n_spins);
    perm.inverse.resize(model.n_spins);
    for (uint32_t l = 0; l < meta.layers; ++l) {
        for (uint32_t p = 0; p < P; ++p) {
            const uint32_t old_index = l * P + p;
            const uint32_t new_index = 4 * ((l % section) * P + p) + l / section;
            perm.forward[old_index] = new_index;
            perm.inverse[new_index] = old_index;
        }
    }
    return perm;
}

SpinPermutation coalesce_permutation(const SpinModel& model, uint32_t lane_width) {
    if (!model.is_layered()) throw Error("coalesce_permutation: model is not layered");
    const LayeredMeta& meta = *model.layered;
    if (meta.ordering != Ordering::identity) {
        throw Error("coalesce_permutation: model must be identity-ordered");
    }
    if (lane_width == 0 || meta.layers != 2 * lane_width) {
        throw Error("coalesce_permutation: need layers == 2*lane_width, got L=" +
                    std::to_string(meta.layers) + " W=" + std::to_string(lane_width));
    }
    const uint32_t P = meta.per_layer;
    SpinPermutation perm;
    perm.kind = Ordering::coalesce;
    perm.lane_width = lane_width;
    perm.forward.resize(model.n_spins);
    perm.inverse.resize(model.n_spins);
    for (uint32_t l = 0; l < meta.layers; ++l) {
        for (uint32_t p = 0; p < P; ++p) {
            const uint32_t old_index = l * P + p;
            const uint32_t new_index = lane_width * ((l % 2) * P + p) + l / 2;
            perm.forward[old_index] = new_index;
            perm.inverse[new_index] = old_index;
        }
    }
    return perm;
}

SpinModel apply_permutation(const SpinModel& model, const SpinPermutation& perm) {
    if (perm.forward.size() != model.n_spins || perm.inverse.size() != model.n_spins) {
        throw Error("apply_permutation: permutation size mismatch");
    }
    std::vector<uint8_t> hit(model.n_spins, 0);
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        const uint32_t f = perm.forward[i];
        if (f >= model.n_spins || hit[f]) throw Error("apply_permutation: forward is not a bijection");
        hit[f] = 1;
        if (perm.inverse[f] != i) throw Error("apply_permutation: inverse does not invert forward");
    }

    SpinModel out;
    out.n_spins = model.n_spins;
    out.h.resize(model.n_spins);
    out.adjacency.resize(model.n_spins);
    for (uint32_t new_index = 0; new_index < model.n_spins; ++new_index) {
        const uint32_t old_index = perm.inverse[new_index];
        out.h[new_index] = model.h[old_index];
        SpinEdgeList list = model.adjacency[old_index];
        for (EdgeRecord& e : list.edges) e.target_spin = perm.forward[e.target_spin];
        out.adjacency[new_index] = std::move(list);
    }
    if (model.layered) {
        LayeredMeta meta = *model.layered;
        meta.ordering = perm.kind;
        meta.lane_width = perm.kind == Ordering::coalesce ? perm.lane_width : 0;
        out.layered = meta;
    }
    return out;
}

void validate_model(const SpinModel& model) {
    if (model.h.size() != model.n_spins || model.adjacency.size() != model.n_spins) {
        throw Error("validate_model: field/adjacency size mismatch");
    }
    // Symmetry with matching coupling bits and space/tau classification.
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        const SpinEdgeList& list = model.adjacency[i];
        if (list.tau_count > list.edges.size()) {
            throw Error("validate_model: spin " + spin_str(i) + " tau_count exceeds degree");
        }
        for (size_t k = 0; k < list.edges.size(); ++k) {
            const EdgeRecord& e = list.edges[k];
            if (e.target_spin >= model.n_spins) {
                throw Error("validate_model: spin " + spin_str(i) + " edge target out of range");
            }
            if (e.target_spin == i) throw Error("validate_model: self edge at spin " + spin_str(i));
            const bool tau = k >= list.edges.size() - list.tau_count;
            const SpinEdgeList& peer = model.adjacency[e.target_spin];
            bool found = false;
            for (size_t m = 0; m < peer.edges.size(); ++m) {
                const EdgeRecord& b = peer.edges[m];
                const bool peer_tau = m >= peer.edges.size() - peer.tau_count;
                if (b.target_spin == i && peer_tau == tau &&
                    std::bit_cast<uint32_t>(b.coupling) == std::bit_cast<uint32_t>(e.coupling)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw Error("validate_model: edge " + spin_str(i) + "-" + spin_str(e.target_spin) +
                            " has no matching reverse record");
            }
        }
    }
    if (!model.layered) return;

    const LayeredMeta& meta = *model.layered;
    if (uint64_t(meta.layers) * meta.per_layer != model.n_spins) {
        throw Error("validate_model: layers * per_layer != n_spins");
    }
    // Map back to identity order to check the layered structure.
    std::vector<uint32_t> to_old(model.n_spins);
    for (uint32_t old_index = 0; old_index < model.n_spins; ++old_index) {
        uint32_t new_index = old_index;
        const uint32_t l = old_index / meta.per_layer;
        const uint32_t p = old_index % meta.per_layer;
        if (meta.ordering == Ordering::vector4) {
            const uint32_t section = meta.layers / 4;
            new_index = 4 * ((l % section) * meta.per_layer + p) + l / section;
        } else if (meta.ordering == Ordering::coalesce) {
            new_index = meta.lane_width * ((l % 2) * meta.per_layer + p) + l / 2;
        }
        to_old[new_index] = old_index;
    }
    std::vector<uint32_t> old_of(model.n_spins);
    std::vector<uint32_t> new_of(model.n_spins);
    for (uint32_t n = 0; n < model.n_spins; ++n) {
        old_of[n] = to_old[n];
        new_of[to_old[n]] = n;
    }
    for (uint32_t n = 0; n < model.n_spins; ++n) {
        const SpinEdgeList& list = model.adjacency[n];
        if (list.tau_count != 2) {
            throw Error("validate_model: layered spin " + spin_str(n) + " has tau_count " +
                        std::to_string(list.tau_count));
        }
        const uint32_t old_index = old_of[n];
        const LayerPos lp = layer_pos(meta, old_index);
        const uint32_t up = new_of[((lp.layer + 1) % meta.layers) * meta.per_layer + lp.pos];
        const uint32_t down =
            new_of[((lp.layer + meta.layers - 1) % meta.layers) * meta.per_layer + lp.pos];
        const auto taus = list.tau_edges();
        if (!((taus[0].target_spin == up && taus[1].target_spin == down) ||
              (taus[0].target_spin == down && taus[1].target_spin == up))) {
            throw Error("validate_model: spin " + spin_str(n) + " tau edges do not link adjacent layers");
        }
        for (const EdgeRecord& e : list.space_edges()) {
            if (layer_pos(meta, old_of[e.target_spin]).layer != lp.layer) {
                throw Error("validate_model: space edge leaves layer at spin " + spin_str(n));
            }
        }
    }
    // All layers identical: compare each spin's edge list against layer 0.
    for (uint32_t old_index = 0; old_index < model.n_spins; ++old_index) {
        const LayerPos lp = layer_pos(meta, old_index);
        if (lp.layer == 0) continue;
        const SpinEdgeList& a = model.adjacency[new_of[old_index]];
        const SpinEdgeList& b = model.adjacency[new_of[lp.pos]];
        if (a.edges.size() != b.edges.size()) {
            throw Error("validate_model: layers differ in degree at position " + spin_str(lp.pos));
        }
        for (size_t k = 0; k + a.tau_count < a.edges.size(); ++k) {
            const uint32_t pa = layer_pos(meta, old_of[a.edges[k].target_spin]).pos;
            const uint32_t pb = layer_pos(meta, old_of[b.edges[k].target_spin]).pos;
            if (pa != pb || std::bit_cast<uint32_t>(a.edges[k].coupling) !=
                                std::bit_cast<uint32_t>(b.edges[k].coupling)) {
                throw Error("validate_model: layers are not identical at position " + spin_str(lp.pos));
            }
        }
    }
}

void validate_vector4_layout(const SpinModel& model) {
    if (!model.layered || model.layered->ordering != Ordering::vector4) {
        throw Error("validate_vector4_layout: model is not vector4-ordered");
    }
    const LayeredMeta& meta = *model.layered;
    const uint32_t section = meta.layers / 4;
    if (section < 3) {
        throw Error("validate_vector4_layout: need L/4 >= 3 so quadruplets share no neighbours");
    }
    const uint32_t n = model.n_spins;
    for (uint32_t q = 0; q < n / 4; ++q) {
        // No member adjacent to another member; no two members share a neighbour.
        std::set<uint32_t> neighbours;
        for (uint32_t k = 0; k < 4; ++k) {
            for (const EdgeRecord& e : model.adjacency[4 * q + k].edges) {
                if (e.target_spin / 4 == q) {
                    throw Error("validate_vector4_layout: quadruplet " + spin_str(q) +
                                " has an internal edge");
                }
                if (!neighbours.insert(e.target_spin).second) {
                    throw Error("validate_vector4_layout: quadruplet " + spin_str(q) +
                                " members share neighbour " + spin_str(e.target_spin));
                }
            }
        }
        // Lane alignment: same degrees, lane k's j-th edge targets lane k of
        // one quadruplet (tau rows 0 and section-1 excepted, they wrap).
        const SpinEdgeList& lane0 = model.adjacency[4 * q];
        const uint32_t row = q / meta.per_layer;
        const bool interior = row > 0 && row + 1 < section;
        for (uint32_t k = 1; k < 4; ++k) {
            const SpinEdgeList& lane = model.adjacency[4 * q + k];
            if (lane.edges.size() != lane0.edges.size() || lane.tau_count != lane0.tau_count) {
                throw Error("validate_vector4_layout: quadruplet " + spin_str(q) +
                            " lanes differ in degree");
            }
            const size_t checked =
                interior ? lane.edges.size() : lane.edges.size() - lane.tau_count;
            for (size_t j = 0; j < checked; ++j) {
                if (lane.edges[j].target_spin != lane0.edges[j].target_spin + k ||
                    std::bit_cast<uint32_t>(lane.edges[j].coupling) !=
                        std::bit_cast<uint32_t>(lane0.edges[j].coupling)) {
                    throw Error("validate_vector4_layout: quadruplet " + spin_str(q) +
                                " lane " + spin_str(k) + " edge " + std::to_string(j) +
                                " is not aligned");
                }
            }
        }
        for (size_t j = 0; j + lane0.tau_count < lane0.edges.size(); ++j) {
            if (lane0.edges[j].target_spin % 4 != 0) {
                throw Error("validate_vector4_layout: lane-0 space edge does not hit lane 0");
            }
        }
        if (interior) {
            for (const EdgeRecord& e : lane0.tau_edges()) {
                if (e.target_spin % 4 != 0) {
                    throw Error("validate_vector4_layout: interior tau edge does not hit lane 0");
                }
            }
        }
    }
}

bool models_equal(const SpinModel& a, const SpinModel& b) {
    if (a.n_spins != b.n_spins) return false;
    if (a.layered.has_value() != b.layered.has_value()) return false;
    if (a.layered) {
        if (a.layered->layers != b.layered->layers || a.layered->per_layer != b.layered->per_layer ||
            a.layered->ordering != b.layered->ordering ||
            a.layered->lane_width != b.layered->lane_width) {
            return false;
        }
    }
    for (uint32_t i = 0; i < a.n_spins; ++i) {
        if (std::bit_cast<uint32_t>(a.h[i]) != std::bit_cast<uint32_t>(b.h[i])) return false;
        const SpinEdgeList& la = a.adjacency[i];
        const SpinEdgeList& lb = b.adjacency[i];
        if (la.edges.size() != lb.edges.size() || la.tau_count != lb.tau_count) return false;
        for (size_t k = 0; k < la.edges.size(); ++k) {
            if (la.edges[k].target_spin != lb.edges[k].target_spin ||
                std::bit_cast<uint32_t>(la.edges[k].coupling) !=
                    std::bit_cast<uint32_t>(lb.edges[k].coupling)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace isingmc
