#include "isingmc/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace isingmc {

namespace {

std::string hex_float(float v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", double(v));
    return buf;
}

[[noreturn]] void parse_fail(size_t line_no, const std::string& reason) {
    throw Error("line " + std::to_string(line_no) + ": " + reason);
}

bool parse_u32(const std::string& tok, uint32_t& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    const unsigned long v = std::strtoul(tok.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || v > 0xFFFFFFFFul) return false;
    out = static_cast<uint32_t>(v);
    return true;
}

bool parse_f32(const std::string& tok, float& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    out = std::strtof(tok.c_str(), &end);
    return end != nullptr && *end == '\0';
}

}  // namespace

std::string model_to_string(const SpinModel& model) {
    if (model.layered && model.layered->ordering != Ordering::identity) {
        throw Error("model_to_string: only identity-ordered models are serialized");
    }
    std::ostringstream out;
    out << "ising-model v1\n";
    out << "spins " << model.n_spins << "\n";
    if (model.layered) {
        out << "layers " << model.layered->layers << " " << model.layered->per_layer << "\n";
    }
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        if (std::bit_cast<uint32_t>(model.h[i]) != 0) {
            out << "h " << i << " " << hex_float(model.h[i]) << "\n";
        }
    }
    for (uint32_t i = 0; i < model.n_spins; ++i) {
        const SpinEdgeList& list = model.adjacency[i];
        for (size_t k = 0; k < list.edges.size(); ++k) {
            const EdgeRecord& e = list.edges[k];
            if (e.target_spin <= i) continue;
            const bool tau = k >= list.edges.size() - list.tau_count;
            out << "edge " << i << " " << e.target_spin << " " << hex_float(e.coupling) << " "
                << (tau ? "tau" : "space") << "\n";
        }
    }
    return out.str();
}

SpinModel model_from_string(std::string_view text) {
    struct RawEdge {
        uint32_t i, j;
        float coupling;
        bool tau;
    };

    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;

    bool have_header = false;
    bool have_spins = false;
    uint32_t n_spins = 0;
    bool have_layers = false;
    uint32_t layers = 0, per_layer = 0;
    std::vector<float> h;
    std::vector<uint8_t> h_seen;
    std::vector<RawEdge> edges;
    std::set<std::pair<uint32_t, uint32_t>> edge_keys;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);

        if (!have_header) {
            if (tok.size() != 2 || tok[0] != "ising-model" || tok[1] != "v1") {
                parse_fail(line_no, "expected header 'ising-model v1'");
            }
            have_header = true;
            continue;
        }
        if (tok[0] == "spins") {
            if (have_spins) parse_fail(line_no, "duplicate spins line");
            if (tok.size() != 2 || !parse_u32(tok[1], n_spins) || n_spins == 0) {
                parse_fail(line_no, "malformed spins line");
            }
            have_spins = true;
            h.assign(n_spins, 0.0f);
            h_seen.assign(n_spins, 0);
            continue;
        }
        if (!have_spins) parse_fail(line_no, "spins line must precede '" + tok[0] + "'");
        if (tok[0] == "layers") {
            if (have_layers) parse_fail(line_no, "duplicate layers line");
            if (tok.size() != 3 || !parse_u32(tok[1], layers) || !parse_u32(tok[2], per_layer)) {
                parse_fail(line_no, "malformed layers line");
            }
            if (layers < 4 || uint64_t(layers) * per_layer != n_spins) {
                parse_fail(line_no, "layers * per_layer must equal spins with layers >= 4");
            }
            have_layers = true;
            continue;
        }
        if (tok[0] == "h") {
            uint32_t i;
            float v;
            if (tok.size() != 3 || !parse_u32(tok[1], i) || !parse_f32(tok[2], v)) {
                parse_fail(line_no, "malformed h line");
            }
            if (i >= n_spins) parse_fail(line_no, "h index out of range");
            if (h_seen[i]) parse_fail(line_no, "duplicate h line for spin " + std::to_string(i));
            h_seen[i] = 1;
            h[i] = v;
            continue;
        }
        if (tok[0] == "edge") {
            uint32_t i, j;
            float v;
            if (tok.size() != 5 || !parse_u32(tok[1], i) || !parse_u32(tok[2], j) ||
                !parse_f32(tok[3], v) || (tok[4] != "space" && tok[4] != "tau")) {
                parse_fail(line_no, "malformed edge line");
            }
            if (i >= n_spins || j >= n_spins) parse_fail(line_no, "edge endpoint out of range");
            if (i >= j) parse_fail(line_no, "edge endpoints must satisfy i < j");
            if (!edge_keys.insert({i, j}).second) {
                parse_fail(line_no, "duplicate edge " + std::to_string(i) + "-" + std::to_string(j));
            }
            const bool tau = tok[4] == "tau";
            if (tau && !have_layers) parse_fail(line_no, "tau edge in a model without layers");
            edges.push_back({i, j, v, tau});
            continue;
        }
        parse_fail(line_no, "unknown line '" + tok[0] + "'");
    }
    if (!have_header) throw Error("line 1: empty document, expected 'ising-model v1'");
    if (!have_spins) throw Error("line " + std::to_string(line_no) + ": missing spins line");

    SpinModel model;
    model.n_spins = n_spins;
    model.h = std::move(h);
    model.adjacency.resize(n_spins);

    std::vector<std::vector<EdgeRecord>> space(n_spins);
    std::vector<std::vector<EdgeRecord>> tau(n_spins);
    for (const RawEdge& e : edges) {
        auto& side = e.tau ? tau : space;
        side[e.i].push_back({e.j, e.coupling});
        side[e.j].push_back({e.i, e.coupling});
    }
    for (uint32_t i = 0; i < n_spins; ++i) {
        std::sort(space[i].begin(), space[i].end(),
                  [](const EdgeRecord& a, const EdgeRecord& b) { return a.target_spin < b.target_spin; });
        SpinEdgeList& list = model.adjacency[i];
        list.edges = std::move(space[i]);
        if (have_layers) {
            if (tau[i].size() != 2) {
                throw Error("spin " + std::to_string(i) + " has " + std::to_string(tau[i].size()) +
                            " tau edges, expected 2");
            }
            // canonical tau order: next layer first, previous layer second
            const uint32_t l = i / per_layer;
            const uint32_t p = i % per_layer;
            const uint32_t up = ((l + 1) % layers) * per_layer + p;
            if (tau[i][0].target_spin != up) std::swap(tau[i][0], tau[i][1]);
            list.edges.insert(list.edges.end(), tau[i].begin(), tau[i].end());
            list.tau_count = 2;
        }
    }
    if (have_layers) model.layered = LayeredMeta{layers, per_layer, Ordering::identity, 0};

    try {
        validate_model(model);
    } catch (const Error& e) {
        throw Error(std::string("model failed validation after load: ") + e.what());
    }
    return model;
}

void save_model(const SpinModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_model: cannot open " + path);
    out << model_to_string(model);
    if (!out) throw Error("save_model: write failed for " + path);
}

SpinModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_model: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return model_from_string(buf.str());
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace isingmc
