#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pulsenet/core.hpp"
#include "pulsenet/sim.hpp"

// Static ring descriptions: oriented rings (anonymous or ID-equipped, with a
// leader) and the virtual-ring view induced by an active/relay partition.

namespace pulsenet {

struct RingConfig {
    int n = 0;
    int leader = 0;
    std::optional<std::vector<long long>> ids;
    std::optional<std::vector<long long>> inputs;
    std::optional<std::vector<bool>> active;

    bool is_active(int p) const { return !active || (*active)[p]; }

    void validate() const {
        if (n < 2) throw ConfigError("ring size must be >= 2");
        if (leader < 0 || leader >= n) throw ConfigError("leader index out of range");
        if (ids) {
            if (static_cast<int>(ids->size()) != n) throw ConfigError("ids size mismatch");
            auto sorted = *ids;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (sorted[i] < 0) throw ConfigError("ids must be non-negative");
                if (i > 0 && sorted[i] == sorted[i - 1]) throw ConfigError("ids must be pairwise distinct");
            }
        }
        if (inputs) {
            if (static_cast<int>(inputs->size()) != n) throw ConfigError("inputs size mismatch");
            for (long long v : *inputs)
                if (v < 0) throw ConfigError("inputs must be non-negative");
        }
        if (active) {
            if (static_cast<int>(active->size()) != n) throw ConfigError("active mask size mismatch");
            if (!(*active)[leader]) throw ConfigError("active mask must mark the leader active");
        }
    }
};

// Cyclic order of active processes plus, for each consecutive active pair,
// the relay segment between them (clockwise).
struct VirtualRing {
    std::vector<int> actives;                  // clockwise order, starting at the
                                               // smallest active index
    std::vector<std::vector<int>> relay_segments; // segment k sits between
                                                  // actives[k] and actives[k+1]

    int size() const { return static_cast<int>(actives.size()); }

    // Expanding each segment after its active reproduces the physical ring.
    std::vector<int> expand() const {
        std::vector<int> ring;
        for (std::size_t k = 0; k < actives.size(); ++k) {
            ring.push_back(actives[k]);
            for (int r : relay_segments[k]) ring.push_back(r);
        }
        return ring;
    }
};

inline VirtualRing virtual_ring(const RingConfig& cfg) {
    cfg.validate();
    std::vector<int> actives;
    for (int p = 0; p < cfg.n; ++p)
        if (cfg.is_active(p)) actives.push_back(p);
    if (actives.empty()) throw NoActiveProcess("virtual_ring: no active process");

    VirtualRing vr;
    vr.actives = actives;
    vr.relay_segments.resize(actives.size());
    for (std::size_t k = 0; k < actives.size(); ++k) {
        const int from = actives[k];
        const int to = actives[(k + 1) % actives.size()];
        for (int p = (from + 1) % cfg.n; p != to; p = (p + 1) % cfg.n) {
            vr.relay_segments[k].push_back(p);
            if (static_cast<int>(vr.relay_segments[k].size()) > cfg.n) break; // single active
        }
        if (actives.size() == 1) {
            // All other processes form one segment around the ring.
            vr.relay_segments[k].clear();
            for (int p = (from + 1) % cfg.n; p != from; p = (p + 1) % cfg.n)
                vr.relay_segments[k].push_back(p);
        }
    }
    return vr;
}

// Naming from anonymous counting: the clockwise distances from the leader
// become the process identifiers.
inline RingConfig assign_ids_from_distances(const RingConfig& cfg, const std::vector<long long>& distances) {
    cfg.validate();
    if (static_cast<int>(distances.size()) != cfg.n)
        throw NotAPermutationOfRange("distances size mismatch");
    std::vector<bool> seen(cfg.n, false);
    for (long long d : distances) {
        if (d < 0 || d >= cfg.n || seen[d]) throw NotAPermutationOfRange("distances must be a permutation of 0..n-1");
        seen[d] = true;
    }
    if (distances[cfg.leader] != 0) throw NotAPermutationOfRange("leader distance must be 0");
    RingConfig out = cfg;
    out.ids = distances;
    return out;
}

// Maximum ID bit length of the configuration (MSB-first convention).
inline int lambda_of(const RingConfig& cfg) {
    if (!cfg.ids) throw ConfigError("lambda_of: configuration has no ids");
    int lambda = 1;
    for (long long id : *cfg.ids) lambda = std::max(lambda, bit_length(id));
    return lambda;
}

inline Topology ring_topology(const RingConfig& cfg) {
    cfg.validate();
    return make_ring(cfg.n);
}

} // namespace pulsenet
