#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "pulsenet/sim.hpp"

// Trace checkers used by tests and the CLI's invariant verdicts. These only
// read the recorded event stream, never the protocol implementations.

namespace pulsenet {

// Delivery order equals send order on every directed link, and no pulse is
// delivered before it was sent or more often than it was sent.
inline bool check_fifo(const ExecutionOutcome& o, std::string* why = nullptr) {
    std::map<std::pair<int, int>, std::vector<std::uint64_t>> sends, delivers;
    for (const auto& ev : o.trace) {
        if (ev.kind == TraceEvent::Kind::send) sends[{ev.link, ev.direction}].push_back(ev.seq);
        if (ev.kind == TraceEvent::Kind::deliver) delivers[{ev.link, ev.direction}].push_back(ev.seq);
    }
    for (auto& [key, dl] : delivers) {
        auto& sl = sends[key];
        if (dl.size() > sl.size()) {
            if (why) *why = "more deliveries than sends on a directed link";
            return false;
        }
        for (std::size_t k = 0; k < dl.size(); ++k) {
            if (dl[k] <= sl[k]) {
                if (why) *why = "delivery precedes matching send";
                return false;
            }
        }
    }
    return true;
}

// Pulses sent equals pulses delivered at quiescence.
inline bool check_conservation(const ExecutionOutcome& o, std::string* why = nullptr) {
    std::uint64_t sends = 0, delivers = 0;
    for (const auto& ev : o.trace) {
        if (ev.kind == TraceEvent::Kind::send) ++sends;
        if (ev.kind == TraceEvent::Kind::deliver) ++delivers;
    }
    if (sends != o.total_pulses) {
        if (why) *why = "trace sends disagree with pulse counter";
        return false;
    }
    if (o.quiescent && sends != delivers) {
        if (why) *why = "quiescent run with undelivered pulses";
        return false;
    }
    std::uint64_t per_edge = 0;
    for (const auto& e : o.edge_pulses) per_edge += e[0] + e[1];
    if (per_edge != o.total_pulses) {
        if (why) *why = "per-edge counters disagree with total";
        return false;
    }
    return true;
}

// Largest number of pulses simultaneously in transit at any instant.
inline std::uint64_t max_in_flight(const ExecutionOutcome& o) {
    std::uint64_t cur = 0, best = 0;
    for (const auto& ev : o.trace) {
        if (ev.kind == TraceEvent::Kind::send) best = std::max(best, ++cur);
        if (ev.kind == TraceEvent::Kind::deliver) --cur;
    }
    return best;
}

// Composable ending per the definition: a unique terminator returns last; it
// starts a wave on port d and never again receives on d; every other process
// returns right after receiving the wave on port 1-d and forwarding one pulse
// on port d.
inline bool check_composable_ending(const ExecutionOutcome& o, int n, int terminator, Port d,
                                    std::string* why = nullptr) {
    std::vector<std::uint64_t> halt_seq(n, 0);
    std::vector<bool> halted(n, false);
    std::vector<std::uint64_t> last_send_seq(n, 0), last_deliver_seq(n, 0);
    std::vector<Port> last_send_port(n, -1), last_deliver_port(n, -1);
    for (const auto& ev : o.trace) {
        if (ev.process < 0 || ev.process >= n) continue;
        switch (ev.kind) {
        case TraceEvent::Kind::send:
            last_send_seq[ev.process] = ev.seq;
            last_send_port[ev.process] = ev.port;
            break;
        case TraceEvent::Kind::deliver:
            last_deliver_seq[ev.process] = ev.seq;
            last_deliver_port[ev.process] = ev.port;
            break;
        case TraceEvent::Kind::halt:
            halt_seq[ev.process] = ev.seq;
            halted[ev.process] = true;
            break;
        }
    }
    for (int p = 0; p < n; ++p)
        if (!halted[p]) {
            if (why) *why = "process " + std::to_string(p) + " never returned";
            return false;
        }
    int last = 0;
    for (int p = 1; p < n; ++p)
        if (halt_seq[p] > halt_seq[last]) last = p;
    if (last != terminator) {
        if (why) *why = "last returner " + std::to_string(last) + " is not the terminator";
        return false;
    }
    for (int p = 0; p < n; ++p) {
        if (last_deliver_port[p] != 1 - d) {
            if (why) *why = "final pulse of process " + std::to_string(p) + " not on port 1-d";
            return false;
        }
        if (p != terminator) {
            if (last_send_port[p] != d || last_send_seq[p] < last_deliver_seq[p]) {
                if (why) *why = "process " + std::to_string(p) + " did not forward the wave last";
                return false;
            }
        }
    }
    // After starting the wave, the terminator only consumes on port 1-d.
    for (const auto& ev : o.trace) {
        if (ev.kind == TraceEvent::Kind::deliver && ev.process == terminator &&
            ev.seq > last_send_seq[terminator] && ev.port != 1 - d) {
            if (why) *why = "terminator consumed on port d after starting the wave";
            return false;
        }
    }
    return true;
}

} // namespace pulsenet
