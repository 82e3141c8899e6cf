#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pulsenet/core.hpp"

// Deterministic discrete-event runtime for asynchronous pulse networks.
// One run is strictly sequential: a scheduler step removes the head pulse of
// one directed link queue and hands it to the destination process, which then
// executes (in zero time) until it blocks on a receive or halts.

namespace pulsenet {

// ---------------------------------------------------------------------------
// Topology

struct LinkEnd {
    int process = -1;
    Port port = -1;
};

struct LinkSpec {
    LinkEnd a, b;
};

struct Topology {
    int n = 0;
    std::vector<int> degree;
    std::vector<LinkSpec> links;
    // [process][port] -> (link index, side: 0 = this end is `a`)
    std::vector<std::vector<std::pair<int, int>>> port_map;

    static Topology build(int n_processes, const std::vector<LinkSpec>& links_in) {
        Topology t;
        t.n = n_processes;
        t.links = links_in;
        t.degree.assign(n_processes, 0);
        for (const auto& l : links_in) {
            t.degree[l.a.process] = std::max(t.degree[l.a.process], l.a.port + 1);
            t.degree[l.b.process] = std::max(t.degree[l.b.process], l.b.port + 1);
        }
        t.port_map.assign(n_processes, {});
        for (int p = 0; p < n_processes; ++p) t.port_map[p].assign(t.degree[p], {-1, -1});
        for (int i = 0; i < static_cast<int>(t.links.size()); ++i) {
            const auto& l = t.links[i];
            auto set_end = [&](const LinkEnd& e, int side) {
                auto& slot = t.port_map[e.process][e.port];
                if (slot.first != -1) throw ConfigError("duplicate port assignment in topology");
                slot = {i, side};
            };
            set_end(l.a, 0);
            set_end(l.b, 1);
        }
        for (int p = 0; p < n_processes; ++p)
            for (int q = 0; q < t.degree[p]; ++q)
                if (t.port_map[p][q].first == -1) throw ConfigError("unconnected port in topology");
        return t;
    }

    // Destination end of a pulse sent by `process` on `port`.
    LinkEnd peer(int process, Port port) const {
        auto [li, side] = port_map[process][port];
        return side == 0 ? links[li].b : links[li].a;
    }
};

// Oriented ring: port 1 of p_j connects to port 0 of p_{j+1} (clockwise).
// For n = 2 this yields two distinct parallel links, keeping the port
// arithmetic of every algorithm valid at minimum size.
inline Topology make_ring(int n) {
    if (n < 2) throw ConfigError("ring needs n >= 2");
    std::vector<LinkSpec> links;
    links.reserve(n);
    for (int j = 0; j < n; ++j)
        links.push_back({{j, 1}, {(j + 1) % n, 0}});
    return Topology::build(n, links);
}

// ---------------------------------------------------------------------------
// Scheduling

enum class PolicyKind { uniform_random, fifo_global, lifo_global, exhaustive };

struct SchedulerPolicy {
    PolicyKind kind = PolicyKind::uniform_random;
    std::uint64_t seed = 1;
};

inline PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "uniform" || s == "uniform-random" || s == "random") return PolicyKind::uniform_random;
    if (s == "fifo" || s == "fifo-global") return PolicyKind::fifo_global;
    if (s == "lifo" || s == "lifo-global") return PolicyKind::lifo_global;
    if (s == "exhaustive") return PolicyKind::exhaustive;
    throw ConfigError("unknown scheduler policy: " + s);
}

// splitmix64: portable deterministic generator, same sequence on every
// platform for a given seed.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// ---------------------------------------------------------------------------
// Outcomes

struct TraceEvent {
    enum class Kind { send, deliver, halt };
    std::uint64_t seq = 0;
    Kind kind = Kind::send;
    int process = -1;
    Port port = -1;
    int link = -1;
    int direction = -1; // 0: a->b, 1: b->a
    int instance = 0;
};

struct InstanceStats {
    std::uint64_t pulses = 0;
    std::vector<std::vector<long long>> outputs;
};

struct ExecutionOutcome {
    std::vector<std::vector<long long>> outputs;
    std::uint64_t total_pulses = 0;
    // [link][direction] pulse counters, the per-directed-edge M(e).
    std::vector<std::array<std::uint64_t, 2>> edge_pulses;
    bool quiescent = false;
    std::uint64_t steps = 0;
    std::vector<TraceEvent> trace;
    std::vector<InstanceStats> instances;
};

struct RunOptions {
    SchedulerPolicy policy;
    std::uint64_t step_budget = 1'000'000'000ULL;
    bool record_trace = true;
    // Opacity harness: stamp every pulse with instance 0. Tags are
    // verification-only; behavior must not change.
    bool constant_instance_tags = false;
};

// Stage factory for composed runs: builds the process's next program from
// the output of its previous one.
using StageFactory = std::function<Program(int process, const std::vector<long long>& prev_output)>;

// ---------------------------------------------------------------------------
// Engine

namespace detail {

struct PulseMeta {
    int instance = 0;
    std::uint64_t send_seq = 0;
};

struct Buffered {
    std::uint64_t arrival = 0;
    PulseMeta meta;
};

struct ProcState {
    Program prog;
    Wait wait = Wait::done();
    int instance = 0;
    bool halted = false;
    std::vector<std::deque<Buffered>> buffers;
    std::uint64_t arrival_counter = 0;
};

class Runner {
public:
    Runner(const Topology& topo, std::vector<Program> programs, RunOptions opt,
           std::vector<std::vector<StageFactory>> next_stages = {})
        : topo_(topo), opt_(opt), next_stages_(std::move(next_stages)) {
        if (static_cast<int>(programs.size()) != topo.n)
            throw ConfigError("one program per process required");
        if (opt_.policy.kind == PolicyKind::exhaustive)
            throw ConfigError("exhaustive policy is only valid for enumerate_schedules");
        queues_.assign(topo_.links.size(), {});
        active_pos_.assign(topo_.links.size() * 2, -1);
        edge_pulses_.assign(topo_.links.size(), {0, 0});
        procs_.reserve(topo_.n);
        for (int p = 0; p < topo_.n; ++p) {
            ProcState ps{std::move(programs[p])};
            ps.buffers.assign(topo_.degree[p], {});
            procs_.push_back(std::move(ps));
        }
        rng_ = SplitMix64(opt_.policy.seed);
    }

    Runner(const Runner&) = default;
    Runner& operator=(const Runner&) = default;

    void start() {
        for (int p = 0; p < topo_.n; ++p) activate(p, std::nullopt);
    }

    // One scheduler step: deliver the head pulse of the chosen directed
    // link queue. Returns false when nothing is in flight.
    bool step_chosen(int link, int dir) {
        auto& q = queues_[link][dir];
        PulseMeta meta = q.front();
        q.pop_front();
        if (q.empty()) deactivate(link * 2 + dir);
        ++steps_;
        const LinkSpec& l = topo_.links[link];
        const LinkEnd dst = dir == 0 ? l.b : l.a;
        deliver(dst.process, dst.port, meta);
        return true;
    }

    std::vector<std::pair<int, int>> candidates() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(active_list_.size());
        for (int key : active_list_) out.emplace_back(key / 2, key % 2);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool step() {
        if (active_list_.empty()) return false;
        std::size_t pick = 0;
        switch (opt_.policy.kind) {
        case PolicyKind::uniform_random:
            pick = static_cast<std::size_t>(rng_.next() % active_list_.size());
            break;
        case PolicyKind::fifo_global: {
            std::uint64_t best = head_seq(active_list_[0]);
            for (std::size_t i = 1; i < active_list_.size(); ++i) {
                std::uint64_t s = head_seq(active_list_[i]);
                if (s < best) { best = s; pick = i; }
            }
            break;
        }
        case PolicyKind::lifo_global: {
            std::uint64_t best = head_seq(active_list_[0]);
            for (std::size_t i = 1; i < active_list_.size(); ++i) {
                std::uint64_t s = head_seq(active_list_[i]);
                if (s > best) { best = s; pick = i; }
            }
            break;
        }
        case PolicyKind::exhaustive:
            throw ConfigError("exhaustive policy is only valid for enumerate_schedules");
        }
        const int key = active_list_[pick];
        return step_chosen(key / 2, key % 2);
    }

    void run_all() {
        start();
        while (step()) {
            if (steps_ > opt_.step_budget)
                throw BudgetExhausted("step budget exhausted; livelock or protocol bug");
        }
    }

    bool quiescent() const {
        for (const auto& ps : procs_) {
            if (!ps.halted) return false;
            for (const auto& b : ps.buffers)
                if (!b.empty()) return false;
        }
        for (const auto& q : queues_)
            if (!q[0].empty() || !q[1].empty()) return false;
        return true;
    }

    ExecutionOutcome finish() {
        ExecutionOutcome out;
        out.outputs.reserve(procs_.size());
        for (auto& ps : procs_)
            out.outputs.push_back(ps.halted ? ps.prog.output() : std::vector<long long>{});
        out.total_pulses = total_pulses_;
        out.edge_pulses = edge_pulses_;
        out.quiescent = quiescent();
        out.steps = steps_;
        out.trace = std::move(trace_);
        out.instances = std::move(instance_stats_);
        return out;
    }

    // State fingerprint for exhaustive exploration; includes behavioral
    // state plus the pulse counter so count-differing paths stay distinct.
    std::pair<std::uint64_t, std::uint64_t> fingerprint() const {
        std::uint64_t h1 = 0x243f6a8885a308d3ULL, h2 = 0x13198a2e03707344ULL;
        auto mix = [&](std::uint64_t v) {
            h1 ^= v + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2);
            h2 = (h2 ^ v) * 0x100000001b3ULL;
        };
        mix(total_pulses_);
        for (const auto& ps : procs_) {
            mix(static_cast<std::uint64_t>(ps.wait.kind));
            mix(static_cast<std::uint64_t>(ps.wait.port + 1));
            mix(static_cast<std::uint64_t>(ps.instance));
            mix(ps.halted ? 1 : 0);
            for (long long v : ps.prog.state_key()) mix(static_cast<std::uint64_t>(v) * 0x9ddfea08eb382d69ULL + 1);
            // Buffered pulses in arrival order across ports.
            std::vector<std::pair<std::uint64_t, int>> buf;
            for (int port = 0; port < static_cast<int>(ps.buffers.size()); ++port)
                for (const auto& b : ps.buffers[port]) buf.emplace_back(b.arrival, port);
            std::sort(buf.begin(), buf.end());
            mix(buf.size());
            for (auto& [a, port] : buf) mix(static_cast<std::uint64_t>(port) + 7);
        }
        for (const auto& q : queues_)
            for (int d = 0; d < 2; ++d) {
                mix(q[d].size());
                for (const auto& m : q[d]) mix(static_cast<std::uint64_t>(m.instance) + 11);
            }
        return {h1, h2};
    }

    bool all_programs_keyed() const {
        for (const auto& ps : procs_)
            if (!ps.prog.has_state_key()) return false;
        return true;
    }

    const std::vector<ProcState>& procs() const { return procs_; }
    std::uint64_t total_pulses() const { return total_pulses_; }

private:
    void record(TraceEvent::Kind kind, int process, Port port, int link, int dir, int instance) {
        if (!opt_.record_trace) return;
        trace_.push_back(TraceEvent{trace_seq_++, kind, process, port, link, dir, instance});
    }

    void note_instance_pulse(int instance) {
        if (static_cast<std::size_t>(instance) >= instance_stats_.size())
            instance_stats_.resize(instance + 1);
        ++instance_stats_[instance].pulses;
    }

    std::uint64_t head_seq(int key) const { return queues_[key / 2][key % 2].front().send_seq; }

    void deactivate(int key) {
        const int pos = active_pos_[key];
        const int last = active_list_.back();
        active_list_[pos] = last;
        active_pos_[last] = pos;
        active_list_.pop_back();
        active_pos_[key] = -1;
    }

    void apply_effects(int p, Effects& fx) {
        for (Port port : fx.sends) {
            if (port < 0 || port >= topo_.degree[p])
                throw ProcessFault("send on invalid port");
            auto [li, side] = topo_.port_map[p][port];
            const int dir = side == 0 ? 0 : 1;
            const int tag = opt_.constant_instance_tags ? 0 : procs_[p].instance;
            if (queues_[li][dir].empty()) {
                active_pos_[li * 2 + dir] = static_cast<int>(active_list_.size());
                active_list_.push_back(li * 2 + dir);
            }
            queues_[li][dir].push_back(PulseMeta{tag, send_seq_++});
            ++total_pulses_;
            ++edge_pulses_[li][dir];
            note_instance_pulse(procs_[p].instance);
            record(TraceEvent::Kind::send, p, port, li, dir, tag);
        }
        fx.sends.clear();
    }

    void consume(int p, Port port, const PulseMeta& meta) {
        ProcState& ps = procs_[p];
        if (!opt_.constant_instance_tags && meta.instance != ps.instance)
            throw CrossInstanceConsumption(
                "pulse of instance " + std::to_string(meta.instance) +
                " consumed by instance " + std::to_string(ps.instance) +
                " at process " + std::to_string(p));
        auto [li, side] = topo_.port_map[p][port];
        record(TraceEvent::Kind::deliver, p, port, li, side == 0 ? 1 : 0, meta.instance);
        resume_chain(p, port);
    }

    // Resume the program, then keep consuming buffered pulses it can accept;
    // local computation takes zero time.
    void resume_chain(int p, std::optional<Port> first_port) {
        ProcState& ps = procs_[p];
        Effects fx;
        ps.wait = ps.prog.resume(first_port, fx);
        apply_effects(p, fx);
        drain(p);
    }

    void drain(int p) {
        ProcState& ps = procs_[p];
        while (true) {
            if (ps.wait.is_done()) {
                on_halt(p);
                return;
            }
            int port = -1;
            if (ps.wait.kind == Wait::Kind::on_port) {
                if (ps.buffers[ps.wait.port].empty()) return;
                port = ps.wait.port;
            } else { // any: oldest buffered pulse across ports
                std::uint64_t best = 0;
                for (int q = 0; q < static_cast<int>(ps.buffers.size()); ++q) {
                    if (ps.buffers[q].empty()) continue;
                    if (port == -1 || ps.buffers[q].front().arrival < best) {
                        port = q;
                        best = ps.buffers[q].front().arrival;
                    }
                }
                if (port == -1) return;
            }
            Buffered b = ps.buffers[port].front();
            ps.buffers[port].pop_front();
            consume_buffered(p, port, b.meta);
        }
    }

    void consume_buffered(int p, Port port, const PulseMeta& meta) {
        ProcState& ps = procs_[p];
        if (!opt_.constant_instance_tags && meta.instance != ps.instance)
            throw CrossInstanceConsumption(
                "pulse of instance " + std::to_string(meta.instance) +
                " consumed by instance " + std::to_string(ps.instance) +
                " at process " + std::to_string(p));
        auto [li, side] = topo_.port_map[p][port];
        record(TraceEvent::Kind::deliver, p, port, li, side == 0 ? 1 : 0, meta.instance);
        Effects fx;
        ps.wait = ps.prog.resume(port, fx);
        apply_effects(p, fx);
    }

    void on_halt(int p) {
        ProcState& ps = procs_[p];
        if (ps.halted) return;
        ps.halted = true;
        record(TraceEvent::Kind::halt, p, -1, -1, -1, ps.instance);
        if (static_cast<std::size_t>(ps.instance) >= instance_stats_.size())
            instance_stats_.resize(ps.instance + 1);
        if (instance_stats_[ps.instance].outputs.empty())
            instance_stats_[ps.instance].outputs.resize(topo_.n);
        instance_stats_[ps.instance].outputs[p] = ps.prog.output();
        // Composed runs: start the next instance immediately on return.
        if (!next_stages_.empty() && static_cast<std::size_t>(ps.instance) < next_stages_[p].size()) {
            const auto prev = ps.prog.output();
            Program next = next_stages_[p][ps.instance](p, prev);
            ps.prog = std::move(next);
            ps.instance += 1;
            ps.halted = false;
            activate(p, std::nullopt);
        }
    }

    void activate(int p, std::optional<Port> ev) { resume_chain(p, ev); }

    void deliver(int p, Port port, const PulseMeta& meta) {
        ProcState& ps = procs_[p];
        if (!ps.halted && ps.wait.accepts(port) && ps.buffers[port].empty()) {
            consume(p, port, meta);
            drain(p);
        } else {
            ps.buffers[port].push_back(Buffered{ps.arrival_counter++, meta});
        }
    }

    Topology topo_;
    RunOptions opt_;
    std::vector<std::vector<StageFactory>> next_stages_;
    std::vector<ProcState> procs_;
    std::vector<std::array<std::deque<PulseMeta>, 2>> queues_;
    std::vector<int> active_list_; // keys link*2+dir of non-empty queues
    std::vector<int> active_pos_;
    std::vector<std::array<std::uint64_t, 2>> edge_pulses_;
    std::vector<TraceEvent> trace_;
    std::vector<InstanceStats> instance_stats_;
    SplitMix64 rng_{1};
    std::uint64_t steps_ = 0;
    std::uint64_t send_seq_ = 0;
    std::uint64_t trace_seq_ = 0;
    std::uint64_t total_pulses_ = 0;
};

} // namespace detail

inline ExecutionOutcome run_to_quiescence(const Topology& topo, std::vector<Program> programs,
                                          const RunOptions& opt = {}) {
    detail::Runner r(topo, std::move(programs), opt);
    r.run_all();
    return r.finish();
}

// Runs `stages[0]` programs to completion at each process, then `stages[1]`,
// and so on; process k starts stage j+1 immediately on returning from stage
// j. Instance tags verify that no pulse of one stage is consumed by another.
inline std::vector<ExecutionOutcome> run_composed(const Topology& topo,
                                                  const std::vector<std::vector<StageFactory>>& stages,
                                                  const RunOptions& opt = {}) {
    if (stages.empty()) throw ConfigError("run_composed: empty stage list");
    std::vector<Program> first;
    std::vector<std::vector<StageFactory>> rest(topo.n);
    first.reserve(topo.n);
    for (int p = 0; p < topo.n; ++p) {
        first.push_back(stages[0][p](p, {}));
        for (std::size_t s = 1; s < stages.size(); ++s) rest[p].push_back(stages[s][p]);
    }
    detail::Runner r(topo, std::move(first), opt, std::move(rest));
    r.run_all();
    ExecutionOutcome whole = r.finish();

    std::vector<ExecutionOutcome> per_stage(stages.size());
    for (std::size_t s = 0; s < stages.size(); ++s) {
        ExecutionOutcome& o = per_stage[s];
        if (s < whole.instances.size()) {
            o.total_pulses = whole.instances[s].pulses;
            o.outputs = whole.instances[s].outputs;
        }
        o.quiescent = whole.quiescent;
        o.steps = whole.steps;
        for (const auto& ev : whole.trace)
            if (ev.instance == static_cast<int>(s)) o.trace.push_back(ev);
    }
    return per_stage;
}

// ---------------------------------------------------------------------------
// Bounded exhaustive exploration of the delivery adversary.

struct Fingerprint {
    std::vector<std::vector<long long>> outputs;
    std::uint64_t total_pulses = 0;
    bool quiescent = false;

    bool operator<(const Fingerprint& o) const {
        if (outputs != o.outputs) return outputs < o.outputs;
        if (total_pulses != o.total_pulses) return total_pulses < o.total_pulses;
        return quiescent < o.quiescent;
    }
    bool operator==(const Fingerprint& o) const {
        return outputs == o.outputs && total_pulses == o.total_pulses && quiescent == o.quiescent;
    }
};

struct EnumLimits {
    std::uint64_t max_visited = 4'000'000;
    std::uint64_t depth_bound = 1'000'000;
};

inline std::set<Fingerprint> enumerate_schedules(const Topology& topo, std::vector<Program> programs,
                                                 const EnumLimits& limits = {}) {
    RunOptions opt;
    opt.record_trace = false;
    detail::Runner root(topo, std::move(programs), opt);
    root.start();

    std::set<Fingerprint> results;
    std::set<std::pair<std::uint64_t, std::uint64_t>> visited;
    const bool dedup = root.all_programs_keyed();
    std::uint64_t explored = 0;

    struct Frame {
        detail::Runner world;
        std::vector<std::pair<int, int>> cand;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{root, root.candidates(), 0});
    if (dedup) visited.insert(root.fingerprint());

    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.cand.empty()) {
            Fingerprint fp;
            ExecutionOutcome o = detail::Runner(f.world).finish();
            fp.outputs = std::move(o.outputs);
            fp.total_pulses = o.total_pulses;
            fp.quiescent = o.quiescent;
            results.insert(std::move(fp));
            stack.pop_back();
            continue;
        }
        if (f.next >= f.cand.size()) {
            stack.pop_back();
            continue;
        }
        auto [link, dir] = f.cand[f.next++];
        detail::Runner child = f.world;
        child.step_chosen(link, dir);
        if (++explored > limits.max_visited)
            throw StateSpaceTooLarge("enumerate_schedules: state limit exceeded");
        if (stack.size() > limits.depth_bound)
            throw StateSpaceTooLarge("enumerate_schedules: depth bound exceeded");
        if (dedup && !visited.insert(child.fingerprint()).second) continue;
        auto cand = child.candidates();
        stack.push_back(Frame{std::move(child), std::move(cand), 0});
    }
    return results;
}

} // namespace pulsenet
