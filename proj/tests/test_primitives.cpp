#include <catch2/catch_amalgamated.hpp>

#include "pulsenet/primitives.hpp"
#include "pulsenet/sim.hpp"
#include "pulsenet/verify.hpp"

using namespace pulsenet;

namespace {

RingConfig ring_cfg(int n, int leader = 0) {
    RingConfig cfg;
    cfg.n = n;
    cfg.leader = leader;
    return cfg;
}

bool or_of(const std::vector<bool>& v) {
    for (bool b : v)
        if (b) return true;
    return false;
}

// Expected bit-send results with relay segments contracted: active p returns
// the bit of the next active process in `dir` (+1 clockwise, -1 ccw).
std::vector<Trit> expected_neighbor_bits(const std::vector<Trit>& bits, const std::vector<bool>& act,
                                         int dir) {
    const int n = static_cast<int>(bits.size());
    std::vector<Trit> out(n, Trit::bottom);
    for (int p = 0; p < n; ++p) {
        if (!act[p]) continue;
        for (int k = 1; k <= n; ++k) {
            int q = ((p + dir * k) % n + n) % n;
            if (act[q]) {
                out[p] = bits[q];
                break;
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("compute_or matches the OR of the inputs with exactly 3n pulses", "[primitives]") {
    for (int n = 2; n <= 6; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<bool> inputs(n);
            for (int p = 0; p < n; ++p) inputs[p] = (mask >> p) & 1;
            auto cfg = ring_cfg(n, mask % n);
            RunOptions opt;
            opt.policy.seed = 1 + mask;
            auto out = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs), opt);
            REQUIRE(out.quiescent);
            CHECK(out.total_pulses == static_cast<std::uint64_t>(3 * n));
            const long long expect = or_of(inputs) ? 1 : 0;
            for (int p = 0; p < n; ++p) CHECK(out.outputs[p] == std::vector<long long>{expect});
        }
    }
}

TEST_CASE("compute_or all-false is seed-invariant at 3n pulses", "[primitives]") {
    auto cfg = ring_cfg(4, 2);
    std::vector<bool> inputs(4, false);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        RunOptions opt;
        opt.policy.seed = seed;
        auto out = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs), opt);
        CHECK(out.total_pulses == 12);
        for (auto& o : out.outputs) CHECK(o == std::vector<long long>{0});
    }
}

TEST_CASE("compute_or keeps at most one pulse in transit", "[primitives]") {
    for (int n : {2, 3, 5, 7}) {
        auto cfg = ring_cfg(n, n / 2);
        std::vector<bool> inputs(n, false);
        inputs[(n / 2 + 1) % n] = true;
        auto out = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs));
        CHECK(max_in_flight(out) == 1);
    }
}

TEST_CASE("compute_or has the composable ending", "[primitives]") {
    for (int mask = 0; mask < 8; ++mask) {
        auto cfg = ring_cfg(3, 1);
        std::vector<bool> inputs(3);
        for (int p = 0; p < 3; ++p) inputs[p] = (mask >> p) & 1;
        auto out = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs));
        std::string why;
        CHECK(check_composable_ending(out, 3, cfg.leader, 1, &why));
        CHECK(check_fifo(out, &why));
        CHECK(check_conservation(out, &why));
    }
}

TEST_CASE("ccw_bit_send returns the clockwise neighbor's trit", "[primitives]") {
    // Paper example: n=3 all active, bits (1,0,bot) -> returns (0,bot,1).
    auto cfg = ring_cfg(3, 0);
    std::vector<Trit> bits{Trit::one, Trit::zero, Trit::bottom};
    auto out = run_to_quiescence(ring_topology(cfg), make_ccw_bit_send(cfg, bits));
    REQUIRE(out.quiescent);
    CHECK(out.outputs[0] == std::vector<long long>{0});
    CHECK(out.outputs[1] == std::vector<long long>{-1});
    CHECK(out.outputs[2] == std::vector<long long>{1});
    CHECK(out.total_pulses <= 18);
}

TEST_CASE("cw_bit_send returns the counter-clockwise neighbor's trit", "[primitives]") {
    auto cfg = ring_cfg(3, 0);
    std::vector<Trit> bits{Trit::one, Trit::zero, Trit::bottom};
    auto out = run_to_quiescence(ring_topology(cfg), make_cw_bit_send(cfg, bits));
    REQUIRE(out.quiescent);
    CHECK(out.outputs[0] == std::vector<long long>{-1});
    CHECK(out.outputs[1] == std::vector<long long>{1});
    CHECK(out.outputs[2] == std::vector<long long>{0});
}

TEST_CASE("all-bottom bit layer stays within 6n pulses and returns bottom", "[primitives]") {
    for (int n : {2, 4}) {
        auto cfg = ring_cfg(n, 0);
        std::vector<Trit> bits(n, Trit::bottom);
        auto out = run_to_quiescence(ring_topology(cfg), make_ccw_bit_send(cfg, bits));
        REQUIRE(out.quiescent);
        for (auto& o : out.outputs) CHECK(o == std::vector<long long>{-1});
        CHECK(out.total_pulses <= static_cast<std::uint64_t>(6 * n));
    }
}

TEST_CASE("bit layers deliver neighbor bits across relay segments", "[primitives]") {
    // Spec example: n=5, actives {0,2}: p0 returns b2, p2 returns b0.
    std::vector<Trit> bits{Trit::one, Trit::bottom, Trit::zero, Trit::bottom, Trit::bottom};
    std::vector<bool> act{true, false, true, false, false};
    auto out = run_to_quiescence(make_ring(5), make_ccw_bit_send(5, 0, bits, act));
    REQUIRE(out.quiescent);
    CHECK(out.outputs[0] == std::vector<long long>{0});
    CHECK(out.outputs[2] == std::vector<long long>{1});
    CHECK(out.total_pulses <= 30);
}

TEST_CASE("bit layer randomized sweep matches the contraction oracle", "[primitives]") {
    SplitMix64 rng(2024);
    for (int iter = 0; iter < 400; ++iter) {
        const int n = 2 + static_cast<int>(rng.next() % 5);
        const int leader = static_cast<int>(rng.next() % n);
        std::vector<Trit> bits(n);
        std::vector<bool> act(n);
        int n_active = 0;
        for (int p = 0; p < n; ++p) {
            bits[p] = trit_of(static_cast<int>(rng.next() % 3) - 1);
            act[p] = rng.next() % 2 == 0;
            n_active += act[p];
        }
        if (n_active == 0) {
            act[leader] = true; // someone must run the send side
            n_active = 1;
        }
        const bool ccw = rng.next() % 2 == 0;
        RunOptions opt;
        opt.policy.seed = rng.next();
        opt.record_trace = false;
        auto progs = ccw ? make_ccw_bit_send(n, leader, bits, act) : make_cw_bit_send(n, leader, bits, act);
        auto out = run_to_quiescence(make_ring(n), progs, opt);
        REQUIRE(out.quiescent);
        CHECK(out.total_pulses <= static_cast<std::uint64_t>(6 * n));
        auto expect = expected_neighbor_bits(bits, act, ccw ? +1 : -1);
        for (int p = 0; p < n; ++p) {
            if (!act[p]) continue;
            CHECK(out.outputs[p] == std::vector<long long>{static_cast<long long>(expect[p])});
        }
    }
}

TEST_CASE("a leader relay injects the sync pulse and absorbs the termination pulse", "[primitives]") {
    // All-bottom ring where the leader is a relay.
    const int n = 3;
    std::vector<Trit> bits(n, Trit::bottom);
    std::vector<bool> act{false, true, true};
    auto out = run_to_quiescence(make_ring(n), make_ccw_bit_send(n, 0, bits, act));
    REQUIRE(out.quiescent);
    CHECK(out.outputs[1] == std::vector<long long>{-1});
    CHECK(out.outputs[2] == std::vector<long long>{-1});
    std::string why;
    // Terminator is the leader even when it runs the relay side.
    CHECK(check_composable_ending(out, n, 0, 1, &why));
}

TEST_CASE("relay counter ends at -2 after forwarding the termination pulse", "[primitives]") {
    // One relay between two actives, a 0-bit crossing it.
    std::vector<Trit> bits{Trit::zero, Trit::bottom, Trit::zero};
    std::vector<bool> act{true, false, true};
    auto progs = make_ccw_bit_send(3, 0, bits, act);
    detail::Runner runner(make_ring(3), std::move(progs), RunOptions{});
    runner.run_all();
    auto* relay = runner.procs()[1].prog.as<CcwBitRelayProto>();
    REQUIRE(relay != nullptr);
    CHECK(relay->cnt == -2);
}

TEST_CASE("composable ending holds for the bit layer", "[primitives]") {
    auto cfg = ring_cfg(4, 1);
    std::vector<Trit> bits{Trit::one, Trit::zero, Trit::bottom, Trit::one};
    auto out = run_to_quiescence(ring_topology(cfg), make_ccw_bit_send(cfg, bits));
    std::string why;
    CHECK(check_composable_ending(out, 4, 1, 1, &why));
    auto out_cw = run_to_quiescence(ring_topology(cfg), make_cw_bit_send(cfg, bits));
    CHECK(check_composable_ending(out_cw, 4, 1, 0, &why));
}

TEST_CASE("back-to-back compute_or runs never mix pulses", "[primitives]") {
    auto cfg = ring_cfg(3, 0);
    std::vector<std::vector<StageFactory>> stages(2, std::vector<StageFactory>(3));
    for (int s = 0; s < 2; ++s)
        for (int p = 0; p < 3; ++p)
            stages[s][p] = [p](int, const std::vector<long long>&) {
                return Program(ComputeOrProto{p == 0, false});
            };
    auto outs = run_composed(ring_topology(cfg), stages);
    REQUIRE(outs.size() == 2);
    for (auto& o : outs) {
        CHECK(o.total_pulses == 9);
        for (int p = 0; p < 3; ++p) CHECK(o.outputs[p] == std::vector<long long>{0});
    }
}

TEST_CASE("instance tags are invisible to protocol logic", "[primitives]") {
    auto cfg = ring_cfg(4, 0);
    std::vector<bool> inputs{false, true, false, false};
    RunOptions tagged;
    tagged.policy.seed = 5;
    RunOptions constant = tagged;
    constant.constant_instance_tags = true;
    auto a = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs), tagged);
    auto b = run_to_quiescence(ring_topology(cfg), make_compute_or(cfg, inputs), constant);
    CHECK(a.outputs == b.outputs);
    CHECK(a.total_pulses == b.total_pulses);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].kind == b.trace[i].kind);
        CHECK(a.trace[i].process == b.trace[i].process);
        CHECK(a.trace[i].port == b.trace[i].port);
    }
}

TEST_CASE("exhaustive interleavings of compute_or give one fingerprint", "[primitives]") {
    for (int n = 2; n <= 3; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<bool> inputs(n);
            for (int p = 0; p < n; ++p) inputs[p] = (mask >> p) & 1;
            auto cfg = ring_cfg(n, 0);
            auto fps = enumerate_schedules(ring_topology(cfg), make_compute_or(cfg, inputs));
            REQUIRE(fps.size() == 1);
            CHECK(fps.begin()->total_pulses == static_cast<std::uint64_t>(3 * n));
            CHECK(fps.begin()->quiescent);
        }
    }
}
