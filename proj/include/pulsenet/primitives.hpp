#pragma once

#include <optional>
#include <vector>

#include "pulsenet/core.hpp"
#include "pulsenet/ring.hpp"

// Bit-level building blocks: directional single-bit transfer with relays,
// and global OR with the composability barrier.

namespace pulsenet {

// Global OR over one boolean per process. The leader starts a wave whose
// direction encodes its own input; every execution uses exactly 3n pulses
// (2n for the OR waves, n for the final clockwise barrier) and at most one
// pulse is ever in transit.
struct ComputeOrProto : ProtoBase {
    bool leader = false;
    bool input = false;
    bool ans = true;
    Port q = -1;
    Port u = -1;

    ComputeOrProto() = default;
    ComputeOrProto(bool is_leader, bool in) : leader(is_leader), input(in) {}

    Wait resume(std::optional<Port> ev, Effects& fx) {
        CO_BEGIN();
        if (leader) send(fx, input ? 1 : 0);
        CO_RECV_ANY(q);
        if (leader) {
            if (q == 1) {
                // All-false wave came back; second wave commits everyone.
                send(fx, 0);
                CO_RECV_ON(1);
                ans = false;
            } else {
                send(fx, input ? 0 : 1);
                CO_RECV_ON(1);
            }
        } else {
            if (input) {
                send(fx, 1);
                CO_RECV_ON(1 - q);
                send(fx, 0);
            } else {
                send(fx, 1 - q);
                CO_RECV_ANY(u);
                send(fx, 1 - u);
                if (u == 1 && q == 1) ans = false;
            }
        }
        // Barrier wave for the composable ending; leader returns last.
        if (leader) {
            send(fx, 1);
            CO_RECV_ON(0);
        } else {
            CO_RECV_ON(0);
            send(fx, 1);
        }
        CO_END();
    }

    std::vector<long long> output() const { return {ans ? 1 : 0}; }
    std::vector<long long> state_key() const {
        return {pc_, leader, input, ans, q, u};
    }
};

// Sends `bit` counter-clockwise (on port 0) and returns the bit of the
// clockwise neighbor. kappa(bit) pulses encode the value; the leader also
// starts the clockwise synchronization wave. Terminator = leader, wave
// direction d = 1.
struct CcwBitSendProto : ProtoBase {
    bool leader = false;
    Trit bit = Trit::bottom;
    int cnt = 0;
    int in = 0;
    Port q = -1;
    Trit rcvd = Trit::bottom;

    CcwBitSendProto() = default;
    CcwBitSendProto(bool is_leader, Trit b) : leader(is_leader), bit(b) {}

    Wait resume(std::optional<Port> ev, Effects& fx) {
        CO_BEGIN();
        if (bit == Trit::zero) {
            send(fx, 0);
            cnt = 1;
        } else if (bit == Trit::one) {
            send(fx, 0);
            send(fx, 0);
            cnt = 2;
        } else {
            cnt = 0;
        }
        if (leader) send(fx, 1);
        in = 0;
        while (cnt >= 0) {
            CO_RECV_ANY(q);
            if (q == 0) {
                cnt -= 1;
            } else {
                send(fx, 1);
                in += 1;
            }
        }
        send(fx, 1); // transmission-end / termination wave hop
        if (leader) {
            CO_RECV_ON(0);
        } else {
            do {
                CO_RECV_ANY(q);
                if (q == 1) in += 1;
                send(fx, 1); // ack late bits, or forward the wave
            } while (q != 0);
        }
        rcvd = decode_in(in);
        CO_END();
    }

    std::vector<long long> output() const { return {static_cast<long long>(rcvd)}; }
    std::vector<long long> state_key() const {
        return {pc_, leader, static_cast<int>(bit), cnt, in, q};
    }

private:
    static Trit decode_in(int in) {
        switch (in) {
        case 0: return Trit::bottom;
        case 1: return Trit::zero;
        case 2: return Trit::one;
        default: throw ProcessFault("bit-send received more pulses than any trit encodes");
        }
    }
};

// Relay counterpart of CcwBitSendProto: forwards every pulse to the opposite
// port; cnt goes +1 on port-1 receipts and -1 on port-0 receipts. A leader
// relay injects the synchronization pulse and suppresses the final forward
// when cnt = -1.
struct CcwBitRelayProto : ProtoBase {
    bool leader = false;
    int cnt = 0;
    Port q = -1;

    CcwBitRelayProto() = default;
    explicit CcwBitRelayProto(bool is_leader) : leader(is_leader) {}

    Wait resume(std::optional<Port> ev, Effects& fx) {
        CO_BEGIN();
        cnt = 0;
        if (leader) send(fx, 1);
        while (cnt >= -1) {
            CO_RECV_ANY(q);
            if (!(leader && q == 0 && cnt == -1)) send(fx, 1 - q);
            if (q == 1) cnt += 1;
            else cnt -= 1;
        }
        CO_END();
    }

    std::vector<long long> output() const { return {}; }
    std::vector<long long> state_key() const { return {pc_, leader, cnt, q}; }
};

// Port-mirrored variants: bits travel clockwise (port 1), the wave travels
// counter-clockwise, and the returned bit is the counter-clockwise
// neighbor's.
struct CwBitSendProto : ProtoBase {
    bool leader = false;
    Trit bit = Trit::bottom;
    int cnt = 0;
    int in = 0;
    Port q = -1;
    Trit rcvd = Trit::bottom;

    CwBitSendProto() = default;
    CwBitSendProto(bool is_leader, Trit b) : leader(is_leader), bit(b) {}

    Wait resume(std::optional<Port> ev, Effects& fx) {
        CO_BEGIN();
        if (bit == Trit::zero) {
            send(fx, 1);
            cnt = 1;
        } else if (bit == Trit::one) {
            send(fx, 1);
            send(fx, 1);
            cnt = 2;
        } else {
            cnt = 0;
        }
        if (leader) send(fx, 0);
        in = 0;
        while (cnt >= 0) {
            CO_RECV_ANY(q);
            if (q == 1) {
                cnt -= 1;
            } else {
                send(fx, 0);
                in += 1;
            }
        }
        send(fx, 0);
        if (leader) {
            CO_RECV_ON(1);
        } else {
            do {
                CO_RECV_ANY(q);
                if (q == 0) in += 1;
                send(fx, 0);
            } while (q != 1);
        }
        rcvd = decode_in(in);
        CO_END();
    }

    std::vector<long long> output() const { return {static_cast<long long>(rcvd)}; }
    std::vector<long long> state_key() const {
        return {pc_, leader, static_cast<int>(bit), cnt, in, q};
    }

private:
    static Trit decode_in(int in) {
        switch (in) {
        case 0: return Trit::bottom;
        case 1: return Trit::zero;
        case 2: return Trit::one;
        default: throw ProcessFault("bit-send received more pulses than any trit encodes");
        }
    }
};

struct CwBitRelayProto : ProtoBase {
    bool leader = false;
    int cnt = 0;
    Port q = -1;

    CwBitRelayProto() = default;
    explicit CwBitRelayProto(bool is_leader) : leader(is_leader) {}

    Wait resume(std::optional<Port> ev, Effects& fx) {
        CO_BEGIN();
        cnt = 0;
        if (leader) send(fx, 0);
        while (cnt >= -1) {
            CO_RECV_ANY(q);
            if (!(leader && q == 1 && cnt == -1)) send(fx, 1 - q);
            if (q == 0) cnt += 1;
            else cnt -= 1;
        }
        CO_END();
    }

    std::vector<long long> output() const { return {}; }
    std::vector<long long> state_key() const { return {pc_, leader, cnt, q}; }
};

// ---------------------------------------------------------------------------
// Program builders

inline std::vector<Program> make_compute_or(const RingConfig& cfg, const std::vector<bool>& inputs) {
    cfg.validate();
    if (static_cast<int>(inputs.size()) != cfg.n) throw ConfigError("compute_or: inputs size mismatch");
    std::vector<Program> out;
    out.reserve(cfg.n);
    for (int p = 0; p < cfg.n; ++p) out.emplace_back(ComputeOrProto{p == cfg.leader, inputs[p]});
    return out;
}

// Active processes run the bit-send side, all others the relay side. The
// explicit active set (unlike RingConfig's mask) may leave the leader as a
// relay; Alg. 6's sync-injection path covers that case.
inline std::vector<Program> make_ccw_bit_send(int n, int leader, const std::vector<Trit>& bits,
                                              const std::vector<bool>& actives) {
    if (static_cast<int>(bits.size()) != n || static_cast<int>(actives.size()) != n)
        throw ConfigError("bit_send: bits/actives size mismatch");
    std::vector<Program> out;
    out.reserve(n);
    for (int p = 0; p < n; ++p) {
        const bool lead = p == leader;
        if (actives[p])
            out.emplace_back(CcwBitSendProto{lead, bits[p]});
        else
            out.emplace_back(CcwBitRelayProto{lead});
    }
    return out;
}

inline std::vector<Program> make_cw_bit_send(int n, int leader, const std::vector<Trit>& bits,
                                             const std::vector<bool>& actives) {
    if (static_cast<int>(bits.size()) != n || static_cast<int>(actives.size()) != n)
        throw ConfigError("bit_send: bits/actives size mismatch");
    std::vector<Program> out;
    out.reserve(n);
    for (int p = 0; p < n; ++p) {
        const bool lead = p == leader;
        if (actives[p])
            out.emplace_back(CwBitSendProto{lead, bits[p]});
        else
            out.emplace_back(CwBitRelayProto{lead});
    }
    return out;
}

inline std::vector<Program> make_ccw_bit_send(const RingConfig& cfg, const std::vector<Trit>& bits) {
    cfg.validate();
    std::vector<bool> actives(cfg.n);
    for (int p = 0; p < cfg.n; ++p) actives[p] = cfg.is_active(p);
    return make_ccw_bit_send(cfg.n, cfg.leader, bits, actives);
}

inline std::vector<Program> make_cw_bit_send(const RingConfig& cfg, const std::vector<Trit>& bits) {
    cfg.validate();
    std::vector<bool> actives(cfg.n);
    for (int p = 0; p < cfg.n; ++p) actives[p] = cfg.is_active(p);
    return make_cw_bit_send(cfg.n, cfg.leader, bits, actives);
}

} // namespace pulsenet
