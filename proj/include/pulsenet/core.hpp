#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <typeinfo>
#include <vector>

// Core vocabulary for content-oblivious pulse protocols: ports, trits,
// resumable process programs and the coroutine-style macros they are
// written with.

namespace pulsenet {

using Port = int;

// A trit is the three-valued payload of the bit-sending layer.
// kappa() gives its pulse encoding: bottom -> 0 pulses, 0 -> 1, 1 -> 2.
enum class Trit : int { bottom = -1, zero = 0, one = 1 };

inline int kappa(Trit t) {
    switch (t) {
    case Trit::bottom: return 0;
    case Trit::zero: return 1;
    case Trit::one: return 2;
    }
    return 0;
}

inline Trit trit_of(int v) {
    if (v < -1 || v > 1) throw std::invalid_argument("trit_of: value out of range");
    return static_cast<Trit>(v);
}

// ---------------------------------------------------------------------------
// Errors

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : SimError { using SimError::SimError; };
struct BudgetExhausted : SimError { using SimError::SimError; };
struct ProcessFault : SimError { using SimError::SimError; };
struct CrossInstanceConsumption : SimError { using SimError::SimError; };
struct StateSpaceTooLarge : SimError { using SimError::SimError; };
struct NoActiveProcess : ConfigError { using ConfigError::ConfigError; };
struct NotAPermutationOfRange : ConfigError { using ConfigError::ConfigError; };
struct MalformedTraversalPair : ProcessFault { using ProcessFault::ProcessFault; };
struct ColorCollision : ProcessFault { using ProcessFault::ProcessFault; };
struct RoundLimitExceeded : SimError { using SimError::SimError; };
struct DisconnectedGraph : ConfigError { using ConfigError::ConfigError; };
struct NotTwoEdgeConnected : ConfigError { using ConfigError::ConfigError; };
struct UncoveredEdge : SimError { using SimError::SimError; };
struct UnknownProtocol : ConfigError { using ConfigError::ConfigError; };

// ---------------------------------------------------------------------------
// Process programs
//
// A program is a resumable state machine. The engine resumes it with the
// port a pulse was consumed on (or nullopt for the initial activation) and
// the program runs until it either blocks on a receive or halts. Sends
// performed during one activation are collected in Effects.

struct Effects {
    std::vector<Port> sends;
};

struct Wait {
    enum class Kind { any, on_port, done };
    Kind kind = Kind::done;
    Port port = -1;

    static Wait any() { return Wait{Kind::any, -1}; }
    static Wait on(Port p) { return Wait{Kind::on_port, p}; }
    static Wait done() { return Wait{Kind::done, -1}; }

    bool is_done() const { return kind == Kind::done; }
    bool accepts(Port p) const {
        return kind == Kind::any || (kind == Kind::on_port && port == p);
    }
};

namespace detail {

template <typename T>
concept HasStateKey = requires(const T& t) {
    { t.state_key() } -> std::convertible_to<std::vector<long long>>;
};

struct ProgramConcept {
    virtual ~ProgramConcept() = default;
    virtual Wait resume(std::optional<Port> ev, Effects& fx) = 0;
    virtual std::vector<long long> output() const = 0;
    virtual bool has_state_key() const = 0;
    virtual std::vector<long long> state_key() const = 0;
    virtual std::unique_ptr<ProgramConcept> clone() const = 0;
    virtual const std::type_info& type() const = 0;
    virtual const void* self() const = 0;
};

template <typename T>
struct ProgramModel final : ProgramConcept {
    T impl;
    explicit ProgramModel(T v) : impl(std::move(v)) {}
    Wait resume(std::optional<Port> ev, Effects& fx) override { return impl.resume(ev, fx); }
    std::vector<long long> output() const override { return impl.output(); }
    bool has_state_key() const override { return HasStateKey<T>; }
    std::vector<long long> state_key() const override {
        if constexpr (HasStateKey<T>) {
            return impl.state_key();
        } else {
            throw StateSpaceTooLarge("program type does not expose a state key");
        }
    }
    std::unique_ptr<ProgramConcept> clone() const override {
        return std::make_unique<ProgramModel<T>>(impl);
    }
    const std::type_info& type() const override { return typeid(T); }
    const void* self() const override { return &impl; }
};

} // namespace detail

// Type-erased, copyable process program.
class Program {
public:
    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, Program>)
    Program(T impl) : p_(std::make_unique<detail::ProgramModel<std::decay_t<T>>>(std::move(impl))) {}

    Program(const Program& o) : p_(o.p_->clone()) {}
    Program(Program&&) noexcept = default;
    Program& operator=(const Program& o) {
        p_ = o.p_->clone();
        return *this;
    }
    Program& operator=(Program&&) noexcept = default;

    Wait resume(std::optional<Port> ev, Effects& fx) { return p_->resume(ev, fx); }
    std::vector<long long> output() const { return p_->output(); }
    bool has_state_key() const { return p_->has_state_key(); }
    std::vector<long long> state_key() const { return p_->state_key(); }

    template <typename T>
    const T* as() const {
        return p_->type() == typeid(T) ? static_cast<const T*>(p_->self()) : nullptr;
    }

private:
    std::unique_ptr<detail::ProgramConcept> p_;
};

// Base for protocol state machines written with the CO_* macros below.
// All protocol state lives in named members so programs stay copyable and
// hashable; pc_ records the suspension point.
struct ProtoBase {
    int pc_ = 0;

    bool halted() const { return pc_ == -1; }

protected:
    void send(Effects& fx, Port p) const { fx.sends.push_back(p); }
};

// Protothread macros. A program body looks like
//   Wait resume(std::optional<Port> ev, Effects& fx) {
//       CO_BEGIN();
//       ...
//       CO_END();
//   }
// Receives suspend; CO_CALL forwards deliveries to a child program until it
// halts. Local state that must survive a suspension belongs in members.
#define CO_BEGIN()                                                                 \
    switch (pc_) {                                                                 \
    case 0:

#define CO_END()                                                                   \
        break;                                                                     \
    default:                                                                       \
        throw ::pulsenet::ProcessFault("resume after halt");                       \
    }                                                                              \
    pc_ = -1;                                                                      \
    return ::pulsenet::Wait::done()

// Receive on any port; qvar is assigned the arrival port.
#define CO_RECV_ANY(qvar)                                                          \
    do {                                                                           \
        pc_ = __LINE__;                                                            \
        return ::pulsenet::Wait::any();                                            \
    case __LINE__:                                                                 \
        (qvar) = *ev;                                                              \
    } while (0)

// Receive on a specific port; pulses on other ports stay buffered.
#define CO_RECV_ON(portexpr)                                                       \
    do {                                                                           \
        pc_ = __LINE__;                                                            \
        return ::pulsenet::Wait::on(portexpr);                                     \
    case __LINE__:;                                                                \
    } while (0)

// Run a child program (a member) to completion, forwarding deliveries.
#define CO_CALL(child)                                                             \
    do {                                                                           \
        pc_ = __LINE__;                                                            \
        ev.reset();                                                                \
    case __LINE__: {                                                               \
        ::pulsenet::Wait w_ = (child).resume(ev, fx);                              \
        if (!w_.is_done()) return w_;                                              \
    }                                                                              \
    } while (0)

// ---------------------------------------------------------------------------
// Bit-string helpers shared by the protocols.
//
// Natural numbers encode MSB-first without leading zeros; 0 encodes as "0"
// (length 1). The empty string is not a valid encoding.

inline int bit_length(long long v) {
    if (v < 0) throw std::invalid_argument("bit_length: negative");
    int len = 1;
    while (v >>= 1) ++len;
    return len;
}

inline std::vector<int> bits_msb_first(long long v) {
    const int len = bit_length(v);
    std::vector<int> bits(len);
    for (int i = 0; i < len; ++i) bits[i] = static_cast<int>((v >> (len - 1 - i)) & 1);
    return bits;
}

inline std::vector<int> bits_lsb_first(long long v) {
    const int len = bit_length(v);
    std::vector<int> bits(len);
    for (int i = 0; i < len; ++i) bits[i] = static_cast<int>((v >> i) & 1);
    return bits;
}

inline long long value_from_msb_first(const std::vector<int>& bits) {
    long long v = 0;
    for (int b : bits) v = (v << 1) | (b & 1);
    return v;
}

inline long long value_from_lsb_first(const std::vector<int>& bits) {
    long long v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) v |= static_cast<long long>(bits[i] & 1) << i;
    return v;
}

} // namespace pulsenet
