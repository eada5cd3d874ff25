#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>

#include "mcc/codec.hpp"

namespace mcc {

struct AlphabetViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleRates : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Reproducible message source
//
// Counter-based generator: bit j of stream `tag` under seed s is bit
// (j mod 64) of splitmix64(s * phi ^ tag * psi ^ (j / 64)), so any bit is
// addressable without sequential state and trials replay exactly.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline Bits random_bits(std::uint64_t seed, std::uint64_t tag, long count) {
    Bits out(count);
    std::uint64_t word = 0;
    for (long j = 0; j < count; ++j) {
        if (j % 64 == 0)
            word = splitmix64(seed * 0x9e3779b97f4a7c15ull ^
                              tag * 0xc2b2ae3d27d4eb4full ^
                              static_cast<std::uint64_t>(j / 64));
        out[j] = (word >> (j % 64)) & 1;
    }
    return out;
}

inline MessageVector random_messages(int l, long n, const RateVector& rates,
                                     std::uint64_t seed) {
    MessageVector m;
    m.l = l;
    m.n = n;
    for (int mask : index_order(l))
        m.streams[mask] = random_bits(seed, static_cast<std::uint64_t>(mask),
                                      exact_bits(n, rates.at(mask)));
    return m;
}

// ---------------------------------------------------------------------------
// The deterministic broadcast channel
//
// Seven noiseless parallel links, one per message index; receiver i
// observes exactly the links whose index contains i. A channel use moves
// one fixed-width symbol per link; widths are scale*R*_I bits with scale
// the lcm of the rate denominators, so n uses carry exactly n*R*_I bits.
// ---------------------------------------------------------------------------

struct DeterministicBC {
    RateVector r_star;
    long n = 0;      // channel uses per block
    long scale = 1;  // symbol width divisor: width_I = scale * R*_I

    DeterministicBC(RateVector rs, long block) : r_star(std::move(rs)), n(block) {
        if (!r_star.nonnegative()) throw NegativeRate("channel rates must be >= 0");
        QVec v = r_star.as_qvec();
        scale = denominator_lcm(v.begin(), v.end()).convert_to<long>();
        if (n % scale != 0)
            throw NonIntegralSegment("block length must be a multiple of the rate "
                                     "denominator lcm");
    }

    long uses() const { return n / scale; }
    long width(int mask) const { return exact_bits(scale, r_star.at(mask)); }
};

using LinkSymbols = std::map<int, Bits>; // link mask -> one symbol

inline std::array<LinkSymbols, 3> bc_transmit(const DeterministicBC& ch,
                                              const LinkSymbols& x) {
    for (int mask : index_order(ch.r_star.l)) {
        auto it = x.find(mask);
        if (it == x.end() ||
            static_cast<long>(it->second.size()) != ch.width(mask))
            throw AlphabetViolation("input symbol missing or off-width on link " +
                                    index_label(mask));
    }
    std::array<LinkSymbols, 3> y;
    for (int i = 1; i <= ch.r_star.l; ++i)
        for (int mask : index_order(ch.r_star.l))
            if (mask & (1 << (i - 1))) y[i - 1][mask] = x.at(mask);
    return y;
}

// ---------------------------------------------------------------------------
// The coordination multiple access channel
//
// Private links pass through. Every shared link compares the symbols
// offered by its transmitters and outputs the common value only when all
// agree; otherwise an erasure. The erasure is a tagged value beside the
// bit alphabet, not a reserved pattern.
// ---------------------------------------------------------------------------

struct CoordinationMAC {
    RateVector r_star;
    int k = 1;
    long n = 0;      // channel uses per block
    long scale = 1;  // width_I = k * scale * R*_I bits per use

    CoordinationMAC(RateVector rs, int k_, long block)
        : r_star(std::move(rs)), k(k_), n(block) {
        if (!r_star.nonnegative()) throw NegativeRate("channel rates must be >= 0");
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        QVec v = r_star.as_qvec();
        scale = denominator_lcm(v.begin(), v.end()).convert_to<long>();
        if (n % (scale * k) != 0)
            throw NonIntegralSegment("block length must be a multiple of k times the "
                                     "rate denominator lcm");
    }

    long uses() const { return n / (static_cast<long>(k) * scale); }
    long width(int mask) const { return exact_bits(k * scale, r_star.at(mask)); }
};

// Per-transmitter inputs: transmitter t offers a symbol on every link it
// participates in (mask containing t).
using MacOutput = std::map<int, std::optional<Bits>>; // nullopt = erasure

inline MacOutput mac_transmit(const CoordinationMAC& ch,
                              const std::array<LinkSymbols, 3>& x) {
    MacOutput y;
    for (int mask : index_order(ch.r_star.l)) {
        std::vector<const Bits*> offered;
        for (int t = 1; t <= ch.r_star.l; ++t) {
            if (!(mask & (1 << (t - 1)))) continue;
            auto it = x[t - 1].find(mask);
            if (it == x[t - 1].end() ||
                static_cast<long>(it->second.size()) != ch.width(mask))
                throw AlphabetViolation("transmitter " + std::to_string(t) +
                                        " symbol missing or off-width on link " +
                                        index_label(mask));
            offered.push_back(&it->second);
        }
        bool agree = true;
        for (std::size_t i = 1; i < offered.size(); ++i)
            if (*offered[i] != *offered[0]) agree = false;
        if (agree)
            y[mask] = *offered[0];
        else
            y[mask] = std::nullopt;
    }
    return y;
}

// ---------------------------------------------------------------------------
// End-to-end harness
// ---------------------------------------------------------------------------

struct TrialReport {
    Channel channel = Channel::BC;
    long n = 0;
    long uses = 0;
    std::uint64_t seed = 0;
    // (receiver, message mask) -> bit errors; receiver 0 is the MAC sink.
    std::map<std::pair<int, int>, long> bit_errors;
    long erasures = 0;
    RateVector achieved;
    long total_errors() const {
        long s = 0;
        for (const auto& [k, v] : bit_errors) s += v;
        return s;
    }
    bool operator==(const TrialReport&) const = default;
};

namespace detail {

inline Bits chop(const Bits& stream, long use, long width) {
    return slice(stream, use * width, width);
}

// Wire streams must fit their links; shorter streams ride zero-padded.
inline Bits fit_to_capacity(const Bits& wire, long capacity, int mask) {
    if (static_cast<long>(wire.size()) > capacity)
        throw InfeasibleRates("wire stream " + index_label(mask) +
                              " overflows its link");
    Bits padded = wire;
    padded.resize(capacity, 0);
    return padded;
}

} // namespace detail

// Runs message generation, composite encoding, per-use transmission and
// per-receiver decoding; error counts are exact, never estimated.
inline TrialReport run_end_to_end(const DeterministicBC& ch, const Schedule& schedule,
                                  std::uint64_t seed) {
    if (schedule.channel != Channel::BC)
        throw InfeasibleRates("broadcast channel needs a broadcast schedule");
    const int l = ch.r_star.l;
    CompositeCodec codec{schedule, ch.r_star};
    RateVector rate = schedule_rate(schedule, ch.r_star);

    MessageVector m = random_messages(l, ch.n, rate, seed);
    MessageVector wire = codec.encode(m);

    TrialReport report;
    report.channel = Channel::BC;
    report.n = ch.n;
    report.uses = ch.uses();
    report.seed = seed;

    std::map<int, Bits> carried;
    for (int mask : index_order(l))
        carried[mask] = detail::fit_to_capacity(wire.streams.at(mask),
                                                exact_bits(ch.n, ch.r_star.at(mask)),
                                                mask);

    std::array<std::map<int, Bits>, 3> received;
    for (long u = 0; u < ch.uses(); ++u) {
        LinkSymbols x;
        for (int mask : index_order(l))
            x[mask] = detail::chop(carried[mask], u, ch.width(mask));
        auto y = bc_transmit(ch, x);
        for (int i = 1; i <= l; ++i)
            for (auto& [mask, sym] : y[i - 1]) append(received[i - 1][mask], sym);
    }

    for (int i = 1; i <= l; ++i) {
        MessageVector w_hat;
        w_hat.l = l;
        w_hat.n = ch.n;
        for (auto& [mask, bits] : received[i - 1])
            w_hat.streams[mask] = slice(bits, 0, wire.streams.at(mask).size());
        MessageVector decoded = codec.decode(i, w_hat);
        for (auto& [mask, bits] : decoded.streams) {
            const Bits& sent = m.streams.at(mask);
            long errs = 0;
            if (bits.size() != sent.size())
                errs = static_cast<long>(std::max(bits.size(), sent.size()));
            else
                for (std::size_t j = 0; j < bits.size(); ++j) errs += bits[j] != sent[j];
            report.bit_errors[{i, mask}] = errs;
        }
    }

    report.achieved = RateVector(l);
    for (int mask : index_order(l)) {
        bool all_ok = true;
        for (int i = 1; i <= l; ++i)
            if ((mask & (1 << (i - 1))) && report.bit_errors[{i, mask}] != 0)
                all_ok = false;
        report.achieved.at(mask) =
            all_ok ? Rational(static_cast<long>(m.streams.at(mask).size()), ch.n)
                   : Rational(0);
    }
    return report;
}

inline TrialReport run_end_to_end(const CoordinationMAC& ch, const Schedule& schedule,
                                  std::uint64_t seed) {
    if (schedule.channel != Channel::MAC)
        throw InfeasibleRates("coordination channel needs a MAC schedule");
    const int l = ch.r_star.l;
    CompositeCodec codec{schedule, ch.r_star};
    RateVector rate = schedule_rate(schedule, ch.r_star);

    MessageVector m = random_messages(l, ch.n, rate, seed);
    MessageVector wire = codec.encode(m);

    TrialReport report;
    report.channel = Channel::MAC;
    report.n = ch.n;
    report.uses = ch.uses();
    report.seed = seed;

    std::map<int, Bits> carried;
    for (int mask : index_order(l))
        carried[mask] = detail::fit_to_capacity(wire.streams.at(mask),
                                                exact_bits(ch.n, ch.r_star.at(mask)),
                                                mask);

    // Every transmitter on a shared link can compute the link's wire
    // stream from the messages it holds, so all offer identical symbols.
    std::map<int, Bits> received;
    bool erased_link = false;
    for (long u = 0; u < ch.uses(); ++u) {
        std::array<LinkSymbols, 3> x;
        for (int mask : index_order(l)) {
            Bits sym = detail::chop(carried[mask], u, ch.width(mask));
            for (int t = 1; t <= l; ++t)
                if (mask & (1 << (t - 1))) x[t - 1][mask] = sym;
        }
        MacOutput y = mac_transmit(ch, x);
        for (auto& [mask, sym] : y) {
            if (!sym) {
                ++report.erasures;
                erased_link = true;
                continue;
            }
            append(received[mask], *sym);
        }
    }

    if (!erased_link) {
        MessageVector w_hat;
        w_hat.l = l;
        w_hat.n = ch.n;
        for (int mask : index_order(l))
            w_hat.streams[mask] = slice(received[mask], 0, wire.streams.at(mask).size());
        MessageVector decoded = codec.decode(0, w_hat);
        for (auto& [mask, bits] : decoded.streams) {
            const Bits& sent = m.streams.at(mask);
            long errs = 0;
            if (bits.size() != sent.size())
                errs = static_cast<long>(std::max(bits.size(), sent.size()));
            else
                for (std::size_t j = 0; j < bits.size(); ++j) errs += bits[j] != sent[j];
            report.bit_errors[{0, mask}] = errs;
        }
    } else {
        for (int mask : index_order(l))
            report.bit_errors[{0, mask}] =
                static_cast<long>(m.streams.at(mask).size());
    }

    report.achieved = RateVector(l);
    for (int mask : index_order(l))
        report.achieved.at(mask) =
            report.bit_errors[{0, mask}] == 0
                ? Rational(static_cast<long>(m.streams.at(mask).size()), ch.n)
                : Rational(0);
    return report;
}

// ---------------------------------------------------------------------------
// Coordination-link statistics
// ---------------------------------------------------------------------------

struct CoordinationStats {
    long trials = 0;
    long matches = 0;
    Rational empirical;          // matches / trials
    Rational expected;           // 2^-(k*numerator)
    bool operator==(const CoordinationStats&) const = default;
};

// Fraction of uses on which two independent uniform inputs agree on a
// width k*numerator link.
inline CoordinationStats coordination_stats(int k, int numerator, long trials,
                                            std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const long width = static_cast<long>(k) * numerator;
    CoordinationStats st;
    st.trials = trials;
    for (long t = 0; t < trials; ++t) {
        Bits a = random_bits(seed, 2 * static_cast<std::uint64_t>(t), width);
        Bits b = random_bits(seed, 2 * static_cast<std::uint64_t>(t) + 1, width);
        if (a == b) ++st.matches;
    }
    st.empirical = Rational(st.matches, trials);
    st.expected = Rational(Int(1), Int(1) << width);
    return st;
}

} // namespace mcc
