#pragma once

// Configuration validation and every derived scheme constant: dropout
// thresholds, the block count J, the pole/noise repetition period, the field,
// and the deterministic evaluation-point and pole assignment. Everything here
// is immutable after derivation.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "acsarw/field.hpp"

namespace acsarw {

// Raw user-facing knobs, before validation.
struct RawConfig {
    std::uint32_t servers = 0;            // N: simulated servers
    std::uint32_t submodels = 0;          // K: independently updatable submodels
    std::uint32_t storage_security = 0;   // X: colluding servers the storage resists
    std::uint32_t privacy = 0;            // T: colluding servers the query index resists
    std::uint32_t increment_security = 0; // X_delta: colluders the increments resist
    std::uint32_t partitions = 0;         // K_c: data symbols packed per storage block
    std::uint32_t scale = 1;              // xi: multiplies the minimal submodel length
    std::uint64_t modulus = 0;            // q; 0 = smallest admissible prime
    std::uint64_t seed = 0;               // master RNG seed
};

// One schedule entry: which servers miss the read phase and which miss the
// write phase of a round.
struct RoundDropouts {
    std::vector<std::uint32_t> read;
    std::vector<std::uint32_t> write;
};

struct RoundParams {
    std::uint32_t t = 0;
    std::vector<std::uint32_t> read_dropouts;  // sorted 1-based server indices
    std::vector<std::uint32_t> write_dropouts; // sorted 1-based server indices
    std::uint32_t read_batch = 0;        // desired symbols packed per answer entry
    std::uint32_t write_batch = 0;       // increment symbols packed per upload entry
    std::uint32_t num_read_batches = 0;  // J / read_batch
    std::uint32_t num_write_batches = 0; // J / write_batch

    bool read_available(std::uint32_t n) const {
        return !std::binary_search(read_dropouts.begin(), read_dropouts.end(), n);
    }
    bool write_available(std::uint32_t n) const {
        return !std::binary_search(write_dropouts.begin(), write_dropouts.end(), n);
    }
};

class SystemParams {
public:
    RawConfig cfg;
    std::uint32_t read_threshold = 0;  // round feasible iff |read dropouts| < this
    std::uint32_t write_threshold = 0; // round feasible iff |write dropouts| < this
    std::uint32_t cycle = 0;           // poles and query noise repeat with this period;
                                       // also the compact query height
    std::uint32_t blocks = 0;          // J: storage blocks per server
    std::uint32_t length = 0;          // L = J * K_c: symbols per submodel
    Field field;
    std::vector<Fe> alphas;     // server evaluation points, alphas[n-1] for server n
    std::vector<Fe> pole_seeds; // the max(cycle, K_c) distinct pole constants
    std::vector<Fe> poles;      // blocks x partitions table, row-major

    SystemParams() : field(2) {}

    Fe alpha(std::uint32_t n) const { return alphas.at(n - 1); }
    // Pole of block j (1-based), partition slot i (1-based).
    Fe pole(std::uint32_t j, std::uint32_t i) const {
        return poles.at(std::size_t(j - 1) * cfg.partitions + (i - 1));
    }
    std::uint32_t recovery_size() const { return cfg.partitions + cfg.storage_security; }
    std::uint64_t min_modulus() const {
        return std::uint64_t(cfg.servers) + std::max(cycle, cfg.partitions);
    }
};

// Pole table: the cyclic assignment that guarantees (a) within any window of
// up to `cycle` consecutive rows each column's poles are distinct, and
// (b) within each row all partitions' poles are distinct. When cycle >= K_c
// the base pattern is the first K_c columns of the cycle x cycle
// left-circulant matrix of the seeds; otherwise the first `cycle` rows of the
// K_c x K_c right-circulant matrix. The base pattern repeats every `cycle`
// rows.
inline std::vector<Fe> pole_assignment(std::uint32_t cycle, std::uint32_t partitions,
                                       std::uint32_t blocks, const std::vector<Fe>& seeds) {
    std::vector<Fe> table;
    table.reserve(std::size_t(blocks) * partitions);
    for (std::uint32_t j = 1; j <= blocks; ++j) {
        const std::uint32_t u = (j - 1) % cycle; // row of the base pattern, 0-based
        for (std::uint32_t i = 0; i < partitions; ++i) {
            std::uint32_t s;
            if (cycle >= partitions) {
                s = (u + cycle - i % cycle) % cycle; // left-circulant: seed[(u - i) mod cycle]
            } else {
                s = (i + partitions - u % partitions) % partitions; // right-circulant
            }
            table.push_back(seeds.at(s));
        }
    }
    return table;
}

inline SystemParams derive(const RawConfig& raw) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (raw.servers < 1 || raw.submodels < 1 || raw.storage_security < 1 || raw.privacy < 1 ||
        raw.partitions < 1 || raw.scale < 1)
        fail("N, K, X, T, K_c and xi must all be >= 1");
    if (raw.storage_security < raw.increment_security + raw.privacy)
        fail("infeasible write side: X must be >= X_delta + T (X=" +
             std::to_string(raw.storage_security) + ", X_delta=" + std::to_string(raw.increment_security) +
             ", T=" + std::to_string(raw.privacy) + ")");
    if (raw.servers < raw.partitions + raw.storage_security + raw.privacy)
        fail("infeasible read side: N must be >= K_c + X + T (N=" + std::to_string(raw.servers) +
             ", K_c=" + std::to_string(raw.partitions) + ", X=" + std::to_string(raw.storage_security) +
             ", T=" + std::to_string(raw.privacy) + ")");

    SystemParams p;
    p.cfg = raw;
    p.read_threshold =
        raw.servers - (raw.partitions + raw.storage_security + raw.privacy - 1);
    p.write_threshold =
        raw.storage_security - (raw.increment_security + raw.privacy - 1);
    p.cycle = std::max(p.read_threshold, p.write_threshold);

    // J = xi * lcm(1..cycle); every feasible batch size divides it.
    std::uint64_t l = 1;
    for (std::uint32_t i = 2; i <= p.cycle; ++i) l = std::lcm<std::uint64_t>(l, i);
    std::uint64_t blocks64 = std::uint64_t(raw.scale) * l;
    if (blocks64 * raw.partitions > (std::uint64_t(1) << 31))
        fail("xi too large: L = " + std::to_string(blocks64 * raw.partitions) + " exceeds 2^31");
    p.blocks = static_cast<std::uint32_t>(blocks64);
    p.length = p.blocks * raw.partitions;

    const std::uint64_t qmin =
        std::uint64_t(raw.servers) + std::max(p.cycle, raw.partitions);
    std::uint64_t q = raw.modulus == 0 ? next_prime_at_least(qmin) : raw.modulus;
    if (q < qmin)
        fail("field too small: q=" + std::to_string(q) + " but the scheme needs q >= N + max(" +
             std::to_string(p.cycle) + ", " + std::to_string(raw.partitions) + ") = " +
             std::to_string(qmin));
    p.field = Field(q); // rejects composite q
    p.cfg.modulus = q;

    // Deterministic distinct evaluation points: server n gets n, pole seed u
    // gets N + u. All N + max(cycle, K_c) of them are distinct mod q because
    // q >= N + max(cycle, K_c).
    p.alphas.reserve(raw.servers);
    for (std::uint32_t n = 1; n <= raw.servers; ++n) p.alphas.push_back(p.field.make(n));
    const std::uint32_t nseeds = std::max(p.cycle, raw.partitions);
    p.pole_seeds.reserve(nseeds);
    for (std::uint32_t u = 1; u <= nseeds; ++u)
        p.pole_seeds.push_back(p.field.make(raw.servers + u));
    p.poles = pole_assignment(p.cycle, raw.partitions, p.blocks, p.pole_seeds);
    return p;
}

// Validate a dropout set: 1-based indices, strictly ascending after sort, all
// within [1, N].
inline std::vector<std::uint32_t> normalize_dropouts(std::vector<std::uint32_t> set,
                                                     std::uint32_t servers,
                                                     const char* which) {
    std::sort(set.begin(), set.end());
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] < 1 || set[i] > servers)
            throw ConfigError(std::string(which) + " dropout index " + std::to_string(set[i]) +
                              " outside [1, " + std::to_string(servers) + "]");
        if (i > 0 && set[i] == set[i - 1])
            throw ConfigError(std::string(which) + " dropout set repeats server " +
                              std::to_string(set[i]));
    }
    return set;
}

inline RoundParams round_params(const SystemParams& p, std::uint32_t t,
                                std::vector<std::uint32_t> read_dropouts,
                                std::vector<std::uint32_t> write_dropouts) {
    RoundParams r;
    r.t = t;
    r.read_dropouts = normalize_dropouts(std::move(read_dropouts), p.cfg.servers, "read");
    r.write_dropouts = normalize_dropouts(std::move(write_dropouts), p.cfg.servers, "write");
    if (r.read_dropouts.size() >= p.read_threshold)
        throw ConfigError("round " + std::to_string(t) + " infeasible: " +
                          std::to_string(r.read_dropouts.size()) +
                          " read dropouts but the threshold is " + std::to_string(p.read_threshold));
    if (r.write_dropouts.size() >= p.write_threshold)
        throw ConfigError("round " + std::to_string(t) + " infeasible: " +
                          std::to_string(r.write_dropouts.size()) +
                          " write dropouts but the threshold is " + std::to_string(p.write_threshold));
    r.read_batch = p.read_threshold - static_cast<std::uint32_t>(r.read_dropouts.size());
    r.write_batch = p.write_threshold - static_cast<std::uint32_t>(r.write_dropouts.size());
    r.num_read_batches = p.blocks / r.read_batch;   // exact: read_batch <= cycle divides J
    r.num_write_batches = p.blocks / r.write_batch; // exact: write_batch <= cycle divides J
    return r;
}

// The scale factor xi that realizes a requested submodel length, if one
// exists. Valid lengths are exactly the multiples of K_c * lcm(1..cycle).
inline std::uint32_t scale_for_length(const RawConfig& raw, std::uint64_t target_length) {
    RawConfig unit = raw;
    unit.scale = 1;
    SystemParams p = derive(unit);
    const std::uint64_t step = p.length; // K_c * lcm(1..cycle)
    if (target_length == 0 || target_length % step != 0) {
        const std::uint64_t lo = target_length / step * step;
        const std::uint64_t hi = lo + step;
        throw ConfigError("submodel length " + std::to_string(target_length) +
                          " is not a multiple of " + std::to_string(step) +
                          "; nearest valid lengths are " + std::to_string(lo == 0 ? step : lo) +
                          " and " + std::to_string(hi));
    }
    return static_cast<std::uint32_t>(target_length / step);
}

} // namespace acsarw
