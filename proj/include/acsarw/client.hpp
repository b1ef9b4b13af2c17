#pragma once

// User-side protocol half: query generation, increment generation, and answer
// decoding. A query row for block j is e_K(theta) masked by T noise terms
// scaled by (alpha_n - f_{j,i}); because poles and noise both repeat with the
// cycle period, the first cycle*K entries per component determine the whole
// query — only that compact form is ever stored or transmitted. Answers
// stack the desired symbols on Cauchy terms and all interference on a
// low-degree Vandermonde tail, so decoding is one small square solve per
// answer entry.

#include <cstdint>
#include <map>
#include <vector>

#include "acsarw/params.hpp"
#include "acsarw/rng.hpp"

namespace acsarw {

// Fresh per-round query noise: cycle x K_c x T length-K vectors.
struct QueryNoise {
    std::uint32_t cycle = 0, partitions = 0, terms = 0, submodels = 0;
    std::vector<Fe> z; // [u][i][s][k] flattened

    static QueryNoise zeros(const SystemParams& p) {
        QueryNoise n;
        n.cycle = p.cycle;
        n.partitions = p.cfg.partitions;
        n.terms = p.cfg.privacy;
        n.submodels = p.cfg.submodels;
        n.z.assign(std::size_t(n.cycle) * n.partitions * n.terms * n.submodels, p.field.zero());
        return n;
    }
    static QueryNoise random(const SystemParams& p, Rng& rng) {
        QueryNoise n = zeros(p);
        for (Fe& e : n.z) e = rng.uniform(p.field);
        return n;
    }

    Fe& at(std::uint32_t u, std::uint32_t i, std::uint32_t s, std::uint32_t k) { // 1-based
        return z[((std::size_t(u - 1) * partitions + (i - 1)) * terms + (s - 1)) * submodels +
                 (k - 1)];
    }
    Fe at(std::uint32_t u, std::uint32_t i, std::uint32_t s, std::uint32_t k) const {
        return z[((std::size_t(u - 1) * partitions + (i - 1)) * terms + (s - 1)) * submodels +
                 (k - 1)];
    }
    const Fe* vec(std::uint32_t u, std::uint32_t i, std::uint32_t s) const { // length-K
        return &z[((std::size_t(u - 1) * partitions + (i - 1)) * terms + (s - 1)) * submodels];
    }
};

// Per-server read query in compact form: for each component i, the first
// `cycle` rows (length K each). Row j of the full form is row
// ((j-1) mod cycle)+1 of the compact form — an exact replica, since poles
// and noise assignments share the cycle period.
struct ReadQuery {
    std::uint32_t server = 0;
    std::uint32_t cycle = 0, partitions = 0, submodels = 0;
    std::vector<Fe> compact; // [i][u][k] flattened

    const Fe* compact_row(std::uint32_t u, std::uint32_t i) const { // u in [1, cycle]
        return &compact[(std::size_t(i - 1) * cycle + (u - 1)) * submodels];
    }
    // Expanded row j in [1, J] of component i.
    const Fe* row(std::uint32_t j, std::uint32_t i) const {
        return compact_row((j - 1) % cycle + 1, i);
    }
    std::size_t symbol_count() const { return compact.size(); }
};

inline ReadQuery gen_read_query_one(std::uint32_t theta, std::uint32_t server,
                                    const SystemParams& p, const QueryNoise& noise) {
    if (theta < 1 || theta > p.cfg.submodels)
        throw UsageError("submodel index " + std::to_string(theta) + " outside [1, " +
                         std::to_string(p.cfg.submodels) + "]");
    if (server < 1 || server > p.cfg.servers)
        throw UsageError("server index " + std::to_string(server) + " outside [1, " +
                         std::to_string(p.cfg.servers) + "]");
    const std::uint32_t K = p.cfg.submodels, Kc = p.cfg.partitions, T = p.cfg.privacy;
    ReadQuery q;
    q.server = server;
    q.cycle = p.cycle;
    q.partitions = Kc;
    q.submodels = K;
    q.compact.assign(std::size_t(p.cycle) * Kc * K, p.field.zero());
    const Fe an = p.alpha(server);
    for (std::uint32_t i = 1; i <= Kc; ++i) {
        for (std::uint32_t u = 1; u <= p.cycle; ++u) {
            Fe* row = &q.compact[(std::size_t(i - 1) * p.cycle + (u - 1)) * K];
            row[theta - 1] = p.field.one();
            const Fe scale = an - p.pole(u, i); // pole row u: first cycle rows = base pattern
            Fe apow = scale;
            for (std::uint32_t s = 1; s <= T; ++s) {
                const Fe* zv = noise.vec(u, i, s);
                for (std::uint32_t k = 0; k < K; ++k) row[k] += apow * zv[k];
                apow *= an;
            }
        }
    }
    return q;
}

// Queries for all N servers. Which subset is actually transmitted is the
// simulator's concern; content depends only on (theta, noise, server).
inline std::vector<ReadQuery> gen_read_query(std::uint32_t theta, const SystemParams& p,
                                             const QueryNoise& noise) {
    std::vector<ReadQuery> out;
    out.reserve(p.cfg.servers);
    for (std::uint32_t n = 1; n <= p.cfg.servers; ++n)
        out.push_back(gen_read_query_one(theta, n, p, noise));
    return out;
}

// One server's answers: one value per (read batch, component).
struct Answer {
    std::uint32_t server = 0;
    std::uint32_t num_batches = 0, partitions = 0;
    std::vector<Fe> values; // [ell][i] flattened

    Fe at(std::uint32_t ell, std::uint32_t i) const { // 1-based
        return values[std::size_t(ell - 1) * partitions + (i - 1)];
    }
    Fe& at(std::uint32_t ell, std::uint32_t i) {
        return values[std::size_t(ell - 1) * partitions + (i - 1)];
    }
    std::size_t symbol_count() const { return values.size(); }
};

// Decode the desired submodel from the answers of exactly the read-available
// servers. Per (batch, component) this solves a square system whose columns
// are read_batch Cauchy terms (the desired symbols) and X+T+K_c-1 Vandermonde
// terms (all interference); only the Cauchy part of the inverse is kept, and
// it is cached per pole-pattern residue.
inline std::vector<Fe> decode_answers(const std::vector<Answer>& answers, const RoundParams& round,
                                      const SystemParams& p) {
    const std::uint32_t N = p.cfg.servers, Kc = p.cfg.partitions;
    std::vector<std::uint32_t> avail;
    for (std::uint32_t n = 1; n <= N; ++n)
        if (round.read_available(n)) avail.push_back(n);

    std::vector<const Answer*> byid(N + 1, nullptr);
    for (const Answer& a : answers) {
        if (a.server < 1 || a.server > N || byid[a.server] != nullptr)
            throw UsageError("decode_answers: duplicate or out-of-range answer server index");
        byid[a.server] = &a;
    }
    for (std::uint32_t n : avail)
        if (byid[n] == nullptr)
            throw UsageError("decode_answers: missing answer from available server " +
                             std::to_string(n));
    if (answers.size() != avail.size())
        throw UsageError("decode_answers: expected answers from exactly the " +
                         std::to_string(avail.size()) + " read-available servers");
    const std::uint32_t m = static_cast<std::uint32_t>(avail.size());
    const std::uint32_t tail =
        p.cfg.storage_security + p.cfg.privacy + Kc - 1;  // interference span
    if (m != round.read_batch + tail)
        throw InvariantError("decode_answers: system is not square");
    for (const Answer& a : answers)
        if (a.num_batches != round.num_read_batches || a.partitions != Kc)
            throw UsageError("decode_answers: answer dimensions do not match the round");

    std::vector<Fe> out(p.length, p.field.zero());
    // first read_batch rows of the inverse, cached per (component, residue of
    // the batch's first block in the pole cycle)
    std::map<std::uint64_t, Mat> cache;
    for (std::uint32_t i = 1; i <= Kc; ++i) {
        for (std::uint32_t ell = 1; ell <= round.num_read_batches; ++ell) {
            const std::uint32_t j0 = (ell - 1) * round.read_batch + 1; // first block of batch
            const std::uint64_t key = (std::uint64_t(i) << 32) | ((j0 - 1) % p.cycle);
            auto it = cache.find(key);
            if (it == cache.end()) {
                Mat c(m, m, p.field.zero());
                for (std::uint32_t r = 0; r < m; ++r) {
                    const Fe an = p.alpha(avail[r]);
                    for (std::uint32_t d = 0; d < round.read_batch; ++d)
                        c(r, d) = inv(an - p.pole(j0 + d, i));
                    Fe apow = p.field.one();
                    for (std::uint32_t x = 0; x < tail; ++x) {
                        c(r, round.read_batch + x) = apow;
                        apow *= an;
                    }
                }
                Mat cinv(m, m, p.field.zero());
                try {
                    cinv = invert(std::move(c));
                } catch (const SingularError&) {
                    throw InvariantError("decode_answers: singular Cauchy-Vandermonde system");
                }
                it = cache.emplace(key, std::move(cinv)).first;
            }
            const Mat& cinv = it->second;
            for (std::uint32_t d = 0; d < round.read_batch; ++d) {
                Fe acc = p.field.zero();
                for (std::uint32_t r = 0; r < m; ++r)
                    acc += cinv(d, r) * byid[avail[r]]->at(ell, i);
                const std::uint32_t j = j0 + d;
                out[std::size_t(i - 1) + Kc * (j - 1)] = acc;
            }
        }
    }
    return out;
}

// Fresh per-round increment noise: one scalar per (write batch, component,
// noise term).
struct IncrementNoise {
    std::uint32_t num_batches = 0, partitions = 0, terms = 0; // #_w, K_c, X_delta
    std::vector<Fe> z; // [ell][i][x] flattened

    static IncrementNoise zeros(const RoundParams& round, const SystemParams& p) {
        IncrementNoise n;
        n.num_batches = round.num_write_batches;
        n.partitions = p.cfg.partitions;
        n.terms = p.cfg.increment_security;
        n.z.assign(std::size_t(n.num_batches) * n.partitions * n.terms, p.field.zero());
        return n;
    }
    static IncrementNoise random(const RoundParams& round, const SystemParams& p, Rng& rng) {
        IncrementNoise n = zeros(round, p);
        for (Fe& e : n.z) e = rng.uniform(p.field);
        return n;
    }

    Fe& at(std::uint32_t ell, std::uint32_t i, std::uint32_t x) { // 1-based
        return z[(std::size_t(ell - 1) * partitions + (i - 1)) * terms + (x - 1)];
    }
    Fe at(std::uint32_t ell, std::uint32_t i, std::uint32_t x) const {
        return z[(std::size_t(ell - 1) * partitions + (i - 1)) * terms + (x - 1)];
    }
};

// One server's coded increment: one value per (write batch, component);
// write_batch plaintext increment symbols ride each value's Cauchy terms.
struct WriteIncrement {
    std::uint32_t server = 0;
    std::uint32_t num_batches = 0, partitions = 0;
    std::vector<Fe> deltas; // [ell][i] flattened

    Fe at(std::uint32_t ell, std::uint32_t i) const {
        return deltas[std::size_t(ell - 1) * partitions + (i - 1)];
    }
    Fe& at(std::uint32_t ell, std::uint32_t i) {
        return deltas[std::size_t(ell - 1) * partitions + (i - 1)];
    }
    std::size_t symbol_count() const { return deltas.size(); }
};

inline WriteIncrement gen_increment_one(const std::vector<Fe>& delta, std::uint32_t server,
                                        const RoundParams& round, const SystemParams& p,
                                        const IncrementNoise& noise) {
    if (delta.size() != p.length)
        throw UsageError("increment must have " + std::to_string(p.length) + " entries, got " +
                         std::to_string(delta.size()));
    if (server < 1 || server > p.cfg.servers)
        throw UsageError("server index " + std::to_string(server) + " outside [1, " +
                         std::to_string(p.cfg.servers) + "]");
    if (noise.num_batches != round.num_write_batches || noise.partitions != p.cfg.partitions ||
        noise.terms != p.cfg.increment_security)
        throw UsageError("increment noise dimensions do not match the round");
    const std::uint32_t Kc = p.cfg.partitions;
    WriteIncrement w;
    w.server = server;
    w.num_batches = round.num_write_batches;
    w.partitions = Kc;
    w.deltas.assign(std::size_t(w.num_batches) * Kc, p.field.zero());
    const Fe an = p.alpha(server);
    for (std::uint32_t ell = 1; ell <= w.num_batches; ++ell) {
        for (std::uint32_t i = 1; i <= Kc; ++i) {
            Fe acc = p.field.zero();
            for (std::uint32_t d = 0; d < round.write_batch; ++d) {
                const std::uint32_t j = (ell - 1) * round.write_batch + 1 + d;
                const Fe dji = delta[std::size_t(i - 1) + Kc * (j - 1)];
                acc += inv(an - p.pole(j, i)) * dji;
            }
            Fe apow = p.field.one();
            for (std::uint32_t x = 1; x <= p.cfg.increment_security; ++x) {
                acc += apow * noise.at(ell, i, x);
                apow *= an;
            }
            w.at(ell, i) = acc;
        }
    }
    return w;
}

// Increments for all N servers; the simulator transmits only to
// write-available ones.
inline std::vector<WriteIncrement> gen_increment(const std::vector<Fe>& delta,
                                                 const RoundParams& round, const SystemParams& p,
                                                 const IncrementNoise& noise) {
    std::vector<WriteIncrement> out;
    out.reserve(p.cfg.servers);
    for (std::uint32_t n = 1; n <= p.cfg.servers; ++n)
        out.push_back(gen_increment_one(delta, n, round, p, noise));
    return out;
}

} // namespace acsarw
