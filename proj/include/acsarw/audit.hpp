#pragma once

// Information-theoretic claim verification by exhaustive enumeration: walk
// EVERY assignment of the relevant noise symbols, record the exact multiset
// of views some colluding subset would observe, and compare multisets across
// secrets. No sampling — the claims are equalities, and only full enumeration
// can confirm one. A budget guard refuses runs that would not terminate at
// desk scale.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "acsarw/client.hpp"
#include "acsarw/codec.hpp"
#include "acsarw/params.hpp"

namespace acsarw {

// Exact view multiset: observed-view byte string -> count. Counts always sum
// to q^(number of enumerated noise symbols).
using ViewDistribution = std::unordered_map<std::string, std::uint64_t>;

struct AuditOptions {
    std::uint64_t budget = 10'000'000; // max enumerated noise assignments per distribution
};

namespace detail {

// q^exponent, refusing anything beyond the budget.
inline std::uint64_t enumeration_count(std::uint64_t q, std::uint64_t exponent,
                                       std::uint64_t budget) {
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) {
        if (total > budget / q)
            throw BudgetError("exhaustive enumeration needs " + std::to_string(q) + "^" +
                              std::to_string(exponent) + " assignments, over the budget of " +
                              std::to_string(budget));
        total *= q;
    }
    return total;
}

// Counts through all q^size assignments of `size` base-q digits.
class Odometer {
public:
    Odometer(std::uint32_t q, std::size_t size) : q_(q), digits_(size, 0) {}
    const std::vector<std::uint32_t>& digits() const { return digits_; }
    bool next() { // false once wrapped back to all zeros
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            if (++digits_[i] < q_) return true;
            digits_[i] = 0;
        }
        return false;
    }

private:
    std::uint32_t q_;
    std::vector<std::uint32_t> digits_;
};

// Views are byte strings; one byte per value suffices for the tiny audit
// fields, four otherwise.
inline std::size_t view_value_width(std::uint32_t q) { return q <= 256 ? 1 : 4; }

inline void append_value(std::string& s, std::uint32_t v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
}

inline std::vector<std::uint32_t> checked_subset(std::vector<std::uint32_t> subset,
                                                 std::uint32_t servers, const char* what) {
    return normalize_dropouts(std::move(subset), servers, what); // same validity rules
}

} // namespace detail

// Exact distribution of the colluders' joint compact query view over every
// assignment of the per-round query noise. The compact form determines the
// full query, so distributions over compact views carry the whole claim.
inline ViewDistribution query_view_distribution(std::uint32_t theta,
                                                std::vector<std::uint32_t> colluders,
                                                const SystemParams& p,
                                                const AuditOptions& opts = {}) {
    colluders = detail::checked_subset(std::move(colluders), p.cfg.servers, "colluder");
    if (colluders.empty()) throw UsageError("query_view_distribution: empty colluder set");
    const std::uint32_t q = p.field.modulus();
    QueryNoise noise = QueryNoise::zeros(p);
    const std::size_t scalars = noise.z.size(); // cycle * K_c * T * K
    const std::uint64_t total = detail::enumeration_count(q, scalars, opts.budget);
    const std::size_t width = detail::view_value_width(q);

    ViewDistribution dist;
    dist.reserve(std::min<std::uint64_t>(total, 1u << 20));
    detail::Odometer od(q, scalars);
    std::string key;
    for (std::uint64_t it = 0; it < total; ++it) {
        for (std::size_t s = 0; s < scalars; ++s) noise.z[s] = p.field.make(od.digits()[s]);
        key.clear();
        for (std::uint32_t n : colluders) {
            const ReadQuery qu = gen_read_query_one(theta, n, p, noise);
            for (const Fe& e : qu.compact) detail::append_value(key, e.v, width);
        }
        ++dist[key];
        od.next();
    }
    return dist;
}

// Same, but for the joint view of two consecutive rounds' queries with
// independent fresh noise — the two-round history audit.
inline ViewDistribution query_history_view_distribution(std::uint32_t theta1,
                                                        std::uint32_t theta2,
                                                        std::vector<std::uint32_t> colluders,
                                                        const SystemParams& p,
                                                        const AuditOptions& opts = {}) {
    colluders = detail::checked_subset(std::move(colluders), p.cfg.servers, "colluder");
    if (colluders.empty()) throw UsageError("query_history_view_distribution: empty colluder set");
    const std::uint32_t q = p.field.modulus();
    QueryNoise noise1 = QueryNoise::zeros(p), noise2 = QueryNoise::zeros(p);
    const std::size_t per_round = noise1.z.size();
    const std::uint64_t total = detail::enumeration_count(q, 2 * per_round, opts.budget);
    const std::size_t width = detail::view_value_width(q);

    ViewDistribution dist;
    detail::Odometer od(q, 2 * per_round);
    std::string key;
    for (std::uint64_t it = 0; it < total; ++it) {
        for (std::size_t s = 0; s < per_round; ++s) {
            noise1.z[s] = p.field.make(od.digits()[s]);
            noise2.z[s] = p.field.make(od.digits()[per_round + s]);
        }
        key.clear();
        for (std::uint32_t n : colluders) {
            const ReadQuery q1 = gen_read_query_one(theta1, n, p, noise1);
            const ReadQuery q2 = gen_read_query_one(theta2, n, p, noise2);
            for (const Fe& e : q1.compact) detail::append_value(key, e.v, width);
            for (const Fe& e : q2.compact) detail::append_value(key, e.v, width);
        }
        ++dist[key];
        od.next();
    }
    return dist;
}

// Exact per-block distributions of the colluders' stored blocks over all
// storage noise. Noise is independent across blocks, so each block is
// enumerated on its own (q^(X*K) assignments each); the vector holds one
// distribution per block. The tightness test passes X+1 colluders here.
inline std::vector<ViewDistribution> storage_view_distribution(const Database& db,
                                                               std::vector<std::uint32_t> colluders,
                                                               const SystemParams& p,
                                                               const AuditOptions& opts = {}) {
    colluders = detail::checked_subset(std::move(colluders), p.cfg.servers, "colluder");
    if (colluders.empty()) throw UsageError("storage_view_distribution: empty colluder set");
    check_db_dims(db, p);
    const std::uint32_t q = p.field.modulus(), K = p.cfg.submodels, Kc = p.cfg.partitions,
                        X = p.cfg.storage_security;
    const std::size_t scalars = std::size_t(X) * K; // per block
    const std::uint64_t total = detail::enumeration_count(q, scalars, opts.budget);
    const std::size_t width = detail::view_value_width(q);
    const std::size_t C = colluders.size();

    std::vector<ViewDistribution> out;
    out.reserve(p.blocks);
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        // constant data part and Vandermonde factors per colluder
        std::vector<Fe> dpart(C * K, p.field.zero());
        std::vector<Fe> apow(C * X, p.field.zero());
        for (std::size_t c = 0; c < C; ++c) {
            const Fe an = p.alpha(colluders[c]);
            for (std::uint32_t i = 1; i <= Kc; ++i) {
                const Fe coef = inv(an - p.pole(j, i));
                for (std::uint32_t k = 1; k <= K; ++k)
                    dpart[c * K + (k - 1)] += coef * db.w(k, j, i);
            }
            Fe a = p.field.one();
            for (std::uint32_t x = 0; x < X; ++x) {
                apow[c * X + x] = a;
                a *= an;
            }
        }
        ViewDistribution dist;
        dist.reserve(std::min<std::uint64_t>(total, 1u << 21));
        detail::Odometer od(q, scalars); // digits laid out as [x][k]
        std::string key;
        for (std::uint64_t it = 0; it < total; ++it) {
            key.clear();
            for (std::size_t c = 0; c < C; ++c) {
                for (std::uint32_t k = 0; k < K; ++k) {
                    Fe v = dpart[c * K + k];
                    for (std::uint32_t x = 0; x < X; ++x)
                        v += apow[c * X + x] * p.field.make(od.digits()[std::size_t(x) * K + k]);
                    detail::append_value(key, v.v, width);
                }
            }
            ++dist[key];
            od.next();
        }
        out.push_back(std::move(dist));
    }
    return out;
}

// Exact distribution of the colluders' coded increment values over all
// increment noise. Returns nothing when X_delta = 0: with no noise terms the
// security claim is vacuous and there is nothing to enumerate.
inline std::optional<ViewDistribution> increment_view_distribution(
    const std::vector<Fe>& delta, std::vector<std::uint32_t> colluders, const RoundParams& round,
    const SystemParams& p, const AuditOptions& opts = {}) {
    colluders = detail::checked_subset(std::move(colluders), p.cfg.servers, "colluder");
    if (colluders.empty()) throw UsageError("increment_view_distribution: empty colluder set");
    if (p.cfg.increment_security == 0) return std::nullopt; // vacuous claim
    const std::uint32_t q = p.field.modulus();
    IncrementNoise noise = IncrementNoise::zeros(round, p);
    const std::size_t scalars = noise.z.size(); // #_w * K_c * X_delta
    const std::uint64_t total = detail::enumeration_count(q, scalars, opts.budget);
    const std::size_t width = detail::view_value_width(q);

    ViewDistribution dist;
    detail::Odometer od(q, scalars);
    std::string key;
    for (std::uint64_t it = 0; it < total; ++it) {
        for (std::size_t s = 0; s < scalars; ++s) noise.z[s] = p.field.make(od.digits()[s]);
        key.clear();
        for (std::uint32_t n : colluders) {
            const WriteIncrement w = gen_increment_one(delta, n, round, p, noise);
            for (const Fe& e : w.deltas) detail::append_value(key, e.v, width);
        }
        ++dist[key];
        od.next();
    }
    return dist;
}

// ---- round certification ---------------------------------------------------

// Visit every m-subset of {1..n} in lexicographic order.
template <typename Fn>
inline void for_each_subset(std::uint32_t n, std::uint32_t m, Fn&& fn) {
    if (m > n) return;
    std::vector<std::uint32_t> subset(m);
    for (std::uint32_t i = 0; i < m; ++i) subset[i] = i + 1;
    while (true) {
        fn(const_cast<const std::vector<std::uint32_t>&>(subset));
        std::uint32_t i = m;
        while (i > 0 && subset[i - 1] == n - m + i) --i;
        if (i == 0) return;
        ++subset[i - 1];
        for (std::uint32_t k = i; k < m; ++k) subset[k] = subset[k - 1] + 1;
    }
}

// Everything certify_round needs to re-check a completed round from outside
// the simulator.
struct RoundArtifacts {
    std::vector<ServerStorage> pre_servers;
    std::vector<ServerStorage> post_servers;
    Database pre_mirror;
    std::vector<Fe> retrieved;
    std::uint32_t theta = 0;
    std::vector<Fe> delta;
    RoundParams round;
};

struct RoundCertificate {
    bool retrieved_matches = false;   // (a) decoded submodel == pre-update mirror row
    bool every_subset_decodes = false;// (b) all recovery subsets decode to the updated mirror
    bool dropouts_untouched = false;  // (c) write-dropout states bit-identical
    bool storage_consistent = false;  // (d) post storage still on the code

    bool pass() const {
        return retrieved_matches && every_subset_decodes && dropouts_untouched &&
               storage_consistent;
    }
    std::string describe() const {
        if (pass()) return "pass";
        std::string s = "failed:";
        if (!retrieved_matches) s += " retrieved-mismatch";
        if (!every_subset_decodes) s += " subset-decode-mismatch";
        if (!dropouts_untouched) s += " dropout-state-mutated";
        if (!storage_consistent) s += " storage-inconsistent";
        return s;
    }
};

inline RoundCertificate certify_round(const RoundArtifacts& art, const SystemParams& p) {
    RoundCertificate cert;
    const std::uint32_t N = p.cfg.servers;
    if (art.pre_servers.size() != N || art.post_servers.size() != N)
        throw UsageError("certify_round: need all server states before and after the round");
    if (art.delta.size() != p.length || art.retrieved.size() != p.length)
        throw UsageError("certify_round: retrieved/delta length mismatch");

    // (a)
    cert.retrieved_matches = true;
    for (std::uint32_t l = 1; l <= p.length; ++l)
        if (art.retrieved[l - 1] != art.pre_mirror.at(art.theta, l)) {
            cert.retrieved_matches = false;
            break;
        }

    // (b) against the updated mirror, over every recovery subset
    Database post_mirror = art.pre_mirror;
    {
        Fe* row = post_mirror.row(art.theta);
        for (std::uint32_t l = 0; l < p.length; ++l) row[l] += art.delta[l];
    }
    cert.every_subset_decodes = true;
    for_each_subset(N, p.recovery_size(), [&](const std::vector<std::uint32_t>& subset) {
        if (!cert.every_subset_decodes) return;
        std::vector<const ServerStorage*> sel;
        for (std::uint32_t n : subset) sel.push_back(&art.post_servers[n - 1]);
        if (!(decode_database(sel, p) == post_mirror)) cert.every_subset_decodes = false;
    });

    // (c)
    cert.dropouts_untouched = true;
    for (std::uint32_t n : art.round.write_dropouts)
        if (!(art.pre_servers[n - 1] == art.post_servers[n - 1]))
            cert.dropouts_untouched = false;

    // (d)
    cert.storage_consistent = check_consistency(art.post_servers, p);
    return cert;
}

} // namespace acsarw
