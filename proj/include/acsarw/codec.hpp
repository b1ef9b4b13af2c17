#pragma once

// Storage codec: plaintext database <-> per-server coded storage. Each server
// holds J blocks of K field elements; block j evaluates, at that server's
// point alpha_n, the sum of K_c Cauchy data terms 1/(alpha_n - f_{j,i}) and X
// Vandermonde noise terms alpha_n^{x-1}. Decoding the full database (a test
// oracle, never part of the protocol) inverts that structure from any
// K_c + X servers, block by block.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <vector>

#include "acsarw/params.hpp"
#include "acsarw/rng.hpp"

namespace acsarw {

// Plaintext database: K submodels, each a length-L row. The (j, i) accessor
// exposes the blocked view used by the code: symbol i of block j is column
// i + K_c*(j-1).
struct Database {
    std::uint32_t submodels = 0;  // K
    std::uint32_t length = 0;     // L
    std::uint32_t partitions = 0; // K_c, for the blocked accessor
    std::vector<Fe> entries;      // row-major K x L

    static Database zeros(const SystemParams& p) {
        Database d;
        d.submodels = p.cfg.submodels;
        d.length = p.length;
        d.partitions = p.cfg.partitions;
        d.entries.assign(std::size_t(d.submodels) * d.length, p.field.zero());
        return d;
    }
    static Database random(const SystemParams& p, Rng& rng) {
        Database d = zeros(p);
        for (Fe& e : d.entries) e = rng.uniform(p.field);
        return d;
    }

    Fe& at(std::uint32_t k, std::uint32_t l) { // 1-based submodel k, position l
        return entries[std::size_t(k - 1) * length + (l - 1)];
    }
    Fe at(std::uint32_t k, std::uint32_t l) const {
        return entries[std::size_t(k - 1) * length + (l - 1)];
    }
    Fe w(std::uint32_t k, std::uint32_t j, std::uint32_t i) const { // blocked view
        return at(k, i + partitions * (j - 1));
    }
    // Start of submodel k's row.
    const Fe* row(std::uint32_t k) const { return &entries[std::size_t(k - 1) * length]; }
    Fe* row(std::uint32_t k) { return &entries[std::size_t(k - 1) * length]; }

    friend bool operator==(const Database& a, const Database& b) {
        return a.submodels == b.submodels && a.length == b.length &&
               a.partitions == b.partitions && a.entries == b.entries;
    }
};

// Storage-side noise: X length-K vectors per block, i.i.d. uniform.
struct StorageNoise {
    std::uint32_t blocks = 0, terms = 0, submodels = 0; // J, X, K
    std::vector<Fe> z; // [j][x][k] flattened

    static StorageNoise zeros(const SystemParams& p) {
        StorageNoise n;
        n.blocks = p.blocks;
        n.terms = p.cfg.storage_security;
        n.submodels = p.cfg.submodels;
        n.z.assign(std::size_t(n.blocks) * n.terms * n.submodels, p.field.zero());
        return n;
    }
    static StorageNoise random(const SystemParams& p, Rng& rng) {
        StorageNoise n = zeros(p);
        for (Fe& e : n.z) e = rng.uniform(p.field);
        return n;
    }

    Fe& at(std::uint32_t j, std::uint32_t x, std::uint32_t k) { // all 1-based
        return z[(std::size_t(j - 1) * terms + (x - 1)) * submodels + (k - 1)];
    }
    Fe at(std::uint32_t j, std::uint32_t x, std::uint32_t k) const {
        return z[(std::size_t(j - 1) * terms + (x - 1)) * submodels + (k - 1)];
    }
    const Fe* vec(std::uint32_t j, std::uint32_t x) const { // length-K vector
        return &z[(std::size_t(j - 1) * terms + (x - 1)) * submodels];
    }
};

// One server's coded state: J blocks of K field elements.
struct ServerStorage {
    std::uint32_t server = 0; // 1-based index n
    std::uint32_t blocks = 0, submodels = 0;
    std::vector<Fe> data; // [j][k] flattened

    Fe* block(std::uint32_t j) { return &data[std::size_t(j - 1) * submodels]; }
    const Fe* block(std::uint32_t j) const { return &data[std::size_t(j - 1) * submodels]; }
    Fe at(std::uint32_t j, std::uint32_t k) const {
        return data[std::size_t(j - 1) * submodels + (k - 1)];
    }

    friend bool operator==(const ServerStorage& a, const ServerStorage& b) {
        return a.server == b.server && a.blocks == b.blocks && a.submodels == b.submodels &&
               a.data == b.data;
    }
};

inline void check_db_dims(const Database& db, const SystemParams& p) {
    if (db.submodels != p.cfg.submodels || db.length != p.length ||
        db.partitions != p.cfg.partitions)
        throw UsageError("database dimensions do not match the configuration");
}

// Encode the whole database into N server states.
inline std::vector<ServerStorage> encode_storage(const Database& db, const StorageNoise& noise,
                                                 const SystemParams& p) {
    check_db_dims(db, p);
    if (noise.blocks != p.blocks || noise.terms != p.cfg.storage_security ||
        noise.submodels != p.cfg.submodels)
        throw UsageError("storage noise dimensions do not match the configuration");

    const std::uint32_t N = p.cfg.servers, K = p.cfg.submodels, Kc = p.cfg.partitions,
                        X = p.cfg.storage_security, J = p.blocks;
    std::vector<ServerStorage> out(N);
    for (std::uint32_t n = 1; n <= N; ++n) {
        ServerStorage& s = out[n - 1];
        s.server = n;
        s.blocks = J;
        s.submodels = K;
        s.data.assign(std::size_t(J) * K, p.field.zero());
        const Fe an = p.alpha(n);
        for (std::uint32_t j = 1; j <= J; ++j) {
            Fe* blk = s.block(j);
            for (std::uint32_t i = 1; i <= Kc; ++i) {
                const Fe c = inv(an - p.pole(j, i));
                for (std::uint32_t k = 1; k <= K; ++k) blk[k - 1] += c * db.w(k, j, i);
            }
            Fe apow = p.field.one();
            for (std::uint32_t x = 1; x <= X; ++x) {
                const Fe* zv = noise.vec(j, x);
                for (std::uint32_t k = 0; k < K; ++k) blk[k] += apow * zv[k];
                apow *= an;
            }
        }
    }
    return out;
}

namespace detail {

// The N x (K_c + X) generator whose column space every cross-server storage
// vector of block j must lie in: K_c Cauchy columns then X Vandermonde
// columns, one row per server in `rows` (1-based indices, ascending).
inline Mat storage_generator(const SystemParams& p, std::uint32_t j,
                             const std::vector<std::uint32_t>& rows) {
    const std::uint32_t Kc = p.cfg.partitions, X = p.cfg.storage_security;
    Mat g(rows.size(), Kc + X, p.field.zero());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Fe an = p.alpha(rows[r]);
        for (std::uint32_t i = 1; i <= Kc; ++i) g(r, i - 1) = inv(an - p.pole(j, i));
        Fe apow = p.field.one();
        for (std::uint32_t x = 0; x < X; ++x) {
            g(r, Kc + x) = apow;
            apow *= an;
        }
    }
    return g;
}

} // namespace detail

// Reconstruct the plaintext database from the states of at least K_c + X
// distinct servers. A test oracle: per block, invert the Cauchy-Vandermonde
// generator restricted to the first K_c + X supplied servers and keep the
// data part. The generator repeats with the pole period, so at most `cycle`
// distinct inverses are computed.
inline Database decode_database(const std::vector<const ServerStorage*>& storages,
                                const SystemParams& p) {
    const std::uint32_t m = p.recovery_size();
    std::vector<std::uint32_t> idx;
    for (const ServerStorage* s : storages) {
        if (s == nullptr) throw UsageError("decode_database: null storage");
        idx.push_back(s->server);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    if (idx.size() < m)
        throw UsageError("decode_database needs " + std::to_string(m) + " distinct servers, got " +
                         std::to_string(idx.size()));
    idx.resize(m);
    std::vector<const ServerStorage*> sel;
    for (std::uint32_t n : idx)
        for (const ServerStorage* s : storages)
            if (s->server == n) {
                sel.push_back(s);
                break;
            }

    const std::uint32_t K = p.cfg.submodels, Kc = p.cfg.partitions, J = p.blocks;
    Database db = Database::zeros(p);
    // data rows (first K_c rows of the inverse) per pole-pattern residue
    std::map<std::uint32_t, Mat> cache;
    for (std::uint32_t j = 1; j <= J; ++j) {
        const std::uint32_t key = (j - 1) % p.cycle;
        auto it = cache.find(key);
        if (it == cache.end()) {
            Mat g = detail::storage_generator(p, j, idx);
            Mat ginv(m, m, p.field.zero());
            try {
                ginv = invert(std::move(g));
            } catch (const SingularError&) {
                throw InvariantError("decode_database: singular Cauchy-Vandermonde system");
            }
            it = cache.emplace(key, std::move(ginv)).first;
        }
        const Mat& ginv = it->second;
        for (std::uint32_t k = 1; k <= K; ++k) {
            for (std::uint32_t i = 1; i <= Kc; ++i) {
                Fe acc = p.field.zero();
                for (std::uint32_t r = 0; r < m; ++r)
                    acc += ginv(i - 1, r) * sel[r]->at(j, k);
                db.at(k, Kc * (j - 1) + i) = acc;
            }
        }
    }
    return db;
}

inline Database decode_database(const std::vector<ServerStorage>& storages,
                                const SystemParams& p) {
    std::vector<const ServerStorage*> ptrs;
    ptrs.reserve(storages.size());
    for (const ServerStorage& s : storages) ptrs.push_back(&s);
    return decode_database(ptrs, p);
}

// True iff for every block j and coordinate k, the length-N vector of stored
// values across all servers lies in the column space of the block's
// Cauchy-Vandermonde generator. A rank test via incremental elimination; the
// basis repeats with the pole period.
inline bool check_consistency(const std::vector<ServerStorage>& storages, const SystemParams& p) {
    const std::uint32_t N = p.cfg.servers, K = p.cfg.submodels;
    if (storages.size() != N)
        throw UsageError("check_consistency needs all " + std::to_string(N) + " server states");
    std::vector<std::uint32_t> all(N);
    for (std::uint32_t n = 1; n <= N; ++n) all[n - 1] = n;
    std::vector<const ServerStorage*> byid(N, nullptr);
    for (const ServerStorage& s : storages) {
        if (s.server < 1 || s.server > N || byid[s.server - 1] != nullptr)
            throw UsageError("check_consistency: server indices must be a permutation of 1..N");
        byid[s.server - 1] = &s;
    }

    std::map<std::uint32_t, SpanBasis> cache;
    std::vector<Fe> v(N, p.field.zero());
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        const std::uint32_t key = (j - 1) % p.cycle;
        auto it = cache.find(key);
        if (it == cache.end()) {
            Mat g = detail::storage_generator(p, j, all);
            SpanBasis basis(p.field, N);
            for (std::size_t c = 0; c < g.cols(); ++c) {
                std::vector<Fe> col(N, p.field.zero());
                for (std::uint32_t r = 0; r < N; ++r) col[r] = g(r, c);
                basis.add(std::move(col));
            }
            it = cache.emplace(key, std::move(basis)).first;
        }
        for (std::uint32_t k = 1; k <= K; ++k) {
            for (std::uint32_t n = 0; n < N; ++n) v[n] = byid[n]->at(j, k);
            if (!it->second.contains(v)) return false;
        }
    }
    return true;
}

// ---- snapshot serialization ----------------------------------------------
// Flat binary layout: header {q, N, K, J} as little-endian u64, then per
// server ascending, per block ascending, K elements as little-endian u64.

namespace detail {

inline void put_u64le(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw ConfigError("snapshot truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

} // namespace detail

inline void write_snapshot(std::ostream& out, const std::vector<ServerStorage>& storages,
                           const SystemParams& p) {
    if (storages.size() != p.cfg.servers)
        throw UsageError("write_snapshot needs all server states");
    detail::put_u64le(out, p.field.modulus());
    detail::put_u64le(out, p.cfg.servers);
    detail::put_u64le(out, p.cfg.submodels);
    detail::put_u64le(out, p.blocks);
    for (std::uint32_t n = 1; n <= p.cfg.servers; ++n) {
        const ServerStorage* s = nullptr;
        for (const ServerStorage& cand : storages)
            if (cand.server == n) s = &cand;
        if (s == nullptr) throw UsageError("write_snapshot: missing server " + std::to_string(n));
        for (const Fe& e : s->data) detail::put_u64le(out, e.v);
    }
}

struct Snapshot {
    std::uint64_t modulus = 0, servers = 0, submodels = 0, blocks = 0;
    std::vector<ServerStorage> storages;
};

inline Snapshot read_snapshot(std::istream& in) {
    Snapshot s;
    s.modulus = detail::get_u64le(in);
    s.servers = detail::get_u64le(in);
    s.submodels = detail::get_u64le(in);
    s.blocks = detail::get_u64le(in);
    Field f(s.modulus);
    for (std::uint64_t n = 1; n <= s.servers; ++n) {
        ServerStorage st;
        st.server = static_cast<std::uint32_t>(n);
        st.blocks = static_cast<std::uint32_t>(s.blocks);
        st.submodels = static_cast<std::uint32_t>(s.submodels);
        st.data.reserve(s.blocks * s.submodels);
        for (std::uint64_t i = 0; i < s.blocks * s.submodels; ++i) {
            std::uint64_t v = detail::get_u64le(in);
            if (v >= s.modulus)
                throw ConfigError("snapshot element " + std::to_string(v) +
                                  " is not reduced mod " + std::to_string(s.modulus));
            st.data.push_back(f.make(v));
        }
        s.storages.push_back(std::move(st));
    }
    return s;
}

} // namespace acsarw
