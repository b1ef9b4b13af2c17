#pragma once

// Server-side protocol half. Three families of constants shape answers and
// updates:
//   packer      — batches read_batch desired symbols into one answer value by
//                 cancelling the other components' Cauchy denominators;
//   unpacker    — splits one packed increment value back into per-pole
//                 updates by cancelling the other poles in its write batch;
//   null-shaper — scales every update to hit exactly zero at the
//                 write-dropout servers' evaluation points, so their stale
//                 storage stays on the code.
// All three are plain scalar tables; denominators are nonzero by the pole
// distinctness guarantees.

#include <cstdint>
#include <vector>

#include "acsarw/client.hpp"
#include "acsarw/codec.hpp"
#include "acsarw/params.hpp"

namespace acsarw {

namespace detail {

// Common shape of the three constant tables: one scalar per (server, block,
// component).
struct ConstantTable {
    std::uint32_t servers = 0, blocks = 0, partitions = 0;
    std::vector<Fe> c;

    Fe at(std::uint32_t n, std::uint32_t j, std::uint32_t i) const { // 1-based
        return c[(std::size_t(n - 1) * blocks + (j - 1)) * partitions + (i - 1)];
    }
    Fe& at(std::uint32_t n, std::uint32_t j, std::uint32_t i) {
        return c[(std::size_t(n - 1) * blocks + (j - 1)) * partitions + (i - 1)];
    }

    static ConstantTable ones(const SystemParams& p) {
        ConstantTable t;
        t.servers = p.cfg.servers;
        t.blocks = p.blocks;
        t.partitions = p.cfg.partitions;
        t.c.assign(std::size_t(t.servers) * t.blocks * t.partitions, p.field.one());
        return t;
    }
};

} // namespace detail

struct PackerConstants : detail::ConstantTable {};
struct UnpackerConstants : detail::ConstantTable {};
struct NullShaperConstants : detail::ConstantTable {};

// c_{n,j,i} = prod_{i' != i} (alpha_n - f_{j,i'}) / (f_{j,i} - f_{j,i'}).
// Scales component i's query row so that, inside an answer value, the other
// components' data terms turn into polynomial (aligned) interference. For
// K_c = 1 every scalar is 1.
inline PackerConstants build_packer(const SystemParams& p, const RoundParams&) {
    PackerConstants t{detail::ConstantTable::ones(p)};
    const std::uint32_t Kc = p.cfg.partitions;
    if (Kc == 1) return t;
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        for (std::uint32_t i = 1; i <= Kc; ++i) {
            Fe denom = p.field.one();
            for (std::uint32_t ii = 1; ii <= Kc; ++ii)
                if (ii != i) denom *= p.pole(j, i) - p.pole(j, ii); // nonzero: row poles distinct
            const Fe dinv = inv(denom);
            for (std::uint32_t n = 1; n <= p.cfg.servers; ++n) {
                Fe numer = p.field.one();
                const Fe an = p.alpha(n);
                for (std::uint32_t ii = 1; ii <= Kc; ++ii)
                    if (ii != i) numer *= an - p.pole(j, ii);
                t.at(n, j, i) = numer * dinv;
            }
        }
    }
    return t;
}

// Upsilon_{n,j,i} = prod_{j' in batch(j), j' != j} (alpha_n - f_{j',i}) /
// (f_{j,i} - f_{j',i}). Splits a packed increment value into its per-block
// shares. For write_batch = 1 every scalar is 1.
inline UnpackerConstants build_unpacker(const SystemParams& p, const RoundParams& round) {
    UnpackerConstants t{detail::ConstantTable::ones(p)};
    if (round.write_batch == 1) return t;
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        const std::uint32_t first = (j - 1) / round.write_batch * round.write_batch + 1;
        for (std::uint32_t i = 1; i <= p.cfg.partitions; ++i) {
            Fe denom = p.field.one();
            for (std::uint32_t jj = first; jj < first + round.write_batch; ++jj)
                if (jj != j) denom *= p.pole(j, i) - p.pole(jj, i); // nonzero: batch <= cycle
            const Fe dinv = inv(denom);
            for (std::uint32_t n = 1; n <= p.cfg.servers; ++n) {
                Fe numer = p.field.one();
                const Fe an = p.alpha(n);
                for (std::uint32_t jj = first; jj < first + round.write_batch; ++jj)
                    if (jj != j) numer *= an - p.pole(jj, i);
                t.at(n, j, i) = numer * dinv;
            }
        }
    }
    return t;
}

// Omega_{n,j,i} = prod_{m in write_dropouts} (alpha_n - alpha_m) /
// (f_{j,i} - alpha_m). Identically 1 when there are no write dropouts (empty
// product) and identically 0 at every write-dropout server.
inline NullShaperConstants build_null_shaper(const SystemParams& p,
                                             const std::vector<std::uint32_t>& write_dropouts) {
    NullShaperConstants t{detail::ConstantTable::ones(p)};
    if (write_dropouts.empty()) return t;
    std::vector<Fe> numer(p.cfg.servers, p.field.one()); // depends on n only
    for (std::uint32_t n = 1; n <= p.cfg.servers; ++n)
        for (std::uint32_t m : write_dropouts) numer[n - 1] *= p.alpha(n) - p.alpha(m);
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        for (std::uint32_t i = 1; i <= p.cfg.partitions; ++i) {
            Fe denom = p.field.one();
            for (std::uint32_t m : write_dropouts)
                denom *= p.pole(j, i) - p.alpha(m); // nonzero: poles and alphas disjoint
            const Fe dinv = inv(denom);
            for (std::uint32_t n = 1; n <= p.cfg.servers; ++n)
                t.at(n, j, i) = numer[n - 1] * dinv;
        }
    }
    return t;
}

// Answer of one read-available server: value (ell, i) is the packed inner
// product of the batch's storage blocks with component i's query rows.
inline Answer compute_answer(const ServerStorage& storage, const ReadQuery& query,
                             const PackerConstants& packer, const RoundParams& round,
                             const SystemParams& p) {
    if (storage.server != query.server)
        throw UsageError("compute_answer: storage and query server indices differ");
    if (!round.read_available(storage.server))
        throw UsageError("compute_answer: server " + std::to_string(storage.server) +
                         " is a read dropout this round");
    if (storage.blocks != p.blocks || storage.submodels != p.cfg.submodels)
        throw UsageError("compute_answer: storage dimensions do not match the configuration");
    const std::uint32_t K = p.cfg.submodels, Kc = p.cfg.partitions, n = storage.server;
    Answer a;
    a.server = n;
    a.num_batches = round.num_read_batches;
    a.partitions = Kc;
    a.values.assign(std::size_t(a.num_batches) * Kc, p.field.zero());
    for (std::uint32_t ell = 1; ell <= round.num_read_batches; ++ell) {
        for (std::uint32_t i = 1; i <= Kc; ++i) {
            Fe acc = p.field.zero();
            for (std::uint32_t d = 0; d < round.read_batch; ++d) {
                const std::uint32_t j = (ell - 1) * round.read_batch + 1 + d;
                const Fe* blk = storage.block(j);
                const Fe* qrow = query.row(j, i);
                Fe dot = p.field.zero();
                for (std::uint32_t k = 0; k < K; ++k) dot += blk[k] * qrow[k];
                acc += packer.at(n, j, i) * dot;
            }
            a.at(ell, i) = acc;
        }
    }
    return a;
}

// Post-write state of one write-available server: each block j absorbs its
// share of the packed increment, steered by the same query rows the read
// phase used and zeroed at dropout servers by the null-shaper. Takes the
// state by value, returning the updated copy — the caller owns the
// all-or-nothing round boundary.
inline ServerStorage apply_update(ServerStorage storage, const WriteIncrement& increment,
                                  const ReadQuery& query, const UnpackerConstants& unpacker,
                                  const NullShaperConstants& null_shaper,
                                  const RoundParams& round, const SystemParams& p) {
    if (storage.server != increment.server || storage.server != query.server)
        throw UsageError("apply_update: mismatched server indices across inputs");
    if (!round.write_available(storage.server))
        throw UsageError("apply_update: server " + std::to_string(storage.server) +
                         " is a write dropout this round");
    if (increment.num_batches != round.num_write_batches || increment.partitions != p.cfg.partitions)
        throw UsageError("apply_update: increment dimensions do not match the round");
    const std::uint32_t K = p.cfg.submodels, n = storage.server;
    for (std::uint32_t j = 1; j <= p.blocks; ++j) {
        const std::uint32_t ell = (j - 1) / round.write_batch + 1;
        Fe* blk = storage.block(j);
        for (std::uint32_t i = 1; i <= p.cfg.partitions; ++i) {
            const Fe scale =
                null_shaper.at(n, j, i) * unpacker.at(n, j, i) * increment.at(ell, i);
            if (scale.is_zero()) continue;
            const Fe* qrow = query.row(j, i);
            for (std::uint32_t k = 0; k < K; ++k) blk[k] += scale * qrow[k];
        }
    }
    return storage;
}

} // namespace acsarw
