#pragma once

// Round orchestration: full read/write cycles over time with per-round
// dropout sets, a plaintext mirror as correctness oracle, and an exact
// communication ledger. Costs are exact integer fractions; the normalized
// download/upload numbers come from counting actual container sizes, not
// from re-evaluating the closed-form formulas (tests compare the two).

#include <cstdint>
#include <future>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "acsarw/client.hpp"
#include "acsarw/codec.hpp"
#include "acsarw/params.hpp"
#include "acsarw/rng.hpp"
#include "acsarw/server.hpp"

namespace acsarw {

using Rat = boost::rational<std::int64_t>;

// Purpose tags for deriving per-round RNG streams from the master seed.
enum : std::uint64_t {
    kStreamStorageNoise = 1,
    kStreamQueryNoise = 2,
    kStreamIncrementNoise = 3,
    kStreamRoundData = 4, // theta and delta in run_schedule
    kStreamSchedule = 5,  // random dropout schedules
};

struct RoundReport {
    std::uint32_t t = 0;
    std::uint32_t theta = 0;
    std::vector<std::uint32_t> read_dropouts;
    std::vector<std::uint32_t> write_dropouts;
    // measured symbol counts
    std::uint64_t down_symbols = 0;
    std::uint64_t up_query_symbols = 0; // delivered to ([N] \ S_r) u ([N] \ S_w)
    std::uint64_t up_query_symbols_both_phases = 0; // servers available in both phases only
    std::uint64_t up_increment_symbols = 0;
    std::uint64_t access_touched_per_server = 0; // distinct symbols per contacted server, per phase
    // normalized costs, exact
    Rat download_cost;           // down_symbols / L
    Rat upload_cost;             // (up_query + up_increment) / L
    Rat increment_upload_cost;   // up_increment / L — the closed-form limit quantity
    Rat storage_rate;            // K_c / N
};

// (download, upload) = ((N-s_r)/(read_threshold-s_r), (N-s_w)/(write_threshold-s_w)).
inline std::pair<Rat, Rat> closed_form_costs(const SystemParams& p, std::uint32_t s_r,
                                          std::uint32_t s_w) {
    if (s_r >= p.read_threshold)
        throw ConfigError("download cost undefined: " + std::to_string(s_r) +
                          " read dropouts >= threshold " + std::to_string(p.read_threshold));
    if (s_w >= p.write_threshold)
        throw ConfigError("upload cost undefined: " + std::to_string(s_w) +
                          " write dropouts >= threshold " + std::to_string(p.write_threshold));
    const std::int64_t n = p.cfg.servers;
    return {Rat(n - s_r, p.read_threshold - s_r), Rat(n - s_w, p.write_threshold - s_w)};
}

class Simulation {
public:
    Simulation(SystemParams params, Database initial)
        : p_(std::move(params)), mirror_(std::move(initial)) {
        check_db_dims(mirror_, p_);
        Rng rng(derive_seed(p_.cfg.seed, kStreamStorageNoise, 0));
        StorageNoise noise = StorageNoise::random(p_, rng);
        servers_ = encode_storage(mirror_, noise, p_);
    }

    const SystemParams& params() const { return p_; }
    const Database& mirror() const { return mirror_; }
    const std::vector<ServerStorage>& servers() const { return servers_; }
    std::uint32_t rounds_completed() const { return t_; }

    // One full cycle: read (query -> answers -> decode, verified against the
    // mirror), then write (increment -> updates at write-available servers).
    // Returns the retrieved submodel (pre-update) and the cost report.
    std::pair<std::vector<Fe>, RoundReport> run_round(std::uint32_t theta,
                                                      const std::vector<Fe>& delta,
                                                      std::vector<std::uint32_t> read_dropouts,
                                                      std::vector<std::uint32_t> write_dropouts) {
        const std::uint32_t t = t_ + 1;
        const RoundParams round =
            round_params(p_, t, std::move(read_dropouts), std::move(write_dropouts));
        if (delta.size() != p_.length)
            throw UsageError("delta must have " + std::to_string(p_.length) + " entries");

        RoundReport rep;
        rep.t = t;
        rep.theta = theta;
        rep.read_dropouts = round.read_dropouts;
        rep.write_dropouts = round.write_dropouts;

        // --- read phase ---
        Rng qrng(derive_seed(p_.cfg.seed, kStreamQueryNoise, t));
        const QueryNoise qnoise = QueryNoise::random(p_, qrng);
        const std::vector<ReadQuery> queries = gen_read_query(theta, p_, qnoise);
        const PackerConstants packer = build_packer(p_, round);

        std::vector<Answer> answers;
        {
            std::vector<std::future<Answer>> futs;
            for (std::uint32_t n = 1; n <= p_.cfg.servers; ++n) {
                if (!round.read_available(n)) continue;
                futs.push_back(std::async([&, n] {
                    return compute_answer(servers_[n - 1], queries[n - 1], packer, round, p_);
                }));
            }
            answers.reserve(futs.size());
            for (auto& f : futs) answers.push_back(f.get());
        }
        for (const Answer& a : answers) rep.down_symbols += a.symbol_count();

        std::vector<Fe> retrieved = decode_answers(answers, round, p_);
        for (std::uint32_t l = 1; l <= p_.length; ++l)
            if (retrieved[l - 1] != mirror_.at(theta, l))
                throw InvariantError("round " + std::to_string(t) +
                                     ": retrieved submodel diverged from the mirror at position " +
                                     std::to_string(l));

        // --- write phase ---
        Rng irng(derive_seed(p_.cfg.seed, kStreamIncrementNoise, t));
        const IncrementNoise inoise = IncrementNoise::random(round, p_, irng);
        const std::vector<WriteIncrement> increments = gen_increment(delta, round, p_, inoise);
        const UnpackerConstants unpacker = build_unpacker(p_, round);
        const NullShaperConstants shaper = build_null_shaper(p_, round.write_dropouts);

        {
            std::vector<std::pair<std::uint32_t, std::future<ServerStorage>>> futs;
            for (std::uint32_t n = 1; n <= p_.cfg.servers; ++n) {
                if (!round.write_available(n)) continue; // dropouts are simply not invoked
                rep.up_increment_symbols += increments[n - 1].symbol_count();
                futs.emplace_back(n, std::async([&, n] {
                    return apply_update(servers_[n - 1], increments[n - 1], queries[n - 1],
                                        unpacker, shaper, round, p_);
                }));
            }
            for (auto& [n, f] : futs) servers_[n - 1] = f.get();
        }

        // Queries go to every server that participates in either phase.
        for (std::uint32_t n = 1; n <= p_.cfg.servers; ++n) {
            const bool r = round.read_available(n), w = round.write_available(n);
            if (r || w) rep.up_query_symbols += queries[n - 1].symbol_count();
            if (r && w) rep.up_query_symbols_both_phases += queries[n - 1].symbol_count();
        }

        // mirror catches up after retrieval: row theta += delta
        Fe* row = mirror_.row(theta);
        for (std::uint32_t l = 0; l < p_.length; ++l) row[l] += delta[l];

        rep.access_touched_per_server = std::uint64_t(p_.blocks) * p_.cfg.submodels;
        const std::int64_t L = p_.length;
        rep.download_cost = Rat(rep.down_symbols, L);
        rep.upload_cost = Rat(rep.up_query_symbols + rep.up_increment_symbols, L);
        rep.increment_upload_cost = Rat(rep.up_increment_symbols, L);
        rep.storage_rate = Rat(p_.cfg.partitions, p_.cfg.servers);
        t_ = t;
        return {std::move(retrieved), std::move(rep)};
    }

    // Drive a whole schedule, drawing theta uniformly from [K] and delta
    // uniformly from F_q^L per round (seeded; bit-exact reruns).
    std::vector<RoundReport> run_schedule(const std::vector<RoundDropouts>& schedule) {
        std::vector<RoundReport> reports;
        reports.reserve(schedule.size());
        for (const RoundDropouts& d : schedule) {
            Rng rng(derive_seed(p_.cfg.seed, kStreamRoundData, t_ + 1));
            const std::uint32_t theta =
                static_cast<std::uint32_t>(rng.below(p_.cfg.submodels)) + 1;
            const std::vector<Fe> delta = rng.uniform_vec(p_.field, p_.length);
            reports.push_back(run_round(theta, delta, d.read, d.write).second);
        }
        return reports;
    }

private:
    SystemParams p_;
    std::vector<ServerStorage> servers_;
    Database mirror_;
    std::uint32_t t_ = 0;
};

// Feasible random schedule: per round, dropout counts are uniform in
// [0, min(max_*, threshold-1)] and the dropout servers are a uniform subset.
inline std::vector<RoundDropouts> random_dropout_schedule(const SystemParams& p,
                                                          std::uint32_t rounds,
                                                          std::uint32_t max_read,
                                                          std::uint32_t max_write,
                                                          std::uint64_t seed) {
    Rng rng(derive_seed(seed, kStreamSchedule, 0));
    const std::uint32_t rcap = std::min(max_read, p.read_threshold - 1);
    const std::uint32_t wcap = std::min(max_write, p.write_threshold - 1);
    auto pick = [&](std::uint32_t count) {
        std::vector<std::uint32_t> pool(p.cfg.servers);
        for (std::uint32_t n = 1; n <= p.cfg.servers; ++n) pool[n - 1] = n;
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < count; ++i) {
            const std::size_t at = i + rng.below(pool.size() - i);
            std::swap(pool[i], pool[at]);
            out.push_back(pool[i]);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<RoundDropouts> sched(rounds);
    for (RoundDropouts& d : sched) {
        d.read = pick(static_cast<std::uint32_t>(rng.below(rcap + 1)));
        d.write = pick(static_cast<std::uint32_t>(rng.below(wcap + 1)));
    }
    return sched;
}

} // namespace acsarw
