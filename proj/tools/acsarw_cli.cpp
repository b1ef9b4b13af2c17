// Command-line front end: simulation with JSON-lines traces, exact cost
// tables, worked-example replays, exhaustive privacy/security audits, and a
// quick selftest. Exit codes: 0 success, 1 internal invariant violation or
// failed check, 2 invalid or infeasible input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "acsarw/audit.hpp"
#include "acsarw/config.hpp"
#include "acsarw/sim.hpp"
#include "acsarw/trace.hpp"

namespace {

using namespace acsarw;

// "7/2 (3.500000)" — exact fraction first, decimal for human eyes.
std::string rat_str(const Rat& r) {
    std::ostringstream out;
    if (r.denominator() == 1)
        out << r.numerator();
    else
        out << r.numerator() << "/" << r.denominator();
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.6f)",
                  double(r.numerator()) / double(r.denominator()));
    out << buf;
    return out.str();
}

struct SimulateOpts {
    std::string config_path;
    std::optional<std::uint32_t> rounds;
    std::string schedule_path;
    std::string random_dropouts; // "r,w"
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

int run_simulate(const SimulateOpts& o) {
    RawConfig raw = load_config(o.config_path);
    if (o.seed) raw.seed = *o.seed;
    SystemParams p = derive(raw);

    std::vector<RoundDropouts> schedule;
    if (!o.schedule_path.empty()) {
        schedule = load_schedule(o.schedule_path);
        if (o.rounds) {
            if (schedule.size() < *o.rounds)
                throw ConfigError("schedule has " + std::to_string(schedule.size()) +
                                  " entries but --rounds asks for " + std::to_string(*o.rounds));
            schedule.resize(*o.rounds);
        }
    } else if (!o.random_dropouts.empty()) {
        if (!o.rounds) throw ConfigError("--random-dropouts needs --rounds");
        unsigned r = 0, w = 0;
        if (std::sscanf(o.random_dropouts.c_str(), "%u,%u", &r, &w) != 2)
            throw ConfigError("--random-dropouts expects \"r,w\", got \"" + o.random_dropouts +
                              "\"");
        schedule = random_dropout_schedule(p, *o.rounds, r, w, raw.seed);
    } else {
        schedule.assign(o.rounds.value_or(0), RoundDropouts{});
    }

    Rng dbrng(derive_seed(raw.seed, kStreamRoundData, 0));
    Simulation sim(p, Database::random(p, dbrng));
    std::vector<RoundReport> reports = sim.run_schedule(schedule);

    if (o.out_path.empty()) {
        write_trace(std::cout, reports);
    } else {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open --out file " + o.out_path);
        write_trace(out, reports);
    }
    return 0;
}

struct CostsOpts {
    std::string config_path;
    std::string sweep; // "sr=0..a,sw=0..b"
    bool sweep_x = false;
};

void parse_sweep(const std::string& sweep, std::uint32_t& sr_hi, std::uint32_t& sw_hi) {
    std::stringstream ss(sweep);
    std::string part;
    while (std::getline(ss, part, ',')) {
        unsigned lo = 0, hi = 0;
        if (std::sscanf(part.c_str(), "sr=%u..%u", &lo, &hi) == 2 && lo == 0)
            sr_hi = hi;
        else if (std::sscanf(part.c_str(), "sw=%u..%u", &lo, &hi) == 2 && lo == 0)
            sw_hi = hi;
        else
            throw ConfigError("--sweep expects \"sr=0..a,sw=0..b\", got \"" + part + "\"");
    }
}

int run_costs(const CostsOpts& o) {
    RawConfig raw = load_config(o.config_path);

    if (o.sweep_x) {
        // trade-off table: same shape, storage security swept over its whole
        // admissible range, no dropouts
        std::printf("# storage-security sweep: servers=%u partitions=%u privacy=%u "
                    "increment-security=%u\n",
                    raw.servers, raw.partitions, raw.privacy, raw.increment_security);
        std::printf("%-4s %-12s %-20s %-20s\n", "X", "thresholds", "download", "upload");
        bool any = false;
        for (std::uint32_t x = 1; x + raw.partitions + raw.privacy <= raw.servers; ++x) {
            RawConfig c = raw;
            c.storage_security = x;
            c.modulus = 0; // smallest valid prime for each point
            SystemParams p;
            try {
                p = derive(c);
            } catch (const ConfigError&) {
                continue; // x below the masking floor
            }
            any = true;
            auto [d, u] = closed_form_costs(p, 0, 0);
            char th[32];
            std::snprintf(th, sizeof th, "%u/%u", p.read_threshold, p.write_threshold);
            std::printf("%-4u %-12s %-20s %-20s\n", x, th, rat_str(d).c_str(),
                        rat_str(u).c_str());
        }
        if (!any) throw ConfigError("no storage-security level fits this shape");
        return 0;
    }

    SystemParams p = derive(raw);
    std::uint32_t sr_hi = p.read_threshold, sw_hi = p.write_threshold;
    if (!o.sweep.empty()) parse_sweep(o.sweep, sr_hi, sw_hi);
    std::printf("# servers=%u read-threshold=%u write-threshold=%u\n", raw.servers,
                p.read_threshold, p.write_threshold);
    std::printf("%-4s %-4s %-20s %-20s\n", "sr", "sw", "download", "upload");
    for (std::uint32_t sr = 0; sr <= sr_hi; ++sr) {
        for (std::uint32_t sw = 0; sw <= sw_hi; ++sw) {
            if (sr >= p.read_threshold || sw >= p.write_threshold) {
                std::printf("%-4u %-4u infeasible (%s dropout count at or over threshold)\n", sr,
                            sw, sr >= p.read_threshold ? "read" : "write");
                continue;
            }
            auto [d, u] = closed_form_costs(p, sr, sw);
            std::printf("%-4u %-4u %-20s %-20s\n", sr, sw, rat_str(d).c_str(),
                        rat_str(u).c_str());
        }
    }
    return 0;
}

struct AuditOpts {
    std::string config_path;
    std::string what;
    std::uint64_t budget = 10'000'000;
};

int run_audit(const AuditOpts& o) {
    RawConfig raw = load_config(o.config_path);
    SystemParams p = derive(raw);
    AuditOptions opts;
    opts.budget = o.budget;
    nlohmann::json out;
    out["what"] = o.what;
    out["servers"] = p.cfg.servers;
    out["modulus"] = p.field.modulus();
    nlohmann::json checks = nlohmann::json::array();
    bool pass = true;

    auto subset_name = [](const std::vector<std::uint32_t>& s) {
        std::string n = "{";
        for (std::size_t i = 0; i < s.size(); ++i)
            n += (i ? "," : "") + std::to_string(s[i]);
        return n + "}";
    };

    if (o.what == "privacy") {
        // every T-subset must see the same query distribution for every theta
        for_each_subset(p.cfg.servers, p.cfg.privacy, [&](const std::vector<std::uint32_t>& sub) {
            ViewDistribution base = query_view_distribution(1, sub, p, opts);
            for (std::uint32_t theta = 2; theta <= p.cfg.submodels; ++theta) {
                const bool ok = query_view_distribution(theta, sub, p, opts) == base;
                checks.push_back({{"colluders", subset_name(sub)},
                                  {"theta_pair", "1 vs " + std::to_string(theta)},
                                  {"views", base.size()},
                                  {"pass", ok}});
                pass = pass && ok;
            }
        });
    } else if (o.what == "storage") {
        Rng rng(derive_seed(raw.seed, kStreamRoundData, 0));
        Database db1 = Database::random(p, rng);
        Database db2 = db1;
        db2.at(1, 1) += p.field.one();
        const std::uint32_t X = p.cfg.storage_security;
        for_each_subset(p.cfg.servers, X, [&](const std::vector<std::uint32_t>& sub) {
            auto v1 = storage_view_distribution(db1, sub, p, opts);
            auto v2 = storage_view_distribution(db2, sub, p, opts);
            bool ok = true;
            for (std::uint32_t j = 0; j < p.blocks; ++j) ok = ok && v1[j] == v2[j];
            checks.push_back(
                {{"colluders", subset_name(sub)}, {"claim", "hidden"}, {"pass", ok}});
            pass = pass && ok;
        });
        if (X + 1 <= p.cfg.servers) {
            // tightness: one extra colluder must tell the databases apart
            for_each_subset(p.cfg.servers, X + 1, [&](const std::vector<std::uint32_t>& sub) {
                auto v1 = storage_view_distribution(db1, sub, p, opts);
                auto v2 = storage_view_distribution(db2, sub, p, opts);
                bool differ = false;
                for (std::uint32_t j = 0; j < p.blocks; ++j)
                    if (!(v1[j] == v2[j])) differ = true;
                checks.push_back({{"colluders", subset_name(sub)},
                                  {"claim", "distinguishable"},
                                  {"pass", differ}});
                pass = pass && differ;
            });
        }
    } else if (o.what == "increment") {
        if (p.cfg.increment_security == 0) {
            out["note"] = "no increment masking terms configured; claim is vacuous";
        } else {
            RoundParams round = round_params(p, 1, {}, {});
            Rng rng(derive_seed(raw.seed, kStreamRoundData, 0));
            std::vector<Fe> d1 = rng.uniform_vec(p.field, p.length);
            std::vector<Fe> d2 = rng.uniform_vec(p.field, p.length);
            d2[0] += p.field.one(); // guaranteed distinct
            for_each_subset(p.cfg.servers, p.cfg.increment_security,
                            [&](const std::vector<std::uint32_t>& sub) {
                                auto v1 = increment_view_distribution(d1, sub, round, p, opts);
                                auto v2 = increment_view_distribution(d2, sub, round, p, opts);
                                const bool ok = *v1 == *v2;
                                checks.push_back({{"colluders", subset_name(sub)},
                                                  {"claim", "hidden"},
                                                  {"pass", ok}});
                                pass = pass && ok;
                            });
        }
    } else {
        throw ConfigError("--what must be privacy, storage, or increment");
    }

    out["checks"] = checks;
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
}

// One PASS/FAIL line per pinned quantity; returns whether all matched.
class Differ {
public:
    void rat(const std::string& name, const Rat& want, const Rat& got) {
        const bool ok = want == got;
        std::printf("%s %-24s expected %-18s measured %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                    rat_str(want).c_str(), rat_str(got).c_str());
        note(ok, name);
    }
    void count(const std::string& name, std::uint64_t want, std::uint64_t got) {
        const bool ok = want == got;
        std::printf("%s %-24s expected %-18llu measured %llu\n", ok ? "PASS" : "FAIL",
                    name.c_str(), static_cast<unsigned long long>(want),
                    static_cast<unsigned long long>(got));
        note(ok, name);
    }
    bool all_ok() const { return ok_; }
    const std::string& first_failure() const { return first_fail_; }

private:
    void note(bool ok, const std::string& name) {
        if (!ok && ok_) first_fail_ = name;
        ok_ = ok_ && ok;
    }
    bool ok_ = true;
    std::string first_fail_;
};

int finish(const Differ& d) {
    if (d.all_ok()) {
        std::printf("PASS all quantities match\n");
        return 0;
    }
    std::printf("FAIL first mismatched quantity: %s\n", d.first_failure().c_str());
    return 1;
}

int run_example(const std::string& which) {
    if (which == "5.1") {
        RawConfig raw;
        raw.servers = 8;
        raw.submodels = 2;
        raw.partitions = 1;
        raw.storage_security = 4;
        raw.privacy = 1;
        raw.increment_security = 1;
        raw.scale = 1;
        raw.seed = 1;
        SystemParams p = derive(raw);
        Differ d;
        d.count("length", 6, p.length);
        d.count("read-threshold", 3, p.read_threshold);
        d.count("write-threshold", 3, p.write_threshold);

        Rng rng(derive_seed(raw.seed, kStreamRoundData, 0));
        Simulation sim(p, Database::random(p, rng));
        auto [v1, r1] = sim.run_round(1, rng.uniform_vec(p.field, p.length), {8}, {7, 8});
        d.rat("round-1 download", Rat(7, 2), r1.download_cost);
        d.rat("round-1 upload-increment", Rat(6), r1.increment_upload_cost);
        auto [v2, r2] = sim.run_round(2, rng.uniform_vec(p.field, p.length), {1, 5}, {2});
        d.rat("round-2 download", Rat(6), r2.download_cost);
        d.rat("round-2 upload-increment", Rat(7, 2), r2.increment_upload_cost);
        return finish(d);
    }
    if (which == "3.1.8") {
        RawConfig raw;
        raw.servers = 6;
        raw.submodels = 50;
        raw.partitions = 1;
        raw.storage_security = 3;
        raw.privacy = 1;
        raw.increment_security = 1;
        raw.scale = 35000;
        raw.seed = 1;
        SystemParams p = derive(raw);
        Differ d;
        d.count("length", 70000, p.length);
        d.count("modulus", 11, p.field.modulus());

        Rng rng(derive_seed(raw.seed, kStreamRoundData, 0));
        Simulation sim(p, Database::random(p, rng));
        auto [v, r] = sim.run_round(1, rng.uniform_vec(p.field, p.length), {}, {});
        d.count("query symbols up", 600, r.up_query_symbols);
        d.count("increment symbols up", 210000, r.up_increment_symbols);
        d.count("total symbols up", 210600, r.up_query_symbols + r.up_increment_symbols);
        d.rat("upload", Rat(210600, 70000), r.upload_cost);
        d.rat("download", Rat(3), r.download_cost);
        return finish(d);
    }
    throw ConfigError("--which must be 5.1 or 3.1.8");
}

int run_selftest() {
    Differ d;

    // storage codec roundtrip at the smallest shape
    RawConfig raw;
    raw.servers = 4;
    raw.submodels = 2;
    raw.partitions = 1;
    raw.storage_security = 2;
    raw.privacy = 1;
    raw.increment_security = 1;
    raw.modulus = 7;
    raw.seed = 99;
    SystemParams p = derive(raw);
    Rng rng(derive_seed(raw.seed, kStreamRoundData, 0));
    Database db = Database::random(p, rng);
    auto st = encode_storage(db, StorageNoise::random(p, rng), p);
    d.count("codec roundtrip", 1, decode_database(st, p) == db ? 1 : 0);

    // one dropout-heavy round at the 8-server shape, fully certified
    RawConfig raw8 = raw;
    raw8.servers = 8;
    raw8.storage_security = 4;
    raw8.modulus = 0;
    SystemParams p8 = derive(raw8);
    Rng rng8(derive_seed(raw8.seed, kStreamRoundData, 0));
    Simulation sim(p8, Database::random(p8, rng8));
    RoundArtifacts art;
    art.pre_servers = sim.servers();
    art.pre_mirror = sim.mirror();
    art.theta = 1;
    art.delta = rng8.uniform_vec(p8.field, p8.length);
    art.round = round_params(p8, 1, {2, 3}, {7, 8});
    auto [retrieved, rep] = sim.run_round(art.theta, art.delta, {2, 3}, {7, 8});
    art.retrieved = retrieved;
    art.post_servers = sim.servers();
    d.count("round certificate", 1, certify_round(art, p8).pass() ? 1 : 0);
    d.rat("round download", Rat(6), rep.download_cost);

    // tiny exhaustive privacy audit
    bool priv = true;
    for (std::uint32_t n = 1; n <= 4; ++n)
        priv = priv &&
               query_view_distribution(1, {n}, p) == query_view_distribution(2, {n}, p);
    d.count("query privacy", 1, priv ? 1 : 0);

    return finish(d);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated submodel learning simulator: private reads and masked "
                 "writes over coded storage with elastic server dropouts"};
    app.require_subcommand(1);

    SimulateOpts sim_opts;
    std::uint32_t sim_rounds = 0;
    std::uint64_t sim_seed = 0;
    CLI::App* sim = app.add_subcommand("simulate", "run rounds and emit a JSON-lines trace");
    sim->add_option("--config", sim_opts.config_path, "config JSON path")->required();
    CLI::Option* rounds_opt = sim->add_option("--rounds", sim_rounds, "number of rounds");
    CLI::Option* sched_opt =
        sim->add_option("--schedule", sim_opts.schedule_path, "dropout schedule JSON path");
    CLI::Option* rand_opt = sim->add_option("--random-dropouts", sim_opts.random_dropouts,
                                            "max per-round dropout counts \"r,w\"");
    sched_opt->excludes(rand_opt);
    CLI::Option* seed_opt =
        sim->add_option("--seed", sim_seed, "override the config's master seed");
    sim->add_option("--out", sim_opts.out_path, "trace output path (default stdout)");

    CostsOpts cost_opts;
    CLI::App* costs = app.add_subcommand("costs", "print the exact per-round cost table");
    costs->add_option("--config", cost_opts.config_path, "config JSON path")->required();
    costs->add_option("--sweep", cost_opts.sweep, "dropout ranges \"sr=0..a,sw=0..b\"");
    costs->add_flag("--sweep-x", cost_opts.sweep_x,
                    "sweep the storage-security level instead of dropouts");

    AuditOpts audit_opts;
    CLI::App* audit = app.add_subcommand("audit", "exhaustive privacy/security enumeration");
    audit->add_option("--config", audit_opts.config_path, "config JSON path")->required();
    audit->add_option("--what", audit_opts.what, "privacy | storage | increment")->required();
    audit->add_option("--budget", audit_opts.budget, "max enumerated assignments");

    std::string example_which;
    CLI::App* example = app.add_subcommand("example", "replay a worked example and diff it");
    example->add_option("--which", example_which, "5.1 | 3.1.8")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "quick built-in checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            if (*rounds_opt) sim_opts.rounds = sim_rounds;
            if (*seed_opt) sim_opts.seed = sim_seed;
            return run_simulate(sim_opts);
        }
        if (costs->parsed()) return run_costs(cost_opts);
        if (audit->parsed()) return run_audit(audit_opts);
        if (example->parsed()) return run_example(example_which);
        if (selftest->parsed()) return run_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
