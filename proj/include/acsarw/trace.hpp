#pragma once

// JSON-lines trace output: one line per round with a fixed key set, so traces
// diff cleanly and golden files never see float drift.

#include <ostream>

#include <nlohmann/json.hpp>

#include "acsarw/sim.hpp"

namespace acsarw {

inline nlohmann::json trace_line(const RoundReport& r) {
    nlohmann::json j;
    j["t"] = r.t;
    j["theta"] = r.theta;
    j["read_dropouts"] = r.read_dropouts;
    j["write_dropouts"] = r.write_dropouts;
    j["down_symbols"] = r.down_symbols;
    j["up_query_symbols"] = r.up_query_symbols;
    j["up_increment_symbols"] = r.up_increment_symbols;
    j["D_num"] = r.download_cost.numerator();
    j["D_den"] = r.download_cost.denominator();
    j["U_num"] = r.upload_cost.numerator();
    j["U_den"] = r.upload_cost.denominator();
    return j;
}

inline void write_trace(std::ostream& out, const std::vector<RoundReport>& reports) {
    for (const RoundReport& r : reports) out << trace_line(r).dump() << '\n';
}

} // namespace acsarw
