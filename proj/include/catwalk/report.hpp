#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catwalk/chains.hpp"
#include "catwalk/coupling.hpp"
#include "catwalk/invariance.hpp"
#include "catwalk/limits.hpp"
#include "catwalk/scaling.hpp"
#include "catwalk/stats.hpp"

namespace catwalk
{
using Json = nlohmann::json;

//! Artifact version written into every report.
inline constexpr char const* kVersion = "1.0.0";
//! Version of the JSON report layout.
inline constexpr int kSchemaVersion = 1;

/*!
 * Everything that determines a run's output.
 *
 * The worker count is deliberately absent: it never changes results.
 */
struct RunConfig
{
    std::string command;
    //! Resolved parameters, defaults included. Keys are sorted on output.
    Json params = Json::object();
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
};

Json to_json(RunConfig const& config);
Json to_json(DistanceReport const& report);
Json to_json(Prop1Row const& row);
Json to_json(Prop1Study const& study);
Json to_json(ComparisonReport const& report);
Json to_json(Prop5Report const& report);
Json to_json(LaplaceRow const& row);
Json to_json(MomentCheck const& check);
Json to_json(InvarianceReport const& report);
Json to_json(PathSummary const& summary);

//! {"version", "schema", "config", "result", "pass"} with keys in that order
//! of meaning; the dump is sorted, so output is stable.
Json make_envelope(RunConfig const& config, Json result, bool pass);

//! Shortest text that reads back to the same double.
std::string format_real(double value);

//! `step,value` rows, header first, "\n" line ends.
void write_path_csv(std::ostream& out, DiscretePath const& path);

//! `time,value,kind` rows: the start and horizon as interp, then each jump
//! as a pre row and a post row.
void write_cadlag_csv(std::ostream& out, CadlagPath const& path);

//! Flat numeric CSV tables of the verification results.
void write_csv(std::ostream& out, Prop1Study const& study);
void write_csv(std::ostream& out, ComparisonReport const& report);
void write_csv(std::ostream& out, Prop5Report const& report);
void write_csv(std::ostream& out, InvarianceReport const& report);
void write_csv(std::ostream& out, std::vector<LaplaceRow> const& rows);
}  // namespace catwalk
