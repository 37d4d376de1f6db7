#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "prlab/cylinders.hpp"
#include "prlab/energy.hpp"
#include "prlab/flows.hpp"
#include "prlab/hausdorff.hpp"
#include "prlab/pressure_local.hpp"
#include "prlab/regularity.hpp"
#include "prlab/solver.hpp"

namespace prlab {

using Json = nlohmann::json;

constexpr std::uint32_t kSnapshotVersion = 1;

/// "PRLB", version, N, L, t, field roster, payload length and CRC-32, header CRC-32, then
/// little-endian doubles (x fastest) for u0 u1 u2 d0 d1 d2 p.
void write_snapshot(const State& s, const std::string& path);
State read_snapshot(const std::string& path);

/// snapshot_NNNNNN.prlb per slice, energy.csv and run.json.
void write_trajectory(const Trajectory& traj, const std::string& dir);
Trajectory read_trajectory(const std::string& dir);

void write_energy_csv(const std::vector<GlobalEnergyRecord>& records, const std::string& path);
void write_local_energy_csv(const LocalEnergyAudit& audit, const std::string& path);
void write_slope_csv(const SingularScanReport& rep, const std::string& path);
void write_text(const std::string& path, const std::string& text);

struct OutputConfig {
  std::string directory = "out";
};

struct RunConfig {
  SolverConfig solver;
  InitialRecipe initial;
  RegularityConfig detector;
  OutputConfig output;
};

/// Sections solver, initial, detector and output; every key is optional, unknown keys are refused.
RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);
Json to_json(const RunConfig& c);
void validate(const RunConfig& c);

Json to_json(const QuantityReport& r);
Json to_json(const DetectorVerdict& v);
Json to_json(const LadderReport& r);
Json to_json(const PressureDecomposition& d);
Json to_json(const GronwallCheck& g);
Json to_json(const VitaliCover& c, const std::vector<SpaceTimeBall>& family);
/// CoverReport: candidates, selection, the P^k_δ table and the budget.
Json to_json(const SingularScanReport& r);
Json scan_summary(const ScanReport& scan, const ScanClassification& cls);

/// {"error": name, "message": text, "exit_code": n}
Json error_record(const Error& e);
/// 2 usage and schema, 3 resolution, 4 window or support, 5 files, 6 numerical failure, 1 otherwise.
int exit_code(ErrorCode code);

}  // namespace prlab
