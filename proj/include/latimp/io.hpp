// io.hpp — CSV/JSON serialization of lattices, sweeps, trajectories, maps.
#pragma once

#include <filesystem>
#include <string>

#include "latimp/dynamics.hpp"
#include "latimp/experiments.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace latimp::io {

using json = nlohmann::json;

json lattice_to_json(const LatticeSpec& spec, const EmitterArray& array);
std::string lattice_to_csv(const EmitterArray& array);

std::string sweep_to_csv(const SweepCurve& curve);
json sweep_sidecar_json(const SweepCurve& curve);

// Row-major complex pairs [re, im] for cross-language diffing.
json matrix_dump_json(const CouplingSystem& system);

std::string trajectory_to_csv(const Trajectory& t, bool per_atom = false);

json table1_report_json(const std::vector<GeometryComparisonRecord>& records);

json vacancy_report_json(const VacancyScanResult& result);

std::string position_map_to_csv(const PositionMap& map);
json position_map_json(const PositionMap& map);
std::string position_map_cut_csv(const PositionMap& map);

std::string plaquette_couplings_csv(const std::vector<PlaquetteCouplingRow>& rows);

LatticeSpec lattice_spec_from_json(const json& j);
json lattice_spec_to_json(const LatticeSpec& spec);
SweepOptions sweep_options_from_json(const json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace latimp::io
