#pragma once

// File interchange: design and program JSON, state and report CSV.
//
// Design JSON:
//   {"variable": "epsilon"|"position"|"joint", "divides_by_parameter": bool,
//    "terms": [{"k": int, "beta": float} | {"k1": int, "k2": int, "beta": float}]}
// Program JSON:
//   {"beta0": float, "segments": [{"kind": "rf_x"|"rf_y"|"grad", "magnitude": float}],
//    "provenance": <design JSON + "axis"> | [<...>, ...] | null}
// State CSV:  s,eps,Mx,My,Mz     (s-major, 17 significant digits)
// Report CSV: param,predicted_angle,achieved_angle,state_error,op_error
//
// Doubles are written in shortest round-trip form (JSON) or with 17
// significant digits (CSV), so reading back is bit-exact.

#include "fsyn/analysis.hpp"
#include "fsyn/compiler.hpp"
#include "fsyn/fourier.hpp"
#include "fsyn/simulator.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace fsyn {

std::string to_json(const Design& d);
std::string to_json(const PulseProgram& p);

/// Throws MalformedInput on syntax or schema errors.
Design design_from_json(std::string_view text);
PulseProgram program_from_json(std::string_view text);

std::string states_csv(const SimulationResult& r);
/// Rebuilds mesh and final states; propagators stay empty. The CSV does not
/// carry the initial state, so the caller supplies it. Throws MalformedInput.
SimulationResult states_from_csv(std::string_view text, const SpinState& initial_state);

std::string report_csv(const ProfileErrorReport& r);
std::string series_table_csv(const std::vector<SeriesRow>& rows);

/// One-line human summary of a report's aggregates.
std::string report_summary(const ProfileErrorReport& r);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fsyn
