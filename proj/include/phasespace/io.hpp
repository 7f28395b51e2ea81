#pragma once

// Text formats: locale-independent numbers, grid and cut CSV files, and the
// JSON forms of state specs, delta series and reports.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phasespace/deltaseries.hpp"
#include "phasespace/numerics.hpp"
#include "phasespace/states.hpp"
#include "phasespace/witness.hpp"

namespace phasespace::io {

using json = nlohmann::json;

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_number(double v);

std::uint64_t fnv1a(std::string_view bytes);
/// FNV-1a of the compact dump of `config` (object keys sorted), as 16 hex
/// digits.
std::string config_hash(const json& config);

/// `# <title> config=<hash>`, then `x,p,re,im` rows with x outer.
void write_grid_csv(std::ostream& out, const PhaseField& field, std::string_view title,
                    std::string_view hash);

struct CutTable {
  std::vector<std::string> columns;  // first column is the abscissa
  std::vector<std::vector<double>> rows;
};
void write_cut_csv(std::ostream& out, const CutTable& table, std::string_view title,
                   std::string_view hash);

/// {"kind": ..., "params": {...}}. Modifiers ride in params as rotation,
/// displacement_re and displacement_im. "vacuum" and "coherent" (re, im)
/// are accepted as shorthands.
StateSpec state_spec_from_json(const json& j);
json to_json(const StateSpec& spec);

/// {"generator": {"gamma": g} | null, "coeffs": [[q, r, re, im], ...], "order": n}
json to_json(const DeltaSeries& series);
DeltaSeries delta_series_from_json(const json& j);

json to_json(const NonclassicalityReport& report);
json to_json(const FockDiagonalReport& report);

}  // namespace phasespace::io
