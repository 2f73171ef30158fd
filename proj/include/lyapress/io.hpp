#ifndef LYAPRESS_IO_HPP
#define LYAPRESS_IO_HPP

#include <string>

#include <json.hpp>

#include "lyapress/dominated.hpp"
#include "lyapress/spectrum.hpp"

namespace lyapress {

inline constexpr const char* kSchemaVersion = "1";

using Json = nlohmann::ordered_json;

/// Cocycle spec schema:
/// { "alphabet_size": k, "transitions": [[0/1]], "dimension": d,
///   "window": w, "holder_alpha": a, "generators": { "<word>": [[..]..] },
///   "window_anchor": 0 }            (anchor optional, defaults to 0)
CocycleSpec cocycle_from_json(const Json& j);
Json cocycle_to_json(const CocycleSpec& c);
CocycleSpec load_cocycle_spec(const std::string& path);
void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

Json pressure_to_json(const PressureEstimate& e);
Json verdict_to_json(const StructureVerdict& v);

Json markov_to_json(const MarkovMeasure& m);
MarkovMeasure markov_from_json(const SubshiftSpec& sft, const Json& j);

/// Induced system: the one-step cocycle schema extended with an "induced"
/// block (letters, cone parameters, core depth, K0).  Loading re-verifies
/// every letter's cone certificate.
Json induced_to_json(const InducedCocycle& ic);
InducedCocycle induced_from_json(const Json& j, const ConeCheckOptions& cone_opts = {});

/// Spectrum CSV: alpha_1..alpha_d, entropy, method, n, q_star_1..q_star_d, flags
std::string spectrum_csv(const std::vector<SpectrumPoint>& points, int d);

std::string comparison_csv(const std::vector<PressureComparisonRow>& rows);

/// Fixed-format float used in CSV artifacts (%.17g; bit-faithful).
std::string format_double(double v);

} // namespace lyapress

#endif
