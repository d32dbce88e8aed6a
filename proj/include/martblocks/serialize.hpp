#pragma once

#include <string>

#include <json.hpp>

#include "martblocks/atoms.hpp"
#include "martblocks/prob.hpp"

// JSON round-trips for spaces, filtrations, variables, and decomposition
// reports. Numbers are emitted with enough digits to round-trip doubles
// exactly, so equal inputs serialize to equal bytes.

namespace martblocks {

// {"weights": [...], "levels": [[block ids per point] per level],
//  "values": [...]}; weights and levels describe the filtered space the
// values live on.
nlohmann::json rv_to_json(const Rv& f, const Filtration& F);
std::pair<Rv, FiltrationPtr> rv_from_json(const nlohmann::json& j);

nlohmann::json filtration_to_json(const Filtration& F);
FiltrationPtr filtration_from_json(const nlohmann::json& j);

// Blocks with every certificate: kind, cancellation level, and per term
// the coefficient, support level, support points, values, exponent tag.
nlohmann::json block_to_json(const AtomicBlock& b);
AtomicBlock block_from_json(const nlohmann::json& j, const SpacePtr& space);

nlohmann::json report_to_json(const DecompositionReport& r, const Filtration& F);

// Deterministic double formatting (shortest round-trip form).
std::string format_double(double x);

std::string dump_json(const nlohmann::json& j);  // 2-space indent, trailing newline

}  // namespace martblocks
