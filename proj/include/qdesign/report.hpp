#pragma once

#include <json.hpp>

#include "qdesign/curves.hpp"
#include "qdesign/designs.hpp"
#include "qdesign/field.hpp"
#include "qdesign/group_actions.hpp"
#include "qdesign/quadratic_family.hpp"

namespace qdesign {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using nlohmann::json;

// Adds the top-level schema_version key.
json document(json body);

json to_json(const FieldCtx& ctx);
json to_json(const FamilySpec& spec);
json to_json(const Spectrum& s);
json to_json(const DesignReport& r);
json to_json(const BluherReport& r);
json to_json(const CasePrediction& c);
json to_json(const CaseReport& r);
json to_json(const StabilizerReport& r);
json to_json(const HomogeneityReport& r);
json to_json(const EqualityReport& r);
json to_json(const CurveReport& r);

}  // namespace qdesign
