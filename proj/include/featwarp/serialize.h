#pragma once

#include <iosfwd>

#include <json.hpp>

#include "featwarp/diagnostics.h"
#include "featwarp/models.h"
#include "featwarp/warper.h"

namespace featwarp {

using Json = nlohmann::ordered_json;

// Matrices are stored row-major as nested arrays; doubles use the shortest
// round-trip decimal. Loading reconstructs through the validating
// constructors, so invariants are re-checked.
Json to_json(const LinearWarper& warper);
LinearWarper warper_from_json(const Json& doc);

// {"type": "linear" | "random-forest" | "warped", ...}; warped documents
// embed their warper and base model by value.
Json to_json(const Predictor& model);
PredictorPtr predictor_from_json(const Json& doc);

Json to_json(const EffectCurve& curve);
Json to_json(const EffectSurface& surface);
Json to_json(const ImportanceReport& report);

// One row per grid point: feature,kind,grid,value,support
void write_curve_csv(std::ostream& out, const EffectCurve& curve);
// One row per grid cell: feature_a,feature_b,kind,grid_a,grid_b,value
void write_surface_csv(std::ostream& out, const EffectSurface& surface);
// One row per feature and replicate: feature,rank,importance,sd,replicate,loss
void write_importance_csv(std::ostream& out, const ImportanceReport& report);

}  // namespace featwarp
