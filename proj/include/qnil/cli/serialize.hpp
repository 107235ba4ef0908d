#pragma once

// JSON forms of the core value types. Complex scalars are [re, im] pairs;
// coordinate vectors use the sparse {"index", "re", "im"} entry form.

#include <json.hpp>

#include "qnil/coordspace.hpp"
#include "qnil/quasinil.hpp"
#include "qnil/subspace.hpp"

namespace qnil::cli {

using nlohmann::json;

json scalar_to_json(Scalar z);
Scalar scalar_from_json(const json& j);

json to_json(const CoordVector& x);
CoordVector coord_vector_from_json(const json& j);

json to_json(const RadiusSequence& s);
RadiusSequence radius_sequence_from_json(const json& j);

json to_json(const QnilVerdict& v);
json to_json(const SubspaceResult& r);
json to_json(const WeightedSubspaceResult& r);
json to_json(const JsrEstimate& e);
json to_json(const IdealSupport& s);

/// "1 2 1 2 ..." style rendering of a periodic pattern.
std::string render_periodic_word(const Word& w, std::size_t repeats = 2);

}  // namespace qnil::cli
