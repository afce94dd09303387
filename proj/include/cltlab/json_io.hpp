#pragma once

#include "cltlab/isotropy.hpp"
#include "cltlab/model.hpp"

#include <json.hpp>

namespace cltlab {

using Json = nlohmann::ordered_json;

/// Parses a body description. `n` supplies the dimension when "dim" is
/// absent; pass 0 to require it. Product factors without "dim" share the
/// remaining dimension equally. Throws std::invalid_argument on bad input.
BodySpec body_from_json(const Json& j, Index n);
Json to_json(const BodySpec& body);

/// Accepts {"type": "uniform", "body": ...}, {"type": "gaussian"},
/// {"type": "product_1d", "labels": [...]} or a bare body (read as uniform).
DensitySpec density_from_json(const Json& j, Index n);
Json to_json(const DensitySpec& density);

/// {"type": "affine", "linear": [[...]], "shift": [...]}.
AffineMap affine_from_json(const Json& j);
Json to_json(const AffineMap& map);

Json to_json(const Vector& v);
Json to_json(const Matrix& a);
Vector vector_from_json(const Json& j, const char* what);
Matrix matrix_from_json(const Json& j, const char* what);

}  // namespace cltlab
