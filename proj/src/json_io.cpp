#include "cltlab/json_io.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cltlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

std::string type_of(const Json& j, const char* what) {
  if (!j.is_object()) bad(std::string(what) + ": expected a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) bad(std::string(what) + ": missing string field 'type'");
  return j["type"].get<std::string>();
}

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

Index body_dim(const Json& j, Index n) {
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) bad("body: 'dim' must be a positive integer");
    return static_cast<Index>(j["dim"].get<long long>());
  }
  if (n < 1) bad("body: 'dim' is required here");
  return n;
}

bool is_body_type(const std::string& t) {
  return t == "cube" || t == "ball" || t == "simplex" || t == "hpolytope" || t == "ellipsoid" ||
         t == "product";
}

/// Dimension a factor declares explicitly, or 0.
Index declared_dim(const Json& j) {
  if (j.contains("dim") && j["dim"].is_number_integer()) return static_cast<Index>(j["dim"].get<long long>());
  const std::string t = j.value("type", "");
  if (t == "hpolytope" && j.contains("interior") && j["interior"].is_array()) {
    return static_cast<Index>(j["interior"].size());
  }
  if (t == "ellipsoid") {
    if (j.contains("diag") && j["diag"].is_array()) return static_cast<Index>(j["diag"].size());
    if (j.contains("shape") && j["shape"].is_array()) return static_cast<Index>(j["shape"].size());
  }
  return 0;
}

}  // namespace

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Matrix& a) {
  Json out = Json::array();
  for (Index r = 0; r < a.rows(); ++r) out.push_back(to_json(Vector(a.row(r).transpose())));
  return out;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(std::string(what) + ": expected an array of numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) bad(std::string(what) + ": expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix a(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from_json(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) bad(std::string(what) + ": ragged rows");
    a.row(static_cast<Index>(r)) = row.transpose();
  }
  return a;
}

BodySpec body_from_json(const Json& j, Index n) {
  const std::string t = type_of(j, "body");
  if (t == "cube") {
    const Index d = body_dim(j, n);
    return BodySpec::cube(d, number(j, "half_side", std::sqrt(3.0)));
  }
  if (t == "ball") {
    const Index d = body_dim(j, n);
    return BodySpec::ball(d, number(j, "radius", std::sqrt(static_cast<double>(d) + 2.0)));
  }
  if (t == "simplex") {
    const Index d = body_dim(j, n);
    bool standardize = true;
    if (j.contains("standardize")) {
      if (!j["standardize"].is_boolean()) bad("simplex: 'standardize' must be a boolean");
      standardize = j["standardize"].get<bool>();
    }
    return BodySpec::simplex(d, standardize);
  }
  if (t == "hpolytope") {
    if (!j.contains("normals") || !j.contains("offsets") || !j.contains("interior")) {
      bad("hpolytope: requires 'normals', 'offsets' and 'interior'");
    }
    return BodySpec::hpolytope(matrix_from_json(j["normals"], "hpolytope normals"),
                               vector_from_json(j["offsets"], "hpolytope offsets"),
                               vector_from_json(j["interior"], "hpolytope interior"));
  }
  if (t == "ellipsoid") {
    if (j.contains("diag")) {
      const Vector d = vector_from_json(j["diag"], "ellipsoid diag");
      return BodySpec::ellipsoid(Matrix(d.asDiagonal()));
    }
    if (!j.contains("shape")) bad("ellipsoid: requires 'shape' or 'diag'");
    return BodySpec::ellipsoid(matrix_from_json(j["shape"], "ellipsoid shape"));
  }
  if (t == "product") {
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty()) {
      bad("product: requires a nonempty 'factors' array");
    }
    const auto& factors = j["factors"];
    Index fixed = 0;
    Index open = 0;
    for (const auto& f : factors) {
      const Index d = declared_dim(f);
      if (d > 0) {
        fixed += d;
      } else {
        ++open;
      }
    }
    Index share = 0;
    if (open > 0) {
      const Index total = body_dim(j, n);
      if (total <= fixed || (total - fixed) % open != 0) {
        bad("product: cannot split the remaining dimension equally between factors");
      }
      share = (total - fixed) / open;
    }
    std::vector<BodySpec> parts;
    for (const auto& f : factors) parts.push_back(body_from_json(f, declared_dim(f) > 0 ? 0 : share));
    BodySpec p = BodySpec::product(std::move(parts));
    if (j.contains("dim") && p.dim() != body_dim(j, n)) bad("product: factor dimensions do not add up to 'dim'");
    return p;
  }
  bad("body: unknown type '" + t + "'");
}

Json to_json(const BodySpec& body) {
  Json out;
  out["type"] = body.kind();
  out["dim"] = body.dim();
  std::visit(Overloaded{
                 [&](const body::Cube& c) { out["half_side"] = c.half_side; },
                 [&](const body::Ball& b) { out["radius"] = b.radius; },
                 [&](const body::Simplex& s) { out["standardize"] = s.standardize; },
                 [&](const body::HPolytope& p) {
                   out["normals"] = to_json(p.normals);
                   out["offsets"] = to_json(p.offsets);
                   out["interior"] = to_json(p.interior);
                 },
                 [&](const body::Ellipsoid& e) { out["shape"] = to_json(e.shape); },
                 [&](const body::Product& p) {
                   Json factors = Json::array();
                   for (const auto& f : p.factors) factors.push_back(to_json(f));
                   out["factors"] = std::move(factors);
                 },
             },
             body.shape());
  return out;
}

DensitySpec density_from_json(const Json& j, Index n) {
  const std::string t = type_of(j, "density");
  if (is_body_type(t)) return DensitySpec::uniform_on(body_from_json(j, n));
  if (t == "uniform") {
    if (!j.contains("body")) bad("uniform density: requires 'body'");
    return DensitySpec::uniform_on(body_from_json(j["body"], n));
  }
  if (t == "gaussian") return DensitySpec::gaussian(body_dim(j, n), number(j, "variance", 1.0));
  if (t == "product_1d") {
    if (!j.contains("labels") || !j["labels"].is_array() || j["labels"].empty()) {
      bad("product_1d: requires a nonempty 'labels' array");
    }
    std::vector<std::string> labels;
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) bad("product_1d: labels must be strings");
      labels.push_back(l.get<std::string>());
    }
    // A single label is repeated to fill the dimension.
    if (labels.size() == 1) labels.assign(static_cast<std::size_t>(body_dim(j, n)), labels[0]);
    return DensitySpec::product_1d(std::move(labels));
  }
  bad("density: unknown type '" + t + "'");
}

Json to_json(const DensitySpec& density) {
  Json out;
  std::visit(Overloaded{
                 [&](const density::Uniform& u) {
                   out["type"] = "uniform";
                   out["body"] = to_json(u.body);
                 },
                 [&](const density::Gaussian& g) {
                   out["type"] = "gaussian";
                   out["dim"] = g.dim;
                   out["variance"] = g.variance;
                 },
                 [&](const density::Product1D& p) {
                   out["type"] = "product_1d";
                   out["labels"] = p.labels;
                 },
             },
             density.shape());
  return out;
}

AffineMap affine_from_json(const Json& j) {
  if (type_of(j, "affine map") != "affine") bad("affine map: type must be 'affine'");
  if (!j.contains("linear") || !j.contains("shift")) bad("affine map: requires 'linear' and 'shift'");
  return AffineMap(matrix_from_json(j["linear"], "affine linear"), vector_from_json(j["shift"], "affine shift"));
}

Json to_json(const AffineMap& map) {
  Json out;
  out["type"] = "affine";
  out["linear"] = to_json(map.linear());
  out["shift"] = to_json(map.shift());
  return out;
}

}  // namespace cltlab
