#include "lifespan/datum_json.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace lifespan {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("datum json: " + what); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::vector<double> vector(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_array()) bad(std::string("field '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad(std::string("field '") + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  ok.insert("shape");
  ok.insert("dimension");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) bad("unknown field '" + it.key() + "'");
}

Shape shape_from_json(const json& j, int dim) {
  if (!j.is_object()) bad("shape description must be an object");
  if (!j.contains("shape") || !j.at("shape").is_string()) bad("missing string field 'shape'");
  const std::string kind = j.at("shape").get<std::string>();
  if (kind == "constant") {
    only_keys(j, {"amplitude"});
    return Constant{number(j, "amplitude")};
  }
  if (kind == "radial_rings") {
    only_keys(j, {"radii", "amplitude", "smoothing_width"});
    return RadialRings{vector(j, "radii"), number_or(j, "amplitude", 1.0), number_or(j, "smoothing_width", 0.25)};
  }
  if (kind == "factorial_rings") {
    only_keys(j, {"k_max"});
    const json& k = j.contains("k_max") ? j.at("k_max") : json();
    if (!k.is_number_integer()) bad("factorial_rings needs integer 'k_max'");
    return build_factorial_rings(k.get<int>(), dim).shape();
  }
  if (kind == "conic_sector") {
    only_keys(j, {"axis", "half_width", "amplitude", "inner_radius", "smoothing_width"});
    return ConicSector{vector(j, "axis"), number(j, "half_width"), number_or(j, "amplitude", 1.0),
                       number_or(j, "inner_radius", 0.0), number_or(j, "smoothing_width", 0.25)};
  }
  if (kind == "gaussian_bump") {
    only_keys(j, {"center", "amplitude", "width"});
    Point center = j.contains("center") ? vector(j, "center") : Point(static_cast<std::size_t>(dim), 0.0);
    return GaussianBump{std::move(center), number_or(j, "amplitude", 1.0), number_or(j, "width", 1.0)};
  }
  if (kind == "periodic_stripe") {
    only_keys(j, {"period", "duty", "amplitude", "smoothing_width"});
    return PeriodicStripe{number(j, "period"), number_or(j, "duty", 0.5), number_or(j, "amplitude", 1.0),
                          number_or(j, "smoothing_width", 0.1)};
  }
  if (kind == "max") {
    only_keys(j, {"parts"});
    if (!j.contains("parts") || !j.at("parts").is_array()) bad("max needs array 'parts'");
    MaxOf m;
    for (const json& part : j.at("parts")) m.parts.push_back(shape_from_json(part, dim));
    return m;
  }
  bad("unknown shape '" + kind + "'");
}

json shape_to_json(const Shape& shape) {
  struct ToJson {
    json operator()(const Constant& s) const { return {{"shape", "constant"}, {"amplitude", s.amplitude}}; }
    json operator()(const RadialRings& s) const {
      return {{"shape", "radial_rings"},
              {"radii", s.radii},
              {"amplitude", s.amplitude},
              {"smoothing_width", s.smoothing_width}};
    }
    json operator()(const ConicSector& s) const {
      return {{"shape", "conic_sector"},       {"axis", s.axis},
              {"half_width", s.half_width},    {"amplitude", s.amplitude},
              {"inner_radius", s.inner_radius}, {"smoothing_width", s.smoothing_width}};
    }
    json operator()(const GaussianBump& s) const {
      return {{"shape", "gaussian_bump"}, {"center", s.center}, {"amplitude", s.amplitude}, {"width", s.width}};
    }
    json operator()(const PeriodicStripe& s) const {
      return {{"shape", "periodic_stripe"},
              {"period", s.period},
              {"duty", s.duty},
              {"amplitude", s.amplitude},
              {"smoothing_width", s.smoothing_width}};
    }
    json operator()(const MaxOf& s) const {
      json parts = json::array();
      for (const Shape& p : s.parts) parts.push_back(shape_to_json(p));
      return {{"shape", "max"}, {"parts", parts}};
    }
  };
  return std::visit(ToJson{}, shape.value);
}

}  // namespace

InitialDatum datum_from_json(const json& j) {
  if (!j.is_object()) bad("datum must be an object");
  if (!j.contains("dimension") || !j.at("dimension").is_number_integer()) bad("missing integer field 'dimension'");
  const int dim = j.at("dimension").get<int>();
  if (dim < 1 || dim > kMaxDimension) bad("dimension must be 1, 2 or 3");
  return InitialDatum(dim, shape_from_json(j, dim));
}

json datum_to_json(const InitialDatum& datum) {
  json j = shape_to_json(datum.shape());
  j["dimension"] = datum.dimension();
  return j;
}

}  // namespace lifespan
