#include "arpbo/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arpbo/errors.hpp"

namespace arpbo {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Nearest integer with ties toward the lower value.
double round_half_down(double v) { return std::ceil(v - 0.5); }

const char* kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::Real: return "real";
    case ParamKind::Integer: return "integer";
    case ParamKind::Boolean: return "boolean";
    case ParamKind::Categorical: return "categorical";
  }
  return "?";
}

void check_spec(const ParamSpec& s) {
  if (s.name.empty()) throw ConfigError("parameter with empty name");
  switch (s.kind) {
    case ParamKind::Real:
    case ParamKind::Integer:
      if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !(s.lo < s.hi))
        throw ConfigError("parameter '" + s.name + "': requires finite lo < hi");
      if (s.kind == ParamKind::Integer && (s.lo != std::floor(s.lo) || s.hi != std::floor(s.hi)))
        throw ConfigError("parameter '" + s.name + "': integer bounds must be integral");
      if (s.scale == Scale::Log && !(s.lo > 0.0))
        throw ConfigError("parameter '" + s.name + "': log scale requires lo > 0");
      break;
    case ParamKind::Boolean:
      break;
    case ParamKind::Categorical: {
      if (s.categories.size() < 2)
        throw ConfigError("parameter '" + s.name + "': needs at least 2 categories");
      std::set<std::string> seen(s.categories.begin(), s.categories.end());
      if (seen.size() != s.categories.size())
        throw ConfigError("parameter '" + s.name + "': duplicate category labels");
      break;
    }
  }
}

double to_unit(const ParamSpec& s, double v) {
  if (s.scale == Scale::Log) return std::log(v / s.lo) / std::log(s.hi / s.lo);
  return (v - s.lo) / (s.hi - s.lo);
}

double from_unit(const ParamSpec& s, double u) {
  if (s.scale == Scale::Log) return s.lo * std::exp(u * std::log(s.hi / s.lo));
  return s.lo + u * (s.hi - s.lo);
}

}  // namespace

ParamSpec ParamSpec::real(std::string name, double lo, double hi, Scale scale) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::Real;
  s.lo = lo;
  s.hi = hi;
  s.scale = scale;
  return s;
}

ParamSpec ParamSpec::integer(std::string name, std::int64_t lo, std::int64_t hi, Scale scale) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::Integer;
  s.lo = static_cast<double>(lo);
  s.hi = static_cast<double>(hi);
  s.scale = scale;
  return s;
}

ParamSpec ParamSpec::boolean(std::string name) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::Boolean;
  return s;
}

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> categories) {
  ParamSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::Categorical;
  s.categories = std::move(categories);
  return s;
}

int ParamSpec::arm_count() const {
  if (kind == ParamKind::Boolean) return 2;
  if (kind == ParamKind::Categorical) return static_cast<int>(categories.size());
  return 0;
}

int arm_index(const ParamSpec& spec, double coord) {
  const int k = spec.arm_count();
  const double scaled = clamp01(coord) * (k - 1);
  return std::clamp(static_cast<int>(round_half_down(scaled)), 0, k - 1);
}

double arm_coordinate(const ParamSpec& spec, int arm) {
  const int k = spec.arm_count();
  return static_cast<double>(arm) / (k - 1);
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) throw ConfigError("search space has no parameters");
  std::set<std::string> names;
  for (int i = 0; i < dimension(); ++i) {
    const auto& s = params_[static_cast<std::size_t>(i)];
    check_spec(s);
    if (!names.insert(s.name).second) throw ConfigError("duplicate parameter name '" + s.name + "'");
    switch (s.kind) {
      case ParamKind::Real: real_dims_.push_back(i); break;
      case ParamKind::Integer: integer_dims_.push_back(i); break;
      default: qualitative_dims_.push_back(i); break;
    }
  }
}

SearchSpace SearchSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_array())
    throw ConfigError("space document must be an object with a \"params\" array");
  std::vector<ParamSpec> params;
  for (const auto& p : doc["params"]) {
    try {
      const auto name = p.at("name").get<std::string>();
      const auto kind = p.at("kind").get<std::string>();
      const auto scale = p.value("scale", std::string("linear"));
      if (scale != "linear" && scale != "log")
        throw ConfigError("parameter '" + name + "': unknown scale '" + scale + "'");
      const Scale sc = scale == "log" ? Scale::Log : Scale::Linear;
      if (kind == "real") {
        params.push_back(ParamSpec::real(name, p.at("lo").get<double>(), p.at("hi").get<double>(), sc));
      } else if (kind == "integer") {
        const double lo = p.at("lo").get<double>();
        const double hi = p.at("hi").get<double>();
        if (lo != std::floor(lo) || hi != std::floor(hi))
          throw ConfigError("parameter '" + name + "': integer bounds must be integral");
        params.push_back(ParamSpec::integer(name, static_cast<std::int64_t>(lo),
                                            static_cast<std::int64_t>(hi), sc));
      } else if (kind == "boolean") {
        params.push_back(ParamSpec::boolean(name));
      } else if (kind == "categorical") {
        params.push_back(
            ParamSpec::categorical(name, p.at("categories").get<std::vector<std::string>>()));
      } else {
        throw ConfigError("parameter '" + name + "': unknown kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed parameter entry: ") + e.what());
    }
  }
  return SearchSpace(std::move(params));
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : params_) {
    nlohmann::json p = {{"name", s.name}, {"kind", kind_name(s.kind)}};
    if (s.kind == ParamKind::Real || s.kind == ParamKind::Integer) {
      if (s.kind == ParamKind::Integer) {
        p["lo"] = static_cast<std::int64_t>(s.lo);
        p["hi"] = static_cast<std::int64_t>(s.hi);
      } else {
        p["lo"] = s.lo;
        p["hi"] = s.hi;
      }
      p["scale"] = s.scale == Scale::Log ? "log" : "linear";
    } else if (s.kind == ParamKind::Categorical) {
      p["categories"] = s.categories;
    }
    arr.push_back(std::move(p));
  }
  return {{"params", std::move(arr)}};
}

void SearchSpace::validate(const Point& p) const {
  if (p.size() != params_.size())
    throw ValidationError("point has " + std::to_string(p.size()) + " values, space has " +
                          std::to_string(params_.size()) + " parameters");
  for (const auto& s : params_) {
    auto it = p.find(s.name);
    if (it == p.end()) throw ValidationError("missing value for parameter '" + s.name + "'");
    const ParamValue& v = it->second;
    bool ok = false;
    switch (s.kind) {
      case ParamKind::Real:
        ok = std::holds_alternative<double>(v) && std::get<double>(v) >= s.lo &&
             std::get<double>(v) <= s.hi;
        break;
      case ParamKind::Integer:
        ok = std::holds_alternative<std::int64_t>(v) &&
             static_cast<double>(std::get<std::int64_t>(v)) >= s.lo &&
             static_cast<double>(std::get<std::int64_t>(v)) <= s.hi;
        break;
      case ParamKind::Boolean:
        ok = std::holds_alternative<bool>(v);
        break;
      case ParamKind::Categorical:
        ok = std::holds_alternative<std::string>(v) &&
             std::find(s.categories.begin(), s.categories.end(), std::get<std::string>(v)) !=
                 s.categories.end();
        break;
    }
    if (!ok)
      throw ValidationError("parameter '" + s.name + "': value " + to_string(v) +
                            " outside its " + kind_name(s.kind) + " domain");
  }
}

Point SearchSpace::point_from_json(const nlohmann::json& obj) const {
  if (!obj.is_object()) throw ValidationError("point must be a JSON object");
  Point p;
  for (const auto& s : params_) {
    if (!obj.contains(s.name)) throw ValidationError("missing value for parameter '" + s.name + "'");
    const auto& v = obj[s.name];
    switch (s.kind) {
      case ParamKind::Real:
        if (!v.is_number()) throw ValidationError("parameter '" + s.name + "': expected a number");
        p[s.name] = v.get<double>();
        break;
      case ParamKind::Integer:
        if (v.is_number_integer()) {
          p[s.name] = v.get<std::int64_t>();
        } else if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()) &&
                   std::abs(v.get<double>()) < 9e15) {
          p[s.name] = static_cast<std::int64_t>(v.get<double>());
        } else {
          throw ValidationError("parameter '" + s.name + "': expected an integer");
        }
        break;
      case ParamKind::Boolean:
        if (!v.is_boolean()) throw ValidationError("parameter '" + s.name + "': expected a boolean");
        p[s.name] = v.get<bool>();
        break;
      case ParamKind::Categorical:
        if (!v.is_string()) throw ValidationError("parameter '" + s.name + "': expected a string");
        p[s.name] = v.get<std::string>();
        break;
    }
  }
  if (obj.size() != params_.size()) throw ValidationError("point has unknown parameter names");
  validate(p);
  return p;
}

nlohmann::json SearchSpace::point_to_json(const Point& p) const {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& s : params_) {
    const auto& v = p.at(s.name);
    std::visit([&](const auto& x) { obj[s.name] = x; }, v);
  }
  return obj;
}

WarpedVector warp(const SearchSpace& space, const Point& p) {
  space.validate(p);
  WarpedVector w(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) {
    const auto& s = space.param(i);
    const auto& v = p.at(s.name);
    switch (s.kind) {
      case ParamKind::Real: w(i) = clamp01(to_unit(s, std::get<double>(v))); break;
      case ParamKind::Integer:
        w(i) = clamp01(to_unit(s, static_cast<double>(std::get<std::int64_t>(v))));
        break;
      case ParamKind::Boolean: w(i) = std::get<bool>(v) ? 1.0 : 0.0; break;
      case ParamKind::Categorical: {
        const auto& c = s.categories;
        const auto arm = std::find(c.begin(), c.end(), std::get<std::string>(v)) - c.begin();
        w(i) = arm_coordinate(s, static_cast<int>(arm));
        break;
      }
    }
  }
  return w;
}

Point unwarp(const SearchSpace& space, const WarpedVector& w) {
  if (w.size() != space.dimension())
    throw ShapeError("warped vector has " + std::to_string(w.size()) + " coordinates, space has " +
                     std::to_string(space.dimension()));
  Point p;
  for (int i = 0; i < space.dimension(); ++i) {
    const auto& s = space.param(i);
    const double u = clamp01(w(i));
    switch (s.kind) {
      case ParamKind::Real:
        p[s.name] = std::clamp(from_unit(s, u), s.lo, s.hi);
        break;
      case ParamKind::Integer: {
        const double v = std::clamp(round_half_down(from_unit(s, u)), s.lo, s.hi);
        p[s.name] = static_cast<std::int64_t>(v);
        break;
      }
      case ParamKind::Boolean: p[s.name] = arm_index(s, u) == 1; break;
      case ParamKind::Categorical:
        p[s.name] = s.categories[static_cast<std::size_t>(arm_index(s, u))];
        break;
    }
  }
  return p;
}

Point from_unit_cube(const SearchSpace& space, const Vector& u) {
  if (u.size() != space.dimension()) throw ShapeError("unit-cube vector has wrong dimension");
  WarpedVector w(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) {
    const auto& s = space.param(i);
    const double ui = std::clamp(u(i), 0.0, std::nextafter(1.0, 0.0));
    if (s.is_qualitative()) {
      const int k = s.arm_count();
      w(i) = arm_coordinate(s, std::min(static_cast<int>(ui * k), k - 1));
    } else if (s.kind == ParamKind::Integer && s.scale == Scale::Linear) {
      const auto count = static_cast<std::int64_t>(s.hi - s.lo) + 1;
      const auto step = std::min(static_cast<std::int64_t>(ui * static_cast<double>(count)), count - 1);
      w(i) = static_cast<double>(step) / static_cast<double>(count - 1);
    } else {
      w(i) = ui;
    }
  }
  return unwarp(space, w);
}

Point random_point(const SearchSpace& space, Rng& rng) {
  Vector u(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) u(i) = uniform01(rng);
  return from_unit_cube(space, u);
}

std::string to_string(const ParamValue& v) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          os << (x ? "true" : "false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          os << '"' << x << '"';
        } else {
          os << x;
        }
      },
      v);
  return os.str();
}

}  // namespace arpbo
