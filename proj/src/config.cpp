#include "gstate/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gstate/error.hpp"

namespace gstate {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void only_keys(const ojson& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
}

double number(const ojson& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " needs '" + key + "'");
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

Point point(const ojson& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad(where + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point> points(const ojson& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array of [x, y]");
  std::vector<Point> out;
  for (const auto& p : j) out.push_back(point(p, where));
  return out;
}

struct TolField {
  const char* name;
  double Tolerances::*field;
};

const TolField kTolFields[] = {
    {"C_tilde", &Tolerances::C_tilde},
    {"C_max", &Tolerances::C_max},
    {"K_shape", &Tolerances::K_shape},
    {"c_star_floor", &Tolerances::c_star_floor},
    {"mass_floor", &Tolerances::mass_floor},
    {"mass_ceiling", &Tolerances::mass_ceiling},
    {"gradient_ceiling", &Tolerances::gradient_ceiling},
    {"C_agmon", &Tolerances::C_agmon},
    {"C_psi", &Tolerances::C_psi},
    {"agmon_C", &Tolerances::agmon_C},
    {"window_C", &Tolerances::window_C},
    {"scale_K", &Tolerances::scale_K},
    {"scale_floor", &Tolerances::scale_floor},
    {"bisection_rel_tol", &Tolerances::bisection_rel_tol},
    {"logc_floor", &Tolerances::logc_floor},
    {"width_resolution", &Tolerances::width_resolution},
    {"carleman_fraction", &Tolerances::carleman_fraction},
    {"level_margin", &Tolerances::level_margin},
};

}  // namespace

bool RunConfig::enabled(const std::string& group) const {
  return std::find(checks.begin(), checks.end(), group) != checks.end();
}

ojson RunConfig::echo() const {
  ojson j;
  j["domain"] = domain;
  j["potential"] = potential;
  ojson g;
  if (spacing) g["spacing"] = *spacing;
  g["l1_method"] = l1_method == L1Method::Polygon ? "polygon" : "mask";
  j["grid"] = g;
  ojson t;
  for (const auto& f : kTolFields) t[f.name] = tol.*(f.field);
  j["tolerances"] = t;
  j["checks"] = checks;
  j["seed"] = seed;
  return j;
}

RunConfig parse_config(const ojson& j) {
  only_keys(j, {"domain", "potential", "grid", "tolerances", "checks", "output_dir", "seed", "threads"}, "config");
  RunConfig c;
  if (!j.contains("domain")) bad("config needs 'domain'");
  if (!j.contains("potential")) bad("config needs 'potential'");
  c.domain = j.at("domain");
  c.potential = j.at("potential");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    only_keys(g, {"spacing", "l1_method"}, "grid");
    if (g.contains("spacing")) {
      const double s = number(g, "spacing", "grid");
      if (!(s > 0.0)) bad("grid.spacing must be positive");
      c.spacing = s;
    }
    if (g.contains("l1_method")) {
      const auto m = g.at("l1_method");
      if (m == "polygon") c.l1_method = L1Method::Polygon;
      else if (m == "mask") c.l1_method = L1Method::Mask;
      else bad("grid.l1_method must be 'polygon' or 'mask'");
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) bad("tolerances must be an object");
    for (const auto& [k, v] : t.items()) {
      bool found = false;
      for (const auto& f : kTolFields)
        if (k == f.name) {
          if (!v.is_number() || !(v.get<double>() > 0.0)) bad("tolerance '" + k + "' must be a positive number");
          c.tol.*(f.field) = v.get<double>();
          found = true;
        }
      if (!found) bad("unknown tolerance '" + k + "'");
    }
    if (!(c.tol.carleman_fraction <= 1.0)) bad("tolerance 'carleman_fraction' must not exceed 1");
    if (!(c.tol.level_margin < 0.5)) bad("tolerance 'level_margin' must be below 0.5");
  }
  std::set<std::string> wanted;
  if (!j.contains("checks")) {
    wanted.insert("all");
  } else {
    if (!j.at("checks").is_array()) bad("checks must be an array of group names");
    for (const auto& v : j.at("checks")) {
      if (!v.is_string()) bad("checks must be an array of group names");
      const std::string s = v.get<std::string>();
      if (s != "all" && std::find(check_groups().begin(), check_groups().end(), s) == check_groups().end())
        bad("unknown check group '" + s + "'");
      wanted.insert(s);
    }
  }
  for (const auto& g : check_groups())
    if (wanted.count("all") || wanted.count(g)) c.checks.push_back(g);
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) bad("output_dir must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) bad("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1) bad("threads must be a positive integer");
    c.threads = j.at("threads").get<int>();
  }
  // Build once so that malformed shapes fail at parse time.
  build_potential(c.potential, build_domain(c.domain));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ojson j;
  try {
    j = ojson::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

ConvexDomain build_domain(const ojson& d) {
  if (!d.is_object() || !d.contains("type") || !d.at("type").is_string()) bad("domain needs a string 'type'");
  const std::string type = d.at("type").get<std::string>();
  if (type == "polygon") {
    only_keys(d, {"type", "vertices"}, "domain");
    if (!d.contains("vertices")) bad("polygon domain needs 'vertices'");
    return ConvexDomain::from_polygon(points(d.at("vertices"), "domain.vertices"));
  }
  if (type == "graph") {
    only_keys(d, {"type", "a", "b", "g1", "g2"}, "domain");
    GraphForm g;
    g.a = number(d, "a", "domain");
    g.b = number(d, "b", "domain");
    if (!d.contains("g1") || !d.contains("g2")) bad("graph domain needs 'g1' and 'g2'");
    g.g1 = points(d.at("g1"), "domain.g1");
    g.g2 = points(d.at("g2"), "domain.g2");
    return ConvexDomain::from_graph(g);
  }
  if (type == "triangle_example") {
    only_keys(d, {"type", "N1", "N2"}, "domain");
    return triangle_example_domain(number(d, "N1", "domain"), number(d, "N2", "domain"));
  }
  bad("unknown domain type '" + type + "'");
}

Potential build_potential(const ojson& p, const ConvexDomain& domain) {
  if (!p.is_object() || !p.contains("type") || !p.at("type").is_string()) bad("potential needs a string 'type'");
  const std::string type = p.at("type").get<std::string>();
  if (type == "constant") {
    only_keys(p, {"type"}, "potential");
    return Potential{constant_height(domain)};
  }
  if (type == "cone") {
    only_keys(p, {"type", "peak", "slope", "facets"}, "potential");
    if (!p.contains("peak")) bad("cone potential needs 'peak'");
    int facets = 256;
    if (p.contains("facets")) {
      if (!p.at("facets").is_number_integer()) bad("potential.facets must be an integer");
      facets = p.at("facets").get<int>();
    }
    return Potential{cone_height(domain, point(p.at("peak"), "potential.peak"), number(p, "slope", "potential"), facets)};
  }
  if (type == "triangle_example") {
    only_keys(p, {"type", "N1", "N2"}, "potential");
    number(p, "N1", "potential");
    const double n2 = number(p, "N2", "potential");
    if (!(n2 > 0.0)) bad("potential.N2 must be positive");
    return Potential{make_min_affine({AffinePiece{1.0 / n2, 0.0, 0.0}}, domain)};
  }
  if (type == "min_affine") {
    only_keys(p, {"type", "pieces"}, "potential");
    if (!p.contains("pieces") || !p.at("pieces").is_array()) bad("min_affine potential needs 'pieces'");
    std::vector<AffinePiece> pieces;
    for (const auto& q : p.at("pieces")) {
      if (!q.is_array() || q.size() != 3) bad("each piece must be [a, b, c]");
      for (const auto& v : q)
        if (!v.is_number()) bad("each piece must be [a, b, c]");
      pieces.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>()});
    }
    return Potential{make_min_affine(std::move(pieces), domain)};
  }
  bad("unknown potential type '" + type + "'");
}

}  // namespace gstate
