#pragma once
// Run configuration: JSON in, validated structure out. Unknown keys and
// non-positive tolerances are rejected with InvalidConfig.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstate/analysis.hpp"
#include "gstate/potential.hpp"
#include "gstate/scales.hpp"

namespace gstate {

using ojson = nlohmann::ordered_json;

inline const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> g{"scales", "height", "eigen", "sandwich", "mu", "carleman", "mass",
                                          "level_shape", "max_gradients", "log_concavity", "agmon", "dpsi"};
  return g;
}

struct RunConfig {
  ojson domain;
  ojson potential;
  std::optional<double> spacing;
  L1Method l1_method = L1Method::Polygon;
  Tolerances tol;
  std::vector<std::string> checks;  // enabled groups, in registry order
  std::string output_dir = "gstate_out";
  std::uint64_t seed = 1;
  int threads = 1;

  bool enabled(const std::string& group) const;
  // Everything that can influence results (threads excluded).
  ojson echo() const;
};

RunConfig parse_config(const ojson& j);
RunConfig load_config(const std::string& path);

ConvexDomain build_domain(const ojson& d);
Potential build_potential(const ojson& p, const ConvexDomain& domain);

}  // namespace gstate
