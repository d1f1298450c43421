#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "basis.hpp"
#include "estimators.hpp"
#include "rules.hpp"
#include "sim.hpp"

namespace ipslab {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so serialized output is stable.
double round12(double v);
/// Shortest general-format text with 12 significant digits, '.' separator.
std::string format_number(double v);

/// Accepts {"nn2": [p11, p10, p01, p00]} or
/// {"alphabet": q, "offsets": [...], "period": p, "tables": [[[row]...]...]}.
PeriodicRule rule_from_json(const Json& j);
Json rule_to_json(const PeriodicRule& rule);
InitLaw init_from_json(const Json& j);

std::vector<std::string> preset_names();
std::optional<ParamsNN2> find_preset(const std::string& name);
ParamsNN2 preset(const std::string& name);

Json basis_to_json(const ProductBasis& basis);
Json criterion_to_json(const CriterionReport& rep);
Json decomposition_to_json(const DecompositionResult& d);
Json params_to_json(const ParamsNN2& p);

/// PGM image from gray levels (row-major, first row on top).
std::string write_pgm(const std::vector<unsigned char>& pixels, std::size_t width, std::size_t height, bool binary);
/// Space-time raster: one row per frame, latest time on top.
std::string trajectory_pgm(const Trajectory& traj, std::size_t frames, bool binary);
std::string events_csv(const Trajectory& traj);
std::string distribution_csv(const std::vector<double>& probs);

struct SweepAxis {
  std::string name;  // p11, p10, p01 or p00
  double min = 0.0;
  double max = 1.0;
  std::size_t steps = 101;

  double value(std::size_t i) const;
};

struct SweepSpec {
  ParamsNN2 fixed{};
  SweepAxis x;
  SweepAxis y;
  std::optional<ProductBasis> basis;  // none = basis search
  std::vector<double> search_x;
  std::vector<double> search_y;
  bool gray_overlay = false;
  double eps = kStrictEps;
};

SweepSpec sweep_from_json(const Json& j);

struct SweepCell {
  double xv;
  double yv;
  double alpha;
  bool pass;
  bool gray;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // y outer, x inner
  std::string csv;
  std::string pgm;  // binary P5: pass black, fail white, gray-region cells 128
};

SweepResult run_sweep(const SweepSpec& spec);

}  // namespace ipslab
