#include "io.hpp"

#include <charconv>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace ipslab {
namespace {

const std::vector<std::pair<std::string, ParamsNN2>>& preset_table() {
  static const std::vector<std::pair<std::string, ParamsNN2>> table{
      {"identity", {1.0, 1.0, 0.0, 0.0}},
      {"uniform", {0.5, 0.5, 0.5, 0.5}},
      {"stochastic-ising", {1.0, 0.8, 0.2, 0.0}},
      {"stochastic-ising-noisy", {0.9, 0.8, 0.2, 0.1}},
      {"copy-neighbor", {1.0, 0.2, 0.8, 0.0}},
      {"copy-neighbor-noisy", {0.9, 0.2, 0.8, 0.1}},
      {"flip-neighbor", {0.0, 0.8, 0.2, 1.0}},
      {"flip-neighbor-noisy", {0.1, 0.8, 0.2, 0.9}},
      {"turn-to-zero", {0.0, 0.0, 0.0, 0.0}},
      {"turn-to-zero-noisy", {0.1, 0.1, 0.1, 0.1}},
      {"weak-turn-to-zero", {0.0, 0.0, 1.0, 0.0}},
      {"weak-turn-to-zero-noisy", {0.1, 0.1, 0.9, 0.1}},
      {"coalescing-cp", {1.0, 0.7, 0.7, 0.0}},
      {"coalescing-cp-births", {0.75, 0.75, 0.75, 0.01}},
      {"coalescing-cp-subcritical", {0.75, 0.75, 0.75, 0.0}},
      {"coalescing-cp-supercritical", {0.8, 0.8, 0.8, 0.0}},
      {"annihilating-cp", {0.0, 1.0, 1.0, 0.0}},
      {"annihilating-cp-births", {0.01, 0.9, 0.9, 0.01}},
      {"annihilating-cp-subcritical", {0.0, 0.9, 0.9, 0.0}},
      {"annihilating-cp-supercritical", {0.0, 0.95, 0.95, 0.0}},
      {"noisy-flip", {0.0, 0.0, 1.0, 1.0}},
      {"noisy-flip-correlated", {0.0, 1.0, 1.0, 1.0}},
      {"walls", {0.0, 1.0, 0.0, 0.0}},
      {"walls-noisy", {0.0, 0.9, 0.02, 0.02}},
      {"walls-noisy-connected", {0.0, 0.99, 0.02, 0.02}},
  };
  return table;
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    fail(ErrorKind::parse, std::string("missing field \"") + key + "\"");
  }
  return j.at(key).get<T>();
}

double& axis_slot(ParamsNN2& p, const std::string& name) {
  if (name == "p11") {
    return p.p11;
  }
  if (name == "p10") {
    return p.p10;
  }
  if (name == "p01") {
    return p.p01;
  }
  if (name == "p00") {
    return p.p00;
  }
  fail(ErrorKind::parse, "unknown sweep axis \"" + name + "\" (expected p11, p10, p01 or p00)");
}

template <class F>
auto parse_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("invalid JSON document: ") + e.what());
  }
}

}  // namespace

double round12(double v) {
  if (!std::isfinite(v)) {
    return v;
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  double out = v;
  std::from_chars(buf, res.ptr, out);
  return out == 0.0 ? 0.0 : out;
}

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  if (v == 0.0) {
    v = 0.0;  // drop the sign of negative zero
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

PeriodicRule rule_from_json(const Json& j) {
  return parse_guard([&]() -> PeriodicRule {
    if (!j.is_object()) {
      fail(ErrorKind::parse, "rule must be a JSON object");
    }
    if (j.contains("nn2")) {
      const auto v = j.at("nn2").get<std::vector<double>>();
      if (v.size() != 4) {
        fail(ErrorKind::parse, "nn2 shorthand needs four numbers [p11, p10, p01, p00]");
      }
      return PeriodicRule(make_nn2_rule({v[0], v[1], v[2], v[3]}));
    }
    if (j.contains("preset")) {
      return PeriodicRule(make_nn2_rule(preset(j.at("preset").get<std::string>())));
    }
    const Alphabet alphabet(get_field<int>(j, "alphabet"));
    const auto offsets = get_field<std::vector<int>>(j, "offsets");
    const auto tables = get_field<std::vector<std::vector<std::vector<double>>>>(j, "tables");
    if (j.contains("period") && j.at("period").get<std::size_t>() != tables.size()) {
      fail(ErrorKind::parse, "period does not match the number of tables");
    }
    std::vector<RuleTable> out;
    for (const auto& rows : tables) {
      std::vector<double> flat;
      for (const auto& row : rows) {
        if (row.size() != static_cast<std::size_t>(alphabet.size())) {
          fail(ErrorKind::parse, "every table row needs one probability per symbol");
        }
        flat.insert(flat.end(), row.begin(), row.end());
      }
      out.emplace_back(alphabet, Neighborhood(offsets), std::move(flat));
    }
    return PeriodicRule(std::move(out));
  });
}

Json rule_to_json(const PeriodicRule& rule) {
  Json j;
  j["alphabet"] = rule.alphabet().size();
  j["offsets"] = std::vector<int>(rule.neighborhood().offsets().begin(), rule.neighborhood().offsets().end());
  j["period"] = rule.period();
  Json tables = Json::array();
  for (const auto& t : rule.tables()) {
    Json rows = Json::array();
    for (std::size_t w = 0; w < t.word_count(); ++w) {
      Json row = Json::array();
      for (double p : t.row(w)) {
        row.push_back(round12(p));
      }
      rows.push_back(row);
    }
    tables.push_back(rows);
  }
  j["tables"] = tables;
  if (rule.period() == 1) {
    if (const auto p = nn2_params(rule.tables().front())) {
      j["nn2"] = params_to_json(*p);
    }
  }
  return j;
}

InitLaw init_from_json(const Json& j) {
  return parse_guard([&]() -> InitLaw {
    const auto kind = get_field<std::string>(j, "kind");
    if (kind == "constant") {
      return InitLaw::constant_law(get_field<int>(j, "value"));
    }
    if (kind == "iid") {
      return InitLaw::iid_law(get_field<std::vector<double>>(j, "probs"));
    }
    if (kind == "pattern") {
      return InitLaw::pattern_law(get_field<std::vector<int>>(j, "pattern"));
    }
    if (kind == "interval") {
      return InitLaw::interval_law(get_field<long long>(j, "lo"), get_field<long long>(j, "hi"),
                                   j.value("value", 1), j.value("background", 0));
    }
    fail(ErrorKind::parse, "unknown initial law kind \"" + kind + "\"");
  });
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, p] : preset_table()) {
    names.push_back(name);
  }
  return names;
}

std::optional<ParamsNN2> find_preset(const std::string& name) {
  for (const auto& [n, p] : preset_table()) {
    if (n == name) {
      return p;
    }
  }
  return std::nullopt;
}

ParamsNN2 preset(const std::string& name) {
  if (auto p = find_preset(name)) {
    return *p;
  }
  fail(ErrorKind::domain, "unknown preset \"" + name + "\"");
}

Json params_to_json(const ParamsNN2& p) {
  return Json::array({round12(p.p11), round12(p.p10), round12(p.p01), round12(p.p00)});
}

Json basis_to_json(const ProductBasis& basis) {
  Json j;
  Json xs = Json::array();
  Json ys = Json::array();
  for (double v : basis.xs()) {
    xs.push_back(round12(v));
  }
  for (double v : basis.ys()) {
    ys.push_back(round12(v));
  }
  j["x"] = xs;
  j["y"] = ys;
  return j;
}

Json criterion_to_json(const CriterionReport& rep) {
  Json j;
  j["alpha"] = round12(rep.alpha);
  j["beta"] = round12(rep.beta);
  j["rate"] = round12(rep.rate);
  j["basis"] = basis_to_json(rep.basis);
  j["conditions"] = Json::array({rep.conditions[0], rep.conditions[1], rep.conditions[2], rep.conditions[3]});
  j["verdict"] = rep.pass ? "pass" : "fail";
  return j;
}

Json decomposition_to_json(const DecompositionResult& d) {
  Json j;
  j["mode"] = d.mode == DecompositionMode::additive ? "additive" : "cancellative";
  j["extended"] = d.extended;
  j["feasible"] = d.feasible;
  j["offsets"] = d.offsets;
  j["ones_coeff"] = round12(d.ones_coeff);
  j["identity_coeff"] = round12(d.identity_coeff);
  Json comps = Json::object();
  for (const auto& c : d.components) {
    comps[c.label] = round12(c.coeff);
  }
  j["component_coeffs"] = comps;
  if (d.feasible) {
    j["rate"] = round12(griffeath_rate(d));
  } else {
    j["rate"] = nullptr;
  }
  return j;
}

std::string write_pgm(const std::vector<unsigned char>& pixels, std::size_t width, std::size_t height, bool binary) {
  if (pixels.size() != width * height) {
    fail(ErrorKind::domain, "pixel buffer does not match the image size");
  }
  std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(width) + " " + std::to_string(height) +
                    "\n255\n";
  if (binary) {
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
  }
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c > 0) {
        out += ' ';
      }
      out += std::to_string(pixels[r * width + c]);
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_pgm(const Trajectory& traj, std::size_t frames, bool binary) {
  if (frames == 0) {
    fail(ErrorKind::domain, "raster needs at least one frame");
  }
  const auto rows = traj.raster(frames);
  const std::size_t width = traj.size();
  const auto top = static_cast<double>(traj.alphabet_size() - 1);
  std::vector<unsigned char> pixels;
  pixels.reserve(width * frames);
  for (std::size_t r = rows.size(); r-- > 0;) {
    for (int s : rows[r]) {
      pixels.push_back(static_cast<unsigned char>(std::lround(255.0 * s / top)));
    }
  }
  return write_pgm(pixels, width, frames, binary);
}

std::string events_csv(const Trajectory& traj) {
  std::string out = "time,site,symbol\n";
  for (const Event& e : traj.events()) {
    out += format_number(e.time);
    out += ',';
    out += std::to_string(e.site);
    out += ',';
    out += std::to_string(e.symbol);
    out += '\n';
  }
  return out;
}

std::string distribution_csv(const std::vector<double>& probs) {
  std::string out = "state_index,probability\n";
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out += std::to_string(i) + "," + format_number(probs[i]) + "\n";
  }
  return out;
}

double SweepAxis::value(std::size_t i) const {
  if (steps < 2) {
    return min;
  }
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

namespace {

void validate_sweep(const SweepSpec& spec) {
  if (spec.x.steps < 2 || spec.y.steps < 2) {
    fail(ErrorKind::domain, "sweep axes need at least 2 steps");
  }
  if (spec.x.name == spec.y.name) {
    fail(ErrorKind::domain, "sweep axes must be distinct");
  }
  ParamsNN2 probe = spec.fixed;
  axis_slot(probe, spec.x.name);
  axis_slot(probe, spec.y.name);
}

}  // namespace

SweepSpec sweep_from_json(const Json& j) {
  return parse_guard([&]() -> SweepSpec {
    SweepSpec s;
    if (j.contains("fixed")) {
      for (const auto& [key, value] : j.at("fixed").items()) {
        axis_slot(s.fixed, key) = value.get<double>();
      }
    }
    auto axis = [&](const char* key) {
      const Json& a = j.at(key);
      SweepAxis ax;
      ax.name = get_field<std::string>(a, "name");
      ax.min = a.value("min", 0.0);
      ax.max = a.value("max", 1.0);
      ax.steps = a.value("steps", std::size_t{101});
      return ax;
    };
    s.x = axis("x_axis");
    s.y = axis("y_axis");
    if (j.contains("basis") && j.at("basis").is_array()) {
      const auto b = j.at("basis").get<std::vector<double>>();
      if (b.size() != 2) {
        fail(ErrorKind::parse, "sweep basis must be [x, y]");
      }
      s.basis = ProductBasis::binary(b[0], b[1]);
    }
    s.search_x = j.contains("search_x") ? j.at("search_x").get<std::vector<double>>() : default_x_grid(2);
    s.search_y = j.contains("search_y") ? j.at("search_y").get<std::vector<double>>() : default_y_grid(2);
    s.gray_overlay = j.value("gray_overlay", false);
    s.eps = j.value("eps", kStrictEps);
    validate_sweep(s);
    return s;
  });
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  const std::size_t nx = spec.x.steps;
  const std::size_t ny = spec.y.steps;
  SweepResult res;
  res.spec = spec;
  res.cells.resize(nx * ny);
  parallel_for(nx * ny, [&](std::size_t idx) {
    const std::size_t iy = idx / nx;
    const std::size_t ix = idx % nx;
    ParamsNN2 p = spec.fixed;
    axis_slot(p, spec.x.name) = spec.x.value(ix);
    axis_slot(p, spec.y.name) = spec.y.value(iy);
    const PeriodicRule rule(make_nn2_rule(p));
    SweepCell cell{spec.x.value(ix), spec.y.value(iy), 0.0, false, false};
    if (spec.basis) {
      const CriterionReport rep = criterion_verdict(rule, *spec.basis, spec.eps);
      cell.alpha = rep.alpha;
      cell.pass = rep.pass;
    } else {
      const BasisSearchResult found = basis_search_detailed(rule, spec.search_x, spec.search_y, spec.eps);
      if (found.best_pass) {
        cell.alpha = found.best_pass->alpha;
        cell.pass = true;
      } else if (found.min_alpha) {
        cell.alpha = found.min_alpha->alpha;
      } else {
        cell.alpha = std::nan("");
      }
    }
    cell.gray = in_gray_region(p, spec.eps);
    res.cells[idx] = cell;
  });
  std::string csv = spec.x.name + "," + spec.y.name + ",alpha,verdict";
  csv += spec.gray_overlay ? ",gray\n" : "\n";
  for (const auto& c : res.cells) {
    csv += format_number(c.xv) + "," + format_number(c.yv) + "," + format_number(round12(c.alpha)) + "," +
           (c.pass ? "pass" : "fail");
    if (spec.gray_overlay) {
      csv += c.gray ? ",1" : ",0";
    }
    csv += '\n';
  }
  res.csv = std::move(csv);
  std::vector<unsigned char> pixels(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const std::size_t row = ny - 1 - iy;  // larger y values on top
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const SweepCell& c = res.cells[iy * nx + ix];
      unsigned char v = 255;
      if (c.pass) {
        v = 0;
      } else if (spec.gray_overlay && c.gray) {
        v = 128;
      }
      pixels[row * nx + ix] = v;
    }
  }
  res.pgm = write_pgm(pixels, nx, ny, true);
  return res;
}

}  // namespace ipslab
