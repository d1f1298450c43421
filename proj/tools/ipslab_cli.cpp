// ipslab command-line front end. Every subcommand is a thin layer over the C
// API in ipslab/ipslab.h.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ipslab/ipslab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ipslab_status status) {
  if (status != IPSLAB_OK) {
    throw CliError(std::string(ipslab_status_string(status)) + ": " + ipslab_last_error());
  }
}

struct Text {
  char* ptr = nullptr;
  size_t len = 0;
  ~Text() { ipslab_free_string(ptr); }
  std::string str() const { return len > 0 ? std::string(ptr, len) : std::string(ptr ? ptr : ""); }
};

struct RuleHandle {
  ipslab_rule* ptr = nullptr;
  ~RuleHandle() { ipslab_rule_free(ptr); }
};

struct TrajHandle {
  ipslab_trajectory* ptr = nullptr;
  ~TrajHandle() { ipslab_trajectory_free(ptr); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CliError("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CliError("cannot write " + path);
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

void emit_json(const std::string& path, const std::string& json) {
  const std::string text = nlohmann::ordered_json::parse(json).dump(2) + "\n";
  write_output(path.empty() ? "-" : path, text);
}

struct RuleSource {
  std::string rule;
  std::string preset;
  std::vector<double> nn2;
  double time_scale = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--rule", rule, "Rule JSON document or path to one");
    app->add_option("--preset", preset, "Named nearest-neighbor preset");
    app->add_option("--nn2", nn2, "p11,p10,p01,p00")->delimiter(',')->expected(4);
    app->add_option("--time-scale", time_scale, "Apply time scaling with this lambda in (0,1]");
  }

  void load(RuleHandle& out) const {
    const int given = (rule.empty() ? 0 : 1) + (preset.empty() ? 0 : 1) + (nn2.empty() ? 0 : 1);
    if (given != 1) {
      throw CliError("specify exactly one of --rule, --preset, --nn2");
    }
    if (!preset.empty()) {
      check(ipslab_rule_from_preset(preset.c_str(), &out.ptr));
    } else if (!nn2.empty()) {
      check(ipslab_rule_from_nn2(nn2[0], nn2[1], nn2[2], nn2[3], &out.ptr));
    } else {
      const std::string text = rule.find('{') != std::string::npos ? rule : read_file(rule);
      check(ipslab_rule_from_json(text.c_str(), &out.ptr));
    }
    if (time_scale != 1.0) {
      RuleHandle scaled;
      check(ipslab_rule_time_scale(out.ptr, time_scale, &scaled.ptr));
      std::swap(out.ptr, scaled.ptr);
    }
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    parts.push_back(cur);
  }
  return parts;
}

// Initial law shorthand: zeros | ones | constant:K | random | iid:p0,p1,... |
// pattern:a,b,... | interval:LO:HI[:VALUE] | a JSON object.
std::string init_json(const std::string& spec, int alphabet) {
  using nlohmann::ordered_json;
  if (spec.empty() || spec == "zeros") {
    return R"({"kind":"constant","value":0})";
  }
  if (spec.front() == '{') {
    return spec;
  }
  ordered_json j;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "ones") {
    j = {{"kind", "constant"}, {"value", alphabet - 1}};
  } else if (head == "constant") {
    j = {{"kind", "constant"}, {"value", std::stoi(rest)}};
  } else if (head == "random") {
    j = {{"kind", "iid"}, {"probs", std::vector<double>(static_cast<size_t>(alphabet), 1.0 / alphabet)}};
  } else if (head == "iid") {
    std::vector<double> p;
    for (const auto& s : split(rest, ',')) {
      p.push_back(std::stod(s));
    }
    j = {{"kind", "iid"}, {"probs", p}};
  } else if (head == "pattern") {
    std::vector<int> p;
    for (const auto& s : split(rest, ',')) {
      p.push_back(std::stoi(s));
    }
    j = {{"kind", "pattern"}, {"pattern", p}};
  } else if (head == "interval") {
    const auto parts = split(rest, ':');
    if (parts.size() < 2) {
      throw CliError("interval init needs interval:LO:HI[:VALUE]");
    }
    j = {{"kind", "interval"},
         {"lo", std::stoll(parts[0])},
         {"hi", std::stoll(parts[1])},
         {"value", parts.size() > 2 ? std::stoi(parts[2]) : alphabet - 1},
         {"background", 0}};
  } else {
    throw CliError("unknown --init value \"" + spec + "\"");
  }
  return j.dump();
}

int rule_alphabet(const RuleHandle& rule) {
  Text t;
  check(ipslab_rule_to_json(rule.ptr, &t.ptr));
  return nlohmann::json::parse(t.str()).at("alphabet").get<int>();
}

std::vector<double> parse_grid(const std::string& spec, double t_max, double t_step) {
  std::vector<double> g;
  if (!spec.empty()) {
    for (const auto& s : split(spec, ',')) {
      g.push_back(std::stod(s));
    }
    return g;
  }
  for (int k = 0; k * t_step <= t_max + 1e-9; ++k) {
    g.push_back(k * t_step);
  }
  return g;
}

// Expands --config FILE into "--key value" arguments placed before the
// command-line ones, so explicit flags (parsed later) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty() || rest.empty()) {
    return rest;
  }
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw CliError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) {
    throw CliError("config " + path + " must be a JSON object");
  }
  std::vector<std::string> out{rest.front()};
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) {
        out.push_back(flag);
      }
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_array() && key != "rule") {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) {
          joined += ',';
        }
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      out.push_back(flag);
      out.push_back(joined);
    } else {
      out.push_back(flag);
      out.push_back(value.dump());
    }
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interacting particle systems: simulation, ergodicity criteria and exact oracles"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "JSON file with option values; flags on the command line take precedence");
  app.add_flag_callback("--version", [] {
    std::cout << ipslab_version() << "\n";
    std::exit(kExitOk);
  });

  int exit_code = kExitOk;
  std::function<void()> action;

  // simulate / pca
  struct SimArgs {
    RuleSource rule;
    size_t n = 128;
    double t = 64.0;
    size_t steps = 64;
    size_t frames = 0;
    uint64_t seed = 1;
    double rate = 1.0;
    std::string init;
    std::string pgm = "trajectory.pgm";
    std::string events = "events.csv";
    bool ascii = false;
  };
  auto sim_args = std::make_shared<SimArgs>();
  auto add_sim_common = [&](CLI::App* sub, SimArgs& a) {
    a.rule.attach(sub);
    sub->add_option("--n", a.n, "Ring size")->capture_default_str();
    sub->add_option("--frames", a.frames, "Raster rows (default: t+1 or steps+1)");
    sub->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    sub->add_option("--init", a.init, "zeros|ones|constant:K|random|iid:p,..|pattern:a,..|interval:LO:HI[:V]|JSON");
    sub->add_option("--pgm", a.pgm, "Raster output path ('-' for stdout)")->capture_default_str();
    sub->add_option("--events", a.events, "Event CSV output path ('-' for stdout, '' to skip)")->capture_default_str();
    sub->add_flag("--ascii", a.ascii, "Write P2 text PGM instead of binary P5");
  };
  auto finish_sim = [](const SimArgs& a, TrajHandle& traj, size_t frames) {
    Text pgm;
    check(ipslab_trajectory_pgm(traj.ptr, frames, a.ascii ? 0 : 1, &pgm.ptr, &pgm.len));
    if (!a.pgm.empty()) {
      write_output(a.pgm, pgm.str());
    }
    if (!a.events.empty()) {
      Text csv;
      check(ipslab_trajectory_events_csv(traj.ptr, &csv.ptr));
      write_output(a.events, csv.str());
    }
    size_t sites = 0;
    size_t events = 0;
    double t_max = 0.0;
    check(ipslab_trajectory_info(traj.ptr, &sites, &events, &t_max));
    if (a.pgm != "-" && a.events != "-") {
      nlohmann::ordered_json j{{"sites", sites}, {"events", events}, {"t_max", t_max}, {"frames", frames}};
      std::cout << j.dump(2) << "\n";
    }
  };

  auto* simulate = app.add_subcommand("simulate", "Continuous-time simulation on a ring; writes PGM and event CSV");
  add_sim_common(simulate, *sim_args);
  simulate->add_option("--t", sim_args->t, "Time horizon")->capture_default_str();
  simulate->add_option("--rate", sim_args->rate, "Per-site clock rate")->capture_default_str();
  simulate->callback([&, a = sim_args] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      const std::string init = init_json(a->init, rule_alphabet(rule));
      ipslab_sim_options o;
      ipslab_sim_options_init(&o);
      o.n = a->n;
      o.t_max = a->t;
      o.seed = a->seed;
      o.rate = a->rate;
      o.init_json = init.c_str();
      TrajHandle traj;
      check(ipslab_simulate(rule.ptr, &o, &traj.ptr));
      const size_t frames = a->frames > 0 ? a->frames : static_cast<size_t>(a->t) + 1;
      finish_sim(*a, traj, frames);
    };
  });

  auto pca_args = std::make_shared<SimArgs>();
  auto* pca = app.add_subcommand("pca", "Synchronous (discrete-time) simulation on a ring");
  add_sim_common(pca, *pca_args);
  pca->add_option("--steps", pca_args->steps, "Number of synchronous steps")->capture_default_str();
  pca->callback([&, a = pca_args] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      const std::string init = init_json(a->init, rule_alphabet(rule));
      ipslab_sim_options o;
      ipslab_sim_options_init(&o);
      o.n = a->n;
      o.steps = a->steps;
      o.seed = a->seed;
      o.init_json = init.c_str();
      TrajHandle traj;
      check(ipslab_simulate_pca(rule.ptr, &o, &traj.ptr));
      finish_sim(*a, traj, a->frames > 0 ? a->frames : a->steps + 1);
    };
  });

  // criterion
  struct CritArgs {
    RuleSource rule;
    std::vector<double> basis;
    std::vector<double> basis_x;
    std::vector<double> basis_y;
    bool search = false;
    bool full_grid = false;
    bool pca = false;
    double step = 0.01;
    double eps = 1e-9;
    std::string out;
  };
  auto crit = std::make_shared<CritArgs>();
  auto* criterion = app.add_subcommand("criterion", "Product-basis ergodicity criterion (exit 0 pass, 1 fail, 2 error)");
  crit->rule.attach(criterion);
  criterion->add_option("--basis", crit->basis, "x,y for binary alphabets")->delimiter(',')->expected(2);
  criterion->add_option("--basis-x", crit->basis_x, "x(a) per non-minimal letter")->delimiter(',');
  criterion->add_option("--basis-y", crit->basis_y, "y(a) per non-minimal letter")->delimiter(',');
  criterion->add_flag("--search", crit->search, "Search the default basis grid");
  criterion->add_flag("--full-grid", crit->full_grid, "Search x and y over [-1,1] (implies --search)");
  criterion->add_option("--step", crit->step, "Grid step for --full-grid")->capture_default_str();
  criterion->add_option("--eps", crit->eps, "Strictness of alpha < 1")->capture_default_str();
  criterion->add_flag("--pca", crit->pca, "Synchronous-update criterion (beta < 1/gamma) instead");
  criterion->add_option("--out", crit->out, "Write the JSON report here instead of stdout");
  criterion->callback([&, a = crit] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      Text json;
      int pass = 0;
      if (a->pca) {
        const double x = a->basis.empty() ? 1.0 : a->basis[0];
        const double y = a->basis.empty() ? -1.0 : a->basis[1];
        check(ipslab_pca_criterion(rule.ptr, x, y, &json.ptr, &pass));
      } else {
        ipslab_criterion_options o;
        ipslab_criterion_options_init(&o);
        o.search = (a->search || a->full_grid) ? 1 : 0;
        o.full_grid = a->full_grid ? 1 : 0;
        o.step = a->step;
        o.eps = a->eps;
        std::vector<double> xs = a->basis_x;
        std::vector<double> ys = a->basis_y;
        if (!a->basis.empty()) {
          xs = {a->basis[0]};
          ys = {a->basis[1]};
        }
        if (!xs.empty() || !ys.empty()) {
          if (xs.size() != ys.size()) {
            throw CliError("--basis-x and --basis-y need the same length");
          }
          o.x = xs.data();
          o.y = ys.data();
          o.letters = xs.size();
        }
        check(ipslab_criterion(rule.ptr, &o, &json.ptr, &pass));
      }
      emit_json(a->out, json.str());
      exit_code = pass != 0 ? kExitOk : kExitFail;
    };
  });

  // sweep
  struct SweepArgs {
    std::string spec;
    std::string x_axis = "p10";
    std::string y_axis = "p01";
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    size_t x_steps = 101, y_steps = 101;
    double p11 = 0.0, p10 = 0.0, p01 = 0.0, p00 = 0.1;
    std::vector<double> basis;
    bool search = false;
    bool gray = false;
    double eps = 1e-9;
    std::string csv = "sweep.csv";
    std::string pgm = "sweep.pgm";
  };
  auto sw = std::make_shared<SweepArgs>();
  auto* sweep = app.add_subcommand("sweep", "Criterion verdicts over a two-parameter grid (CSV + region PGM)");
  sweep->add_option("--spec", sw->spec, "Sweep spec JSON document or file (overrides the axis flags)");
  sweep->add_option("--x-axis", sw->x_axis)->capture_default_str();
  sweep->add_option("--y-axis", sw->y_axis)->capture_default_str();
  sweep->add_option("--x-min", sw->x_min)->capture_default_str();
  sweep->add_option("--x-max", sw->x_max)->capture_default_str();
  sweep->add_option("--y-min", sw->y_min)->capture_default_str();
  sweep->add_option("--y-max", sw->y_max)->capture_default_str();
  sweep->add_option("--x-steps", sw->x_steps)->capture_default_str();
  sweep->add_option("--y-steps", sw->y_steps)->capture_default_str();
  sweep->add_option("--p11", sw->p11, "Fixed value when not swept")->capture_default_str();
  sweep->add_option("--p10", sw->p10, "Fixed value when not swept")->capture_default_str();
  sweep->add_option("--p01", sw->p01, "Fixed value when not swept")->capture_default_str();
  sweep->add_option("--p00", sw->p00, "Fixed value when not swept")->capture_default_str();
  sweep->add_option("--basis", sw->basis, "x,y (default 1,-1)")->delimiter(',')->expected(2);
  sweep->add_flag("--search", sw->search, "Search bases x=1, y in [-1,0] per cell");
  sweep->add_flag("--gray-overlay", sw->gray, "Mark gray-region cells (128) and add a gray column");
  sweep->add_option("--eps", sw->eps)->capture_default_str();
  sweep->add_option("--csv", sw->csv, "CSV output path")->capture_default_str();
  sweep->add_option("--pgm", sw->pgm, "Region PGM output path")->capture_default_str();
  sweep->callback([&, a = sw] {
    action = [&, a] {
      std::string spec;
      if (!a->spec.empty()) {
        spec = a->spec.find('{') != std::string::npos ? a->spec : read_file(a->spec);
      } else {
        nlohmann::ordered_json j;
        j["fixed"] = {{"p11", a->p11}, {"p10", a->p10}, {"p01", a->p01}, {"p00", a->p00}};
        j["x_axis"] = {{"name", a->x_axis}, {"min", a->x_min}, {"max", a->x_max}, {"steps", a->x_steps}};
        j["y_axis"] = {{"name", a->y_axis}, {"min", a->y_min}, {"max", a->y_max}, {"steps", a->y_steps}};
        if (a->search) {
          j["basis"] = "search";
        } else {
          j["basis"] = a->basis.empty() ? std::vector<double>{1.0, -1.0} : a->basis;
        }
        j["gray_overlay"] = a->gray;
        j["eps"] = a->eps;
        spec = j.dump();
      }
      Text csv;
      Text pgm;
      check(ipslab_sweep(spec.c_str(), &csv.ptr, &pgm.ptr, &pgm.len));
      write_output(a->csv, csv.str());
      write_output(a->pgm, pgm.str());
    };
  });

  // decompose
  struct DecArgs {
    RuleSource rule;
    std::string mode = "additive";
    bool extended = false;
    std::string out;
  };
  auto dec = std::make_shared<DecArgs>();
  auto* decompose = app.add_subcommand("decompose", "Additive / cancellative decomposition and certified rate");
  dec->rule.attach(decompose);
  decompose->add_option("--mode", dec->mode, "additive or cancellative")
      ->check(CLI::IsMember({"additive", "cancellative"}))
      ->capture_default_str();
  decompose->add_flag("--extended", dec->extended, "Allow a negative identity coefficient");
  decompose->add_option("--out", dec->out, "Write JSON here instead of stdout");
  decompose->callback([&, a = dec] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      Text json;
      int feasible = 0;
      check(ipslab_decompose(rule.ptr, a->mode == "cancellative" ? 1 : 0, a->extended ? 1 : 0, &json.ptr,
                             &feasible));
      emit_json(a->out, json.str());
    };
  });

  // two-stage
  struct TwoArgs {
    double lambda = 0.5, gamma = 1.0, delta = 2.0;
    int n_size = 2;
    std::string out;
  };
  auto two = std::make_shared<TwoArgs>();
  auto* two_stage = app.add_subcommand("two-stage", "Extinction condition of the two-stage contact process");
  two_stage->add_option("--lambda", two->lambda, "Spreading rate")->capture_default_str();
  two_stage->add_option("--gamma", two->gamma, "Maturing rate")->capture_default_str();
  two_stage->add_option("--delta", two->delta, "Juvenile death rate")->capture_default_str();
  two_stage->add_option("--n-size", two->n_size, "Neighborhood size including the site")->capture_default_str();
  two_stage->add_option("--out", two->out, "Write JSON here instead of stdout");
  two_stage->callback([&, a = two] {
    action = [&, a] {
      Text json;
      int dies = 0;
      check(ipslab_two_stage(a->lambda, a->gamma, a->delta, a->n_size, &json.ptr, &dies));
      emit_json(a->out, json.str());
    };
  });

  // oracle-check
  struct OracleArgs {
    RuleSource rule;
    size_t n = 3;
    double t = 1.0;
    size_t replicas = 100000;
    uint64_t seed = 1;
    double lambda = 0.0;
    bool no_cone = false;
    std::string init;
    std::string exact_csv;
    std::string out;
  };
  auto orc = std::make_shared<OracleArgs>();
  auto* oracle = app.add_subcommand("oracle-check", "Monte Carlo versus exact distribution on a small ring");
  orc->rule.attach(oracle);
  oracle->add_option("--n", orc->n, "Ring size")->capture_default_str();
  oracle->add_option("--t", orc->t, "Time")->capture_default_str();
  oracle->add_option("--replicas", orc->replicas)->capture_default_str();
  oracle->add_option("--seed", orc->seed)->capture_default_str();
  oracle->add_option("--lambda", orc->lambda, "Also compare P at lambda*t with the scaled rule at t");
  oracle->add_flag("--no-cone", orc->no_cone, "Skip the backward cone sampler");
  oracle->add_option("--init", orc->init, "Initial law (see simulate)");
  oracle->add_option("--exact-csv", orc->exact_csv, "Write the exact law as state_index,probability");
  oracle->add_option("--out", orc->out, "Write JSON here instead of stdout");
  oracle->callback([&, a = orc] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      const std::string init = init_json(a->init, rule_alphabet(rule));
      ipslab_oracle_options o;
      ipslab_oracle_options_init(&o);
      o.n = a->n;
      o.t = a->t;
      o.replicas = a->replicas;
      o.seed = a->seed;
      o.lambda = a->lambda;
      o.cone = a->no_cone ? 0 : 1;
      o.init_json = init.c_str();
      Text json;
      check(ipslab_oracle_check(rule.ptr, &o, &json.ptr));
      if (!a->exact_csv.empty()) {
        Text csv;
        check(ipslab_exact_distribution(rule.ptr, a->n, a->t, init.c_str(), &csv.ptr));
        write_output(a->exact_csv, csv.str());
      }
      emit_json(a->out, json.str());
    };
  });

  // estimate
  struct EstArgs {
    RuleSource rule;
    std::string kind = "covariance";
    size_t n = 256;
    std::string t_grid;
    double t_max = 20.0;
    double t_step = 2.0;
    size_t replicas = 10000;
    uint64_t seed = 1;
    std::vector<double> basis{1.0, -1.0};
    std::string init;
    std::string csv = "-";
    std::string json;
  };
  auto est = std::make_shared<EstArgs>();
  auto* estimate = app.add_subcommand("estimate", "Covariance decay, disagreement density or boundary marginals");
  est->rule.attach(estimate);
  estimate->add_option("--kind", est->kind)
      ->check(CLI::IsMember({"covariance", "disagreement", "boundary"}))
      ->capture_default_str();
  estimate->add_option("--n", est->n, "Ring size")->capture_default_str();
  estimate->add_option("--t-grid", est->t_grid, "Comma-separated times (overrides --t-max/--t-step)");
  estimate->add_option("--t-max", est->t_max)->capture_default_str();
  estimate->add_option("--t-step", est->t_step)->capture_default_str();
  estimate->add_option("--replicas", est->replicas)->capture_default_str();
  estimate->add_option("--seed", est->seed)->capture_default_str();
  estimate->add_option("--basis", est->basis, "x,y of the observable chi at the center site")
      ->delimiter(',')
      ->expected(2);
  estimate->add_option("--init", est->init, "Initial law (default random)");
  estimate->add_option("--csv", est->csv, "CSV output path")->capture_default_str();
  estimate->add_option("--json", est->json, "JSON summary path (default stderr-free stdout after CSV)");
  estimate->callback([&, a = est] {
    action = [&, a] {
      RuleHandle rule;
      a->rule.load(rule);
      const std::string init = init_json(a->init.empty() ? "random" : a->init, rule_alphabet(rule));
      const std::vector<double> grid = parse_grid(a->t_grid, a->t_max, a->t_step);
      ipslab_estimate_options o;
      ipslab_estimate_options_init(&o);
      o.kind = a->kind == "covariance"     ? IPSLAB_ESTIMATE_COVARIANCE
               : a->kind == "disagreement" ? IPSLAB_ESTIMATE_DISAGREEMENT
                                           : IPSLAB_ESTIMATE_BOUNDARY;
      o.n = a->n;
      o.t_grid = grid.data();
      o.t_count = grid.size();
      o.replicas = a->replicas;
      o.seed = a->seed;
      o.basis_x = a->basis[0];
      o.basis_y = a->basis[1];
      o.init_json = init.c_str();
      Text csv;
      Text json;
      check(ipslab_estimate(rule.ptr, &o, &csv.ptr, &json.ptr));
      write_output(a->csv, csv.str());
      if (!a->json.empty()) {
        emit_json(a->json, json.str());
      } else if (a->csv != "-") {
        emit_json("-", json.str());
      }
    };
  });

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (action) {
      action();
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
