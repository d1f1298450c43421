#include "ipslab/ipslab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "basis.hpp"
#include "checks.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rules.hpp"
#include "sim.hpp"

struct ipslab_rule {
  ipslab::PeriodicRule rule;
};

struct ipslab_trajectory {
  ipslab::Trajectory traj;
};

namespace {

thread_local std::string t_last_error;

class InvalidArgument : public std::exception {
 public:
  explicit InvalidArgument(std::string m) : message_(std::move(m)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

ipslab_status status_of(ipslab::ErrorKind kind) {
  switch (kind) {
    case ipslab::ErrorKind::domain:
      return IPSLAB_ERR_DOMAIN;
    case ipslab::ErrorKind::unsupported:
      return IPSLAB_ERR_UNSUPPORTED;
    case ipslab::ErrorKind::parse:
      return IPSLAB_ERR_PARSE;
    case ipslab::ErrorKind::capacity:
      return IPSLAB_ERR_CAPACITY;
    case ipslab::ErrorKind::infeasible:
      return IPSLAB_ERR_INFEASIBLE;
    case ipslab::ErrorKind::numeric:
      return IPSLAB_ERR_NUMERIC;
  }
  return IPSLAB_ERR_INTERNAL;
}

template <class F>
ipslab_status guard(F&& body) {
  t_last_error.clear();
  try {
    body();
    return IPSLAB_OK;
  } catch (const ipslab::Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const InvalidArgument& e) {
    t_last_error = e.what();
    return IPSLAB_ERR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    t_last_error = std::string("invalid JSON document: ") + e.what();
    return IPSLAB_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return IPSLAB_ERR_CAPACITY;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return IPSLAB_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return IPSLAB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) {
    throw InvalidArgument(what);
  }
}

char* dup_bytes(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

ipslab::Json parse_json(const char* text) {
  try {
    return ipslab::Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    ipslab::fail(ipslab::ErrorKind::parse, std::string("invalid JSON document: ") + e.what());
  }
}

ipslab::InitLaw init_or(const char* json, ipslab::InitLaw fallback) {
  return json != nullptr ? ipslab::init_from_json(parse_json(json)) : fallback;
}

void emit_rule(ipslab::PeriodicRule rule, ipslab_rule** out) { *out = new ipslab_rule{std::move(rule)}; }

}  // namespace

extern "C" {

const char* ipslab_version(void) { return "1.0.0"; }

const char* ipslab_status_string(ipslab_status status) {
  switch (status) {
    case IPSLAB_OK:
      return "ok";
    case IPSLAB_ERR_DOMAIN:
      return "domain error";
    case IPSLAB_ERR_UNSUPPORTED:
      return "unsupported";
    case IPSLAB_ERR_PARSE:
      return "parse error";
    case IPSLAB_ERR_CAPACITY:
      return "capacity exceeded";
    case IPSLAB_ERR_INFEASIBLE:
      return "infeasible";
    case IPSLAB_ERR_NUMERIC:
      return "numeric failure";
    case IPSLAB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case IPSLAB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* ipslab_last_error(void) { return t_last_error.c_str(); }

void ipslab_free_string(char* text) { std::free(text); }

void ipslab_set_threads(size_t workers) { ipslab::set_worker_count(workers); }

ipslab_status ipslab_rule_from_json(const char* json, ipslab_rule** out) {
  return guard([&] {
    require(json != nullptr && out != nullptr, "rule_from_json: null argument");
    emit_rule(ipslab::rule_from_json(parse_json(json)), out);
  });
}

ipslab_status ipslab_rule_from_nn2(double p11, double p10, double p01, double p00, ipslab_rule** out) {
  return guard([&] {
    require(out != nullptr, "rule_from_nn2: null output");
    emit_rule(ipslab::PeriodicRule(ipslab::make_nn2_rule({p11, p10, p01, p00})), out);
  });
}

ipslab_status ipslab_rule_from_preset(const char* name, ipslab_rule** out) {
  return guard([&] {
    require(name != nullptr && out != nullptr, "rule_from_preset: null argument");
    emit_rule(ipslab::PeriodicRule(ipslab::make_nn2_rule(ipslab::preset(name))), out);
  });
}

ipslab_status ipslab_rule_two_stage(double lam, double gam, double del, int n_size, ipslab_rule** out) {
  return guard([&] {
    require(out != nullptr, "rule_two_stage: null output");
    emit_rule(ipslab::PeriodicRule(ipslab::two_stage_rule(lam, gam, del, n_size)), out);
  });
}

ipslab_status ipslab_rule_time_scale(const ipslab_rule* rule, double lambda, ipslab_rule** out) {
  return guard([&] {
    require(rule != nullptr && out != nullptr, "rule_time_scale: null argument");
    emit_rule(ipslab::time_scale(rule->rule, lambda), out);
  });
}

ipslab_status ipslab_rule_flip_states(const ipslab_rule* rule, ipslab_rule** out) {
  return guard([&] {
    require(rule != nullptr && out != nullptr, "rule_flip_states: null argument");
    std::vector<ipslab::RuleTable> tables;
    for (const auto& t : rule->rule.tables()) {
      tables.push_back(ipslab::flip_states(t));
    }
    emit_rule(ipslab::PeriodicRule(std::move(tables)), out);
  });
}

ipslab_status ipslab_rule_alternating_flip(const ipslab_rule* rule, ipslab_rule** out) {
  return guard([&] {
    require(rule != nullptr && out != nullptr, "rule_alternating_flip: null argument");
    emit_rule(ipslab::alternating_flip(rule->rule), out);
  });
}

ipslab_status ipslab_rule_to_json(const ipslab_rule* rule, char** json_out) {
  return guard([&] {
    require(rule != nullptr && json_out != nullptr, "rule_to_json: null argument");
    *json_out = dup_bytes(ipslab::rule_to_json(rule->rule).dump());
  });
}

ipslab_status ipslab_rule_classify(const ipslab_rule* rule, double eps, char** json_out) {
  return guard([&] {
    require(rule != nullptr && json_out != nullptr, "rule_classify: null argument");
    const auto& r = rule->rule;
    ipslab::Json j;
    j["alphabet"] = r.alphabet().size();
    j["period"] = r.period();
    j["positive_rates"] = ipslab::is_positive_rates(r, eps);
    j["monotone"] = ipslab::is_monotone(r);
    j["weakly_monotone"] = ipslab::is_weakly_monotone(r);
    if (r.period() == 1) {
      if (const auto p = ipslab::nn2_params(r.tables().front())) {
        j["gray_region"] = ipslab::in_gray_region(*p, eps);
      }
    }
    *json_out = dup_bytes(j.dump());
  });
}

void ipslab_rule_free(ipslab_rule* rule) { delete rule; }

ipslab_status ipslab_preset_names(char** json_out) {
  return guard([&] {
    require(json_out != nullptr, "preset_names: null output");
    ipslab::Json j = ipslab::Json::object();
    for (const auto& name : ipslab::preset_names()) {
      j[name] = ipslab::params_to_json(ipslab::preset(name));
    }
    *json_out = dup_bytes(j.dump());
  });
}

ipslab_status ipslab_project_to_face(double p11, double p10, double p01, double p00, char** json_out) {
  return guard([&] {
    require(json_out != nullptr, "project_to_face: null output");
    const auto proj = ipslab::project_to_face({p11, p10, p01, p00});
    ipslab::Json j;
    j["face"] = ipslab::face_name(proj.face);
    j["params"] = ipslab::params_to_json(proj.params);
    j["lambda"] = ipslab::round12(proj.lambda);
    *json_out = dup_bytes(j.dump());
  });
}

void ipslab_criterion_options_init(ipslab_criterion_options* options) {
  if (options == nullptr) {
    return;
  }
  options->search = 0;
  options->full_grid = 0;
  options->step = 0.01;
  options->eps = ipslab::kStrictEps;
  options->x = nullptr;
  options->y = nullptr;
  options->letters = 0;
}

ipslab_status ipslab_criterion(const ipslab_rule* rule, const ipslab_criterion_options* options, char** json_out,
                               int* pass) {
  return guard([&] {
    require(rule != nullptr && json_out != nullptr, "criterion: null argument");
    ipslab_criterion_options opts;
    ipslab_criterion_options_init(&opts);
    if (options != nullptr) {
      opts = *options;
    }
    const auto& r = rule->rule;
    const int q = r.alphabet().size();
    ipslab::Json j;
    bool ok = false;
    if (opts.search != 0) {
      std::vector<double> xg;
      std::vector<double> yg;
      if (opts.full_grid != 0) {
        xg = ipslab::grid(-1.0, 1.0, opts.step);
        yg = xg;
      } else {
        xg = ipslab::default_x_grid(q);
        yg = ipslab::default_y_grid(q);
      }
      const auto found = ipslab::basis_search_detailed(r, xg, yg, opts.eps);
      if (found.best_pass) {
        j = ipslab::criterion_to_json(*found.best_pass);
        ok = true;
      } else if (found.min_alpha) {
        j = ipslab::criterion_to_json(*found.min_alpha);
      } else {
        j["alpha"] = nullptr;
        j["beta"] = nullptr;
        j["rate"] = 0.0;
        j["basis"] = nullptr;
        j["conditions"] = nullptr;
        j["verdict"] = "fail";
      }
      j["search"] = {{"candidates", found.candidates}, {"found", found.best_pass.has_value()}};
    } else {
      std::vector<double> xs;
      std::vector<double> ys;
      if (opts.x != nullptr && opts.y != nullptr) {
        require(opts.letters == static_cast<std::size_t>(q - 1), "criterion: need one x and y per non-minimal letter");
        xs.assign(opts.x, opts.x + opts.letters);
        ys.assign(opts.y, opts.y + opts.letters);
      } else {
        require(q == 2, "criterion: basis values are required for alphabets larger than 2");
        xs = {1.0};
        ys = {-1.0};
      }
      const auto rep = ipslab::criterion_verdict(r, ipslab::ProductBasis(r.alphabet(), xs, ys), opts.eps);
      j = ipslab::criterion_to_json(rep);
      ok = rep.pass;
    }
    *json_out = dup_bytes(j.dump());
    if (pass != nullptr) {
      *pass = ok ? 1 : 0;
    }
  });
}

ipslab_status ipslab_pca_criterion(const ipslab_rule* rule, double x, double y, char** json_out, int* pass) {
  return guard([&] {
    require(rule != nullptr && json_out != nullptr, "pca_criterion: null argument");
    const auto basis = ipslab::ProductBasis::binary(x, y);
    const auto rep = ipslab::pca_criterion(rule->rule, basis);
    ipslab::Json j;
    j["beta"] = ipslab::round12(rep.beta);
    j["gamma"] = ipslab::round12(rep.gamma);
    j["threshold"] = ipslab::round12(1.0 / rep.gamma);
    j["basis"] = ipslab::basis_to_json(basis);
    j["verdict"] = rep.pass ? "pass" : "fail";
    *json_out = dup_bytes(j.dump());
    if (pass != nullptr) {
      *pass = rep.pass ? 1 : 0;
    }
  });
}

ipslab_status ipslab_decompose(const ipslab_rule* rule, int cancellative, int extended, char** json_out,
                               int* feasible) {
  return guard([&] {
    require(rule != nullptr && json_out != nullptr, "decompose: null argument");
    if (rule->rule.period() != 1) {
      ipslab::fail(ipslab::ErrorKind::unsupported, "decompositions are defined for homogeneous rules only");
    }
    const auto& t = rule->rule.tables().front();
    const auto d = cancellative != 0 ? ipslab::decompose_cancellative(t, extended != 0)
                                     : ipslab::decompose_additive(t, extended != 0);
    *json_out = dup_bytes(ipslab::decomposition_to_json(d).dump());
    if (feasible != nullptr) {
      *feasible = d.feasible ? 1 : 0;
    }
  });
}

ipslab_status ipslab_two_stage(double lam, double gam, double del, int n_size, char** json_out, int* dies_out) {
  return guard([&] {
    require(json_out != nullptr, "two_stage: null output");
    const auto c = ipslab::two_stage_condition(lam, gam, del, n_size);
    const auto rule = ipslab::two_stage_rule(lam, gam, del, n_size);
    const double b = 1.0 + del + gam + lam * n_size;
    ipslab::Json j;
    j["lambda"] = ipslab::round12(lam);
    j["gamma"] = ipslab::round12(gam);
    j["delta"] = ipslab::round12(del);
    j["n_size"] = n_size;
    j["offsets"] = ipslab::two_stage_offsets(n_size);
    j["beta_normalizer"] = ipslab::round12(b);
    j["lhs"] = ipslab::round12(c.lhs);
    j["rhs"] = ipslab::round12(c.rhs);
    j["dies_out"] = c.dies_out;
    // Generic criterion with the basis x(1) = lhs (nudged inside), x(2) = 1, y = 0.
    const double a = std::min(1.0, c.lhs + 1e-8);
    const auto rep = ipslab::criterion_verdict(ipslab::PeriodicRule(rule),
                                               ipslab::ProductBasis(ipslab::Alphabet(3), {a, 1.0}, {0.0, 0.0}), 1e-12);
    j["criterion"] = ipslab::criterion_to_json(rep);
    *json_out = dup_bytes(j.dump());
    if (dies_out != nullptr) {
      *dies_out = c.dies_out ? 1 : 0;
    }
  });
}

ipslab_status ipslab_sweep(const char* spec_json, char** csv_out, char** pgm_out, size_t* pgm_len) {
  return guard([&] {
    require(spec_json != nullptr && csv_out != nullptr, "sweep: null argument");
    const auto res = ipslab::run_sweep(ipslab::sweep_from_json(parse_json(spec_json)));
    *csv_out = dup_bytes(res.csv);
    if (pgm_out != nullptr) {
      *pgm_out = dup_bytes(res.pgm);
      if (pgm_len != nullptr) {
        *pgm_len = res.pgm.size();
      }
    }
  });
}

void ipslab_sim_options_init(ipslab_sim_options* options) {
  if (options == nullptr) {
    return;
  }
  options->n = 128;
  options->t_max = 64.0;
  options->steps = 64;
  options->seed = 1;
  options->rate = 1.0;
  options->init_json = nullptr;
}

ipslab_status ipslab_simulate(const ipslab_rule* rule, const ipslab_sim_options* options, ipslab_trajectory** out) {
  return guard([&] {
    require(rule != nullptr && options != nullptr && out != nullptr, "simulate: null argument");
    const auto init = init_or(options->init_json, ipslab::InitLaw::constant_law(0));
    init.validate(rule->rule.alphabet().size());
    ipslab::Rng rng(options->seed, std::uint64_t{1} << 63);
    const auto config = init.materialize(options->n, rng);
    *out = new ipslab_trajectory{
        ipslab::simulate_forward(rule->rule, options->n, config, options->t_max, options->seed, options->rate)};
  });
}

ipslab_status ipslab_simulate_pca(const ipslab_rule* rule, const ipslab_sim_options* options,
                                  ipslab_trajectory** out) {
  return guard([&] {
    require(rule != nullptr && options != nullptr && out != nullptr, "simulate_pca: null argument");
    const auto init = init_or(options->init_json, ipslab::InitLaw::constant_law(0));
    init.validate(rule->rule.alphabet().size());
    ipslab::Rng rng(options->seed, std::uint64_t{1} << 63);
    const auto config = init.materialize(options->n, rng);
    *out = new ipslab_trajectory{ipslab::simulate_pca(rule->rule, options->n, config, options->steps, options->seed)};
  });
}

ipslab_status ipslab_trajectory_info(const ipslab_trajectory* traj, size_t* sites, size_t* events, double* t_max) {
  return guard([&] {
    require(traj != nullptr, "trajectory_info: null trajectory");
    if (sites != nullptr) {
      *sites = traj->traj.size();
    }
    if (events != nullptr) {
      *events = traj->traj.events().size();
    }
    if (t_max != nullptr) {
      *t_max = traj->traj.t_max();
    }
  });
}

ipslab_status ipslab_trajectory_state(const ipslab_trajectory* traj, double t, int* symbols, size_t capacity) {
  return guard([&] {
    require(traj != nullptr && symbols != nullptr, "trajectory_state: null argument");
    require(capacity >= traj->traj.size(), "trajectory_state: buffer smaller than the ring");
    const auto c = traj->traj.state_at(t);
    std::copy(c.begin(), c.end(), symbols);
  });
}

ipslab_status ipslab_trajectory_events_csv(const ipslab_trajectory* traj, char** csv_out) {
  return guard([&] {
    require(traj != nullptr && csv_out != nullptr, "trajectory_events_csv: null argument");
    *csv_out = dup_bytes(ipslab::events_csv(traj->traj));
  });
}

ipslab_status ipslab_trajectory_pgm(const ipslab_trajectory* traj, size_t frames, int binary, char** pgm_out,
                                    size_t* pgm_len) {
  return guard([&] {
    require(traj != nullptr && pgm_out != nullptr, "trajectory_pgm: null argument");
    const auto pgm = ipslab::trajectory_pgm(traj->traj, frames, binary != 0);
    *pgm_out = dup_bytes(pgm);
    if (pgm_len != nullptr) {
      *pgm_len = pgm.size();
    }
  });
}

void ipslab_trajectory_free(ipslab_trajectory* traj) { delete traj; }

void ipslab_oracle_options_init(ipslab_oracle_options* options) {
  if (options == nullptr) {
    return;
  }
  options->n = 3;
  options->t = 1.0;
  options->replicas = 100000;
  options->seed = 1;
  options->lambda = 0.0;
  options->cone = 1;
  options->init_json = nullptr;
}

ipslab_status ipslab_oracle_check(const ipslab_rule* rule, const ipslab_oracle_options* options, char** json_out) {
  return guard([&] {
    require(rule != nullptr && options != nullptr && json_out != nullptr, "oracle_check: null argument");
    ipslab::OracleCheckOptions o;
    o.n = options->n;
    o.t = options->t;
    o.replicas = options->replicas;
    o.seed = options->seed;
    o.cone = options->cone != 0;
    o.init = init_or(options->init_json, ipslab::InitLaw::constant_law(0));
    if (options->lambda > 0.0) {
      o.lambda = options->lambda;
    }
    *json_out = dup_bytes(ipslab::oracle_check_to_json(ipslab::oracle_check(rule->rule, o)).dump());
  });
}

ipslab_status ipslab_exact_distribution(const ipslab_rule* rule, size_t n, double t, const char* init_json,
                                        char** csv_out) {
  return guard([&] {
    require(rule != nullptr && csv_out != nullptr, "exact_distribution: null argument");
    const auto init = init_or(init_json, ipslab::InitLaw::constant_law(0));
    const auto gen = ipslab::build_generator(rule->rule, n);
    const auto mu = ipslab::init_distribution(init, rule->rule.alphabet().size(), n);
    *csv_out = dup_bytes(ipslab::distribution_csv(ipslab::exact_distribution(gen, mu, t)));
  });
}

void ipslab_estimate_options_init(ipslab_estimate_options* options) {
  if (options == nullptr) {
    return;
  }
  options->kind = IPSLAB_ESTIMATE_COVARIANCE;
  options->n = 256;
  options->t_grid = nullptr;
  options->t_count = 0;
  options->replicas = 10000;
  options->seed = 1;
  options->basis_x = 1.0;
  options->basis_y = -1.0;
  options->init_json = nullptr;
}

ipslab_status ipslab_estimate(const ipslab_rule* rule, const ipslab_estimate_options* options, char** csv_out,
                              char** json_out) {
  return guard([&] {
    require(rule != nullptr && options != nullptr && csv_out != nullptr, "estimate: null argument");
    require(options->t_grid != nullptr && options->t_count > 0, "estimate: empty time grid");
    const auto& r = rule->rule;
    const std::vector<double> grid(options->t_grid, options->t_grid + options->t_count);
    const int q = r.alphabet().size();
    ipslab::Json j;
    j["n"] = options->n;
    j["replicas"] = options->replicas;
    j["seed"] = options->seed;
    std::string csv;
    switch (options->kind) {
      case IPSLAB_ESTIMATE_COVARIANCE: {
        const ipslab::ProductBasis basis(r.alphabet(), std::vector<double>(static_cast<std::size_t>(q - 1), options->basis_x),
                                         std::vector<double>(static_cast<std::size_t>(q - 1), options->basis_y));
        const auto f = ipslab::LocalFunction::chi(static_cast<long long>(options->n / 2), 1, basis);
        const auto init = init_or(options->init_json,
                                  ipslab::InitLaw::iid_law(std::vector<double>(static_cast<std::size_t>(q), 1.0 / q)));
        const auto d = ipslab::fit_decay(r, options->n, f, f, grid, options->replicas, init, options->seed, basis);
        csv = "t,mean,stderr,bound\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv += ipslab::format_number(grid[i]) + "," + ipslab::format_number(ipslab::round12(d.cov[i].mean)) + "," +
                 ipslab::format_number(ipslab::round12(d.cov[i].std_error)) + ",";
          if (!d.bound.empty()) {
            csv += ipslab::format_number(ipslab::round12(d.bound[i]));
          }
          csv += "\n";
        }
        j["kind"] = "covariance";
        j["fitted_rate"] = ipslab::round12(d.fitted_rate);
        j["rate_is_lower_bound"] = d.rate_is_lower_bound;
        j["significant_points"] = d.significant_points;
        if (d.bound_rate) {
          j["bound_rate"] = ipslab::round12(*d.bound_rate);
        } else {
          j["bound_rate"] = nullptr;
        }
        j["bound_ok"] = d.bound_ok;
        break;
      }
      case IPSLAB_ESTIMATE_DISAGREEMENT: {
        const auto pts = ipslab::disagreement_density(r, options->n, grid, options->replicas, options->seed);
        csv = "t,density,stderr\n";
        for (const auto& p : pts) {
          csv += ipslab::format_number(p.t) + "," + ipslab::format_number(ipslab::round12(p.density)) + "," +
                 ipslab::format_number(ipslab::round12(p.std_error)) + "\n";
        }
        j["kind"] = "disagreement";
        j["final_density"] = ipslab::round12(pts.back().density);
        break;
      }
      case IPSLAB_ESTIMATE_BOUNDARY: {
        const auto b = ipslab::boundary_marginals(r, options->n, grid, options->replicas, options->seed);
        csv = "t,symbol,from_min,from_min_stderr,from_max,from_max_stderr\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
          for (int a = 0; a < q; ++a) {
            const auto s = static_cast<std::size_t>(a);
            csv += ipslab::format_number(grid[k]) + "," + std::to_string(a) + "," +
                   ipslab::format_number(ipslab::round12(b.from_min[k][s])) + "," +
                   ipslab::format_number(ipslab::round12(b.from_min_se[k][s])) + "," +
                   ipslab::format_number(ipslab::round12(b.from_max[k][s])) + "," +
                   ipslab::format_number(ipslab::round12(b.from_max_se[k][s])) + "\n";
          }
        }
        j["kind"] = "boundary";
        const auto top = static_cast<std::size_t>(q - 1);
        j["final_gap"] = ipslab::round12(std::abs(b.from_max.back()[top] - b.from_min.back()[top]));
        break;
      }
      default:
        throw InvalidArgument("estimate: unknown kind");
    }
    *csv_out = dup_bytes(csv);
    if (json_out != nullptr) {
      *json_out = dup_bytes(j.dump());
    }
  });
}

}  // extern "C"
