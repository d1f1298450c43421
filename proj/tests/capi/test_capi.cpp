#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <string>
#include <vector>

#include "ipslab/ipslab.h"

using nlohmann::json;

namespace {

struct Owned {
  char* ptr = nullptr;
  ~Owned() { ipslab_free_string(ptr); }
  json parse() const { return json::parse(ptr); }
};

struct Rule {
  ipslab_rule* ptr = nullptr;
  ~Rule() { ipslab_rule_free(ptr); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(ipslab_version()) == "1.0.0");
  CHECK(std::string(ipslab_status_string(IPSLAB_OK)) == "ok");
  CHECK(std::string(ipslab_status_string(IPSLAB_ERR_PARSE)) != "ok");
}

TEST_CASE("rule construction and errors") {
  Rule r;
  REQUIRE(ipslab_rule_from_nn2(0, 0.2, 0.8, 0.1, &r.ptr) == IPSLAB_OK);
  Owned j;
  REQUIRE(ipslab_rule_to_json(r.ptr, &j.ptr) == IPSLAB_OK);
  CHECK(j.parse().at("nn2") == json::array({0.0, 0.2, 0.8, 0.1}));

  Rule bad;
  CHECK(ipslab_rule_from_nn2(0, 1.5, 0, 0, &bad.ptr) == IPSLAB_ERR_DOMAIN);
  CHECK(bad.ptr == nullptr);
  CHECK(std::string(ipslab_last_error()).size() > 0);
  CHECK(ipslab_rule_from_json("{not json", &bad.ptr) == IPSLAB_ERR_PARSE);
  CHECK(ipslab_rule_from_json(nullptr, &bad.ptr) == IPSLAB_ERR_INVALID_ARGUMENT);
  CHECK(ipslab_rule_from_preset("no-such-preset", &bad.ptr) == IPSLAB_ERR_DOMAIN);

  Rule walls;
  REQUIRE(ipslab_rule_from_preset("walls", &walls.ptr) == IPSLAB_OK);
  Rule alt;
  REQUIRE(ipslab_rule_alternating_flip(walls.ptr, &alt.ptr) == IPSLAB_OK);
  Owned aj;
  REQUIRE(ipslab_rule_to_json(alt.ptr, &aj.ptr) == IPSLAB_OK);
  CHECK(aj.parse().at("period") == 2);

  Rule scaled;
  CHECK(ipslab_rule_time_scale(r.ptr, 0.0, &scaled.ptr) == IPSLAB_ERR_DOMAIN);
  REQUIRE(ipslab_rule_time_scale(r.ptr, 0.5, &scaled.ptr) == IPSLAB_OK);
  Owned sj;
  REQUIRE(ipslab_rule_to_json(scaled.ptr, &sj.ptr) == IPSLAB_OK);
  CHECK(sj.parse().at("nn2") == json::array({0.5, 0.6, 0.4, 0.05}));

  Owned cls;
  REQUIRE(ipslab_rule_classify(r.ptr, 1e-9, &cls.ptr) == IPSLAB_OK);
  CHECK(cls.parse().at("positive_rates") == true);

  Owned names;
  REQUIRE(ipslab_preset_names(&names.ptr) == IPSLAB_OK);
  CHECK(names.parse().contains("stochastic-ising"));

  Owned face;
  REQUIRE(ipslab_project_to_face(0.9, 0.95, 0.02, 0.01, &face.ptr) == IPSLAB_OK);
  CHECK(face.parse().at("face") == "p11=0");
  CHECK(ipslab_project_to_face(1, 1, 0, 0, &face.ptr) == IPSLAB_ERR_DOMAIN);
}

TEST_CASE("criterion through the C API") {
  Rule r;
  REQUIRE(ipslab_rule_from_nn2(0, 0.2, 0.8, 0.1, &r.ptr) == IPSLAB_OK);
  ipslab_criterion_options o;
  ipslab_criterion_options_init(&o);
  const double x[] = {1.0};
  const double y[] = {-1.0};
  o.x = x;
  o.y = y;
  o.letters = 1;
  Owned out;
  int pass = -1;
  REQUIRE(ipslab_criterion(r.ptr, &o, &out.ptr, &pass) == IPSLAB_OK);
  CHECK(pass == 1);
  const json j = out.parse();
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("alpha").get<double>() == doctest::Approx(0.8));
  CHECK(j.at("beta").get<double>() == doctest::Approx(1.5));
  CHECK(j.at("rate").get<double>() == doctest::Approx(0.2));

  Rule hard;
  REQUIRE(ipslab_rule_from_nn2(0, 0.99, 0.05, 0.01, &hard.ptr) == IPSLAB_OK);
  ipslab_criterion_options s;
  ipslab_criterion_options_init(&s);
  s.search = 1;
  Owned so;
  REQUIRE(ipslab_criterion(hard.ptr, &s, &so.ptr, &pass) == IPSLAB_OK);
  CHECK(pass == 0);
  CHECK(so.parse().at("verdict") == "fail");

  Owned pca;
  REQUIRE(ipslab_pca_criterion(r.ptr, 1.0, -1.0, &pca.ptr, &pass) == IPSLAB_OK);
  CHECK(pass == 0);
}

TEST_CASE("decompose and two-stage through the C API") {
  Rule r;
  REQUIRE(ipslab_rule_from_nn2(0.9, 0.7, 0.8, 0.2, &r.ptr) == IPSLAB_OK);
  Owned d;
  int feasible = 0;
  REQUIRE(ipslab_decompose(r.ptr, 0, 0, &d.ptr, &feasible) == IPSLAB_OK);
  CHECK(feasible == 1);
  CHECK(d.parse().at("rate").get<double>() == doctest::Approx(0.2));

  Owned t;
  int dies = 0;
  REQUIRE(ipslab_two_stage(0.5, 1, 2, 2, &t.ptr, &dies) == IPSLAB_OK);
  CHECK(dies == 1);
  CHECK(t.parse().at("rhs").get<double>() == doctest::Approx(1.0));
  REQUIRE(ipslab_two_stage(10, 10, 0.01, 2, &t.ptr, &dies) == IPSLAB_OK);
  CHECK(dies == 0);
}

TEST_CASE("simulation through the C API") {
  Rule r;
  REQUIRE(ipslab_rule_from_preset("stochastic-ising", &r.ptr) == IPSLAB_OK);
  ipslab_sim_options o;
  ipslab_sim_options_init(&o);
  CHECK(o.n == 128);
  o.n = 32;
  o.t_max = 4.0;
  o.init_json = R"({"kind":"iid","probs":[0.5,0.5]})";
  ipslab_trajectory* traj = nullptr;
  REQUIRE(ipslab_simulate(r.ptr, &o, &traj) == IPSLAB_OK);
  size_t sites = 0;
  size_t events = 0;
  double t_max = 0;
  REQUIRE(ipslab_trajectory_info(traj, &sites, &events, &t_max) == IPSLAB_OK);
  CHECK(sites == 32);
  CHECK(events > 0);
  CHECK(t_max == 4.0);
  std::vector<int> state(32);
  REQUIRE(ipslab_trajectory_state(traj, 4.0, state.data(), state.size()) == IPSLAB_OK);
  CHECK(ipslab_trajectory_state(traj, 4.0, state.data(), 3) == IPSLAB_ERR_INVALID_ARGUMENT);
  char* pgm = nullptr;
  size_t len = 0;
  REQUIRE(ipslab_trajectory_pgm(traj, 9, 1, &pgm, &len) == IPSLAB_OK);
  CHECK(len == std::string("P5\n32 9\n255\n").size() + 32 * 9);
  ipslab_free_string(pgm);
  Owned csv;
  REQUIRE(ipslab_trajectory_events_csv(traj, &csv.ptr) == IPSLAB_OK);
  CHECK(std::string(csv.ptr).rfind("time,site,symbol\n", 0) == 0);

  ipslab_trajectory* again = nullptr;
  REQUIRE(ipslab_simulate(r.ptr, &o, &again) == IPSLAB_OK);
  Owned csv2;
  REQUIRE(ipslab_trajectory_events_csv(again, &csv2.ptr) == IPSLAB_OK);
  CHECK(std::string(csv.ptr) == std::string(csv2.ptr));
  ipslab_trajectory_free(again);
  ipslab_trajectory_free(traj);

  o.steps = 5;
  REQUIRE(ipslab_simulate_pca(r.ptr, &o, &traj) == IPSLAB_OK);
  REQUIRE(ipslab_trajectory_info(traj, &sites, &events, &t_max) == IPSLAB_OK);
  CHECK(events == 32 * 5);
  ipslab_trajectory_free(traj);

  o.init_json = R"({"kind":"constant","value":7})";
  CHECK(ipslab_simulate(r.ptr, &o, &traj) == IPSLAB_ERR_DOMAIN);
}

TEST_CASE("oracle and estimators through the C API") {
  Rule r;
  REQUIRE(ipslab_rule_from_nn2(0, 0.2, 0.8, 0.1, &r.ptr) == IPSLAB_OK);
  ipslab_oracle_options o;
  ipslab_oracle_options_init(&o);
  o.replicas = 5000;
  Owned rep;
  REQUIRE(ipslab_oracle_check(r.ptr, &o, &rep.ptr) == IPSLAB_OK);
  const json j = rep.parse();
  CHECK(j.at("forward").at("tv").get<double>() < 0.05);

  Owned dist;
  REQUIRE(ipslab_exact_distribution(r.ptr, 3, 1.0, nullptr, &dist.ptr) == IPSLAB_OK);
  CHECK(std::string(dist.ptr).rfind("state_index,probability\n", 0) == 0);
  CHECK(ipslab_exact_distribution(r.ptr, 20, 1.0, nullptr, &dist.ptr) == IPSLAB_ERR_CAPACITY);

  ipslab_estimate_options e;
  ipslab_estimate_options_init(&e);
  const double grid[] = {0.0, 1.0, 2.0, 3.0};
  e.t_grid = grid;
  e.t_count = 4;
  e.n = 32;
  e.replicas = 500;
  Owned csv;
  Owned summary;
  REQUIRE(ipslab_estimate(r.ptr, &e, &csv.ptr, &summary.ptr) == IPSLAB_OK);
  CHECK(std::string(csv.ptr).rfind("t,mean,stderr,bound\n", 0) == 0);
  CHECK(summary.parse().at("bound_rate").get<double>() == doctest::Approx(0.2));
}

TEST_CASE("sweep through the C API") {
  const char* spec = R"({"fixed":{"p11":0,"p00":0.1},
    "x_axis":{"name":"p10","min":0,"max":1,"steps":5},
    "y_axis":{"name":"p01","min":0,"max":1,"steps":4},
    "basis":[1,-1]})";
  Owned csv;
  char* pgm = nullptr;
  size_t len = 0;
  REQUIRE(ipslab_sweep(spec, &csv.ptr, &pgm, &len) == IPSLAB_OK);
  CHECK(len == std::string("P5\n5 4\n255\n").size() + 20);
  ipslab_free_string(pgm);
  CHECK(ipslab_sweep("{}", &csv.ptr, &pgm, &len) == IPSLAB_ERR_PARSE);
}
