#include <cstdlib>

#include "doctest.h"
#include "rsbarrier/config.hpp"
#include "test_util.hpp"

using namespace rsb;
using json = nlohmann::json;
using rsbtest::error_kind;

namespace {

const char* kShipped[] = {"configs/brownian_band.json", "configs/kou_memory.json", "configs/memory3.json",
                          "configs/kobol.json"};

json minimal() {
  return json::parse(R"({
    "regimes": [{"model": {"type": "brownian", "mu": 0.0, "sigma2": 1.0}, "r": 0.0, "G": 1.0}],
    "barriers": {"lower": -1.0, "upper": 1.0},
    "spot": 0.0,
    "maturity": 1.0
  })");
}

}  // namespace

TEST_CASE("shipped configs survive parse, serialize, parse") {
  for (const char* rel : kShipped) {
    CAPTURE(rel);
    auto a = load_config(rsbtest::source_path(rel));
    json ja = to_json(a);
    auto b = parse_config(ja);
    CHECK(to_json(b) == ja);
    CHECK(to_json(parse_config(json::parse(ja.dump()))) == ja);
  }
}

TEST_CASE("every grid scheme survives the round trip") {
  for (const char* name : {"auto", "cellMass", "spectral", "discreteFactor"}) {
    json j = minimal();
    j["grid"] = {{"scheme", name}};
    auto c = parse_config(j);
    CHECK(to_json(c)["grid"]["scheme"] == name);
  }
}

TEST_CASE("defaults of a minimal config") {
  auto c = parse_config(minimal());
  CHECK(c.m == 1);
  CHECK(c.N == 0);
  CHECK(c.grid.M == 16384);
  CHECK(c.grid.domain_factor == 10.0);
  CHECK(c.inversion.backend == InversionBackend::GWR);
  CHECK(c.inversion.nG == 8);
  CHECK(c.tol_inner == 1e-10);
  CHECK(c.tol_outer == 1e-8);
  CHECK(c.initial_history == std::vector<int>{1});
  auto p = build_problem(c);
  CHECK(p.chain.size() == 1);
  CHECK(p.regimes.size() == 1);
}

TEST_CASE("invalid configs are config errors") {
  auto expect = [](const std::function<void(json&)>& edit) {
    json j = minimal();
    edit(j);
    return error_kind([&] { parse_config(j); });
  };
  CHECK(expect([](json& j) { j["barriers"]["lower"] = 2.0; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["maturity"] = 0.0; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["tolerances"] = {{"inner", -1.0}}; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["grid"] = {{"M", 1000}}; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["chain"] = {{"m", 2}}; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["regimes"][0]["model"]["type"] = "vg"; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["inversion"] = {{"backend", "talbot"}}; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["spot"] = "zero"; }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j.erase("regimes"); }) == ErrorKind::Config);
  CHECK(expect([](json& j) { j["regimes"][0]["model"]["sigma2"] = -1.0; }) == ErrorKind::InvalidModel);
  CHECK(error_kind([] { load_config("/nonexistent/config.json"); }) == ErrorKind::Config);
}

TEST_CASE("rate rules materialize by history prefix") {
  auto c = load_config(rsbtest::source_path("configs/memory3.json"));
  for (int N = 0; N <= 3; ++N) {
    auto chain = build_chain(c, N);
    CHECK(chain.size() == history_count(3, N));
    for (std::size_t code = 0; code < chain.size(); ++code) {
      auto h = chain.history(code);
      for (int s = 1; s <= 3; ++s) {
        if (s == h.current()) {
          CHECK(chain.rate(code, s) == 0.0);
        } else {
          // rates depend only on (h0, s) in this instance
          CHECK(chain.rate(code, s) == build_chain(c, 0).rate(static_cast<std::size_t>(h.current() - 1), s));
        }
      }
    }
  }
}

TEST_CASE("dense rates must match the memory depth") {
  auto c = load_config(rsbtest::source_path("configs/kou_memory.json"));
  auto chain = build_chain(c, 1);
  CHECK(chain.size() == 2);
  CHECK(chain.lambda_h(0) == 1.5);
  CHECK(chain.lambda_h(1) == 0.8);
  CHECK(error_kind([&] { materialize_rates(c, 2); }) == ErrorKind::Config);
}

TEST_CASE("model json round trip") {
  for (const auto& m : {LevyModel::brownian(0.1, 0.3), LevyModel::kou(0.0, 0.04, 1.0, 0.5, 10.0, 5.0),
                        LevyModel::kobol(1.2, 1.0, 8.0, -4.0, 0.05)}) {
    auto back = model_from_json(model_to_json(m));
    CHECK(back.type_name() == m.type_name());
    for (double xi : {-3.0, 0.5, 7.0}) CHECK(char_exponent(back, xi) == char_exponent(m, xi));
  }
}

TEST_CASE("thread count resolution") {
  auto c = parse_config(minimal());
  c.threads = 3;
  CHECK(resolved_threads(c) == 3);
  c.threads = 0;
  CHECK(resolved_threads(c) >= 1);
  CHECK(build_mc_config(c).seed == c.seed);
}
