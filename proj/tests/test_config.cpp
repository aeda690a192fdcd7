#include <string>

#include "catsim/config.hpp"
#include "doctest.h"

using namespace catsim;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("every preset survives a serialisation round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const RunConfig c = preset(name);
    CHECK(c.preset == name);
    CHECK(parse_config(serialize_config(c)) == c);
  }
  RunConfig custom = preset("paper_default");
  custom.mle.bin_width = 0.05;
  custom.bootstrap.bin_width.reset();
  custom.experiment.squeeze = SqueezeSpec::from_r(0.31);
  custom.plan.phases_deg = {0.0, 90.0};
  custom.tes.params.convention = ResolutionConvention::Sigma;
  custom.seed = 987654321012345ULL;
  CHECK(parse_config(serialize_config(custom)) == custom);
}

TEST_CASE("preset values") {
  const RunConfig def = preset("paper_default");
  CHECK(def.experiment.squeeze.r() == doctest::Approx(0.748340).epsilon(1e-6));
  CHECK(def.experiment.bs_reflectivity == 0.81);
  CHECK(def.experiment.idler_efficiency == 0.40);
  CHECK(def.experiment.signal_efficiency == 0.85);
  CHECK(def.experiment.opa_loss == 0.05);
  CHECK(def.plan.samples_per_phase == 10000);
  CHECK(def.plan.phases_deg == std::vector<double>{-45.0, -22.5, 0.0, 22.5, 45.0, 90.0});
  CHECK(def.tes.params.energy_resolution_ev == 0.176);

  const RunConfig fig2 = preset("fig2");
  CHECK(fig2.experiment.squeeze.r() == 0.576);
  CHECK(fig2.experiment.idler_efficiency == 1.0);
  CHECK(fig2.herald_ns == std::vector<int>{4});
  CHECK(preset("fig1").scenario == Scenario::Cats);
  CHECK(preset("fig1").cat.alpha == Complex(0.0, 2.5));
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("keys override the preset") {
  const RunConfig c = parse_config(
      "# alternative tap\n"
      "preset = lossless\n"
      "bs_reflectivity = 0.78\n"
      "squeeze_r = 0.5\n"
      "herald_ns = 1,3\n"
      "mle.bin_width = none\n"
      "grid.quad = -4,4,81\n"
      "tes.convention = sigma\n");
  CHECK(c.preset == "lossless");
  CHECK(c.experiment.bs_reflectivity == 0.78);
  CHECK(c.experiment.squeeze.r() == 0.5);
  CHECK(c.experiment.signal_efficiency == 1.0);
  CHECK(c.herald_ns == std::vector<int>{1, 3});
  CHECK_FALSE(c.mle.bin_width.has_value());
  CHECK(c.quad_grid == GridSpec{-4.0, 4.0, 81});
  CHECK(c.tes.params.convention == ResolutionConvention::Sigma);
  CHECK(parse_config("squeeze_db = 5\n").experiment.squeeze.specified_in_db());
}

TEST_CASE("configuration errors name the line") {
  CHECK(error_of("seed = 1\nbogus = 2\n").find("line 2: unknown key 'bogus'") != std::string::npos);
  CHECK(error_of("seed = 1\n\nseed = 2\n").find("line 3: duplicate key 'seed'") != std::string::npos);
  CHECK(error_of("cutoff = ten\n").find("line 1") != std::string::npos);
  CHECK(error_of("just words\n").find("line 1: expected key = value") != std::string::npos);
  CHECK(error_of("squeeze_db = 5\nsqueeze_r = 0.5\n").find("mutually exclusive") != std::string::npos);
  CHECK(error_of("opa_loss = 1.5\n").find("opa_loss") != std::string::npos);
  CHECK(error_of("bootstrap.replicas = 1\n").find("bootstrap.replicas") != std::string::npos);
  CHECK(error_of("preset = fig9\n").find("fig9") != std::string::npos);
  CHECK(error_of("plan.phases_deg = 0,0\n").find("plan: ") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("hash ignores the output directory only") {
  RunConfig a = preset("paper_default");
  RunConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(serialize_config(a, false).find("output_dir") == std::string::npos);
}
