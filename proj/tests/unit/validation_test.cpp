#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tabgen/dataset.hpp"
#include "tabgen/error.hpp"
#include "tabgen/random.hpp"
#include "tabgen/validation.hpp"

namespace tabgen::validation {
namespace {

std::vector<data::Sample> exact_samples(std::size_t n) { return data::make_training_set(n, 5); }

TEST(Validate, ExactOracleGivesZeroError) {
  const auto r = validate_samples(exact_samples(100));
  EXPECT_EQ(r.generated_count, 100u);
  EXPECT_EQ(r.in_domain_count, 100u);
  for (const auto& o : r.stats.outputs) {
    EXPECT_EQ(o.mu, 0.0);
    EXPECT_EQ(o.sigma, 0.0);
  }
}

TEST(Validate, ConstantOffsetShowsInMuOnly) {
  auto s = exact_samples(100);
  for (auto& x : s) x.outputs.voidf2 += 0.01;
  const auto r = validate_samples(s);
  EXPECT_NEAR(r.stats.outputs[1].mu, 0.01, 1e-12);
  EXPECT_NEAR(r.stats.outputs[1].sigma, 0.0, 1e-12);
  EXPECT_EQ(r.stats.outputs[0].mu, 0.0);
  EXPECT_EQ(r.stats.outputs[3].mu, 0.0);
}

TEST(Validate, MomentsMatchDirectComputation) {
  auto s = exact_samples(50);
  Rng rng(2);
  std::vector<double> noise;
  for (auto& x : s) {
    noise.push_back(0.03 * rng.normal());
    x.outputs.voidf4 += noise.back();
  }
  double mean = 0.0;
  for (double e : noise) mean += e / 50.0;
  double var = 0.0;
  for (double e : noise) var += (e - mean) * (e - mean) / 50.0;
  const auto r = validate_samples(s);
  EXPECT_NEAR(r.stats.outputs[3].mu, mean, 1e-14);
  EXPECT_NEAR(r.stats.outputs[3].sigma, std::sqrt(var), 1e-14);

  for (auto& x : s) x.outputs.voidf4 += 0.2;
  EXPECT_NEAR(validate_samples(s).stats.outputs[3].sigma, std::sqrt(var), 1e-12);
}

TEST(Validate, SkipsOutOfDomainAndNonFinitePmps) {
  auto s = exact_samples(10);
  s[2].inputs.p1022 = 7.0;
  s[5].inputs.p1008 = std::numeric_limits<double>::quiet_NaN();
  s[7].inputs.p1029 = std::numeric_limits<double>::infinity();
  const auto r = validate_samples(s);
  EXPECT_EQ(r.generated_count, 10u);
  EXPECT_EQ(r.in_domain_count, 7u);
  ASSERT_EQ(r.records.size(), 7u);
  EXPECT_EQ(r.records[2].sample_index, 3u);

  for (auto& x : s) x.inputs.p1012 = -1.0;
  EXPECT_THROW(validate_samples(s), Error);
}

TEST(Validate, StandardizedPathRejectsNonFinite) {
  const auto s = exact_samples(20);
  const auto st = data::Standardizer::fit(s);
  auto z = st.standardize(s);
  for (const auto& o : validate(z, st).stats.outputs) EXPECT_LT(std::abs(o.mu) + o.sigma, 1e-12);
  z(3, 6) = std::nan("");
  EXPECT_THROW(validate(z, st), NumericalError);
}

ModelReport report(std::string name, double sigma, std::string oracle = std::string(data::kOracleVersion)) {
  ModelReport r;
  r.model = std::move(name);
  r.generated_count = 500;
  r.in_domain_count = 480;
  for (auto& o : r.errors.outputs) o = {0.001, sigma};
  r.oracle_version = std::move(oracle);
  return r;
}

TEST(Compare, RanksByMeanSigma) {
  const std::vector<ModelReport> reports = {report("cvae", 0.02), report("gan", 0.05), report("vae", 0.01),
                                            report("nf", 0.2)};
  const auto c = compare_models(reports);
  ASSERT_EQ(c.models.size(), 4u);
  EXPECT_EQ(c.models[0].model, "gan");
  EXPECT_EQ(c.models[3].model, "cvae");
  EXPECT_EQ(c.ranking, (std::vector<std::string>{"vae", "cvae", "gan", "nf"}));
}

TEST(Compare, RejectsIncompleteOrInconsistentSets) {
  std::vector<ModelReport> three = {report("gan", 0.1), report("vae", 0.1), report("nf", 0.1)};
  try {
    compare_models(three);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cvae"), std::string::npos);
  }
  auto dup = three;
  dup.push_back(report("vae", 0.2));
  EXPECT_THROW(compare_models(dup), Error);
  auto mixed = three;
  mixed.push_back(report("cvae", 0.1, "other-oracle"));
  EXPECT_THROW(compare_models(mixed), Error);
}

TEST(ReportJson, RoundTripAndSchema) {
  auto r = report("nf", 0.123456789012345);
  r.errors.outputs[2] = {-0.0040123456789, 0.0712345678901};
  r.errors.n_validated = 480;
  r.seed = 7;
  r.config_digest = "0123456789abcdef";
  const auto text = report_to_json(r);
  const auto back = report_from_json(text);
  EXPECT_EQ(back.model, "nf");
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.config_digest, r.config_digest);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(back.errors.outputs[j].mu, r.errors.outputs[j].mu, 1e-12);
    EXPECT_NEAR(back.errors.outputs[j].sigma, r.errors.outputs[j].sigma, 1e-12);
  }
  const auto j = nlohmann::json::parse(text);
  for (const char* key : {"model", "generated_count", "in_domain_count", "errors", "seed", "config_digest",
                          "oracle_version"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (auto key : kOutputKeys) {
    EXPECT_TRUE(j["errors"][std::string(key)].contains("mu"));
    EXPECT_TRUE(j["errors"][std::string(key)].contains("sigma"));
  }
  EXPECT_THROW(report_from_json("{\"model\": \"gan\"}"), SchemaError);
  EXPECT_THROW(report_from_json("not json"), SchemaError);
}

TEST(ExportErrors, LongFormatRows) {
  const auto r = validate_samples(exact_samples(25));
  const auto path = std::filesystem::temp_directory_path() / "tabgen_validation_errors.csv";
  export_errors("vae", r.records, path, {{"model", "vae"}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("#", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "model,output_name,error");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("vae,VoidF", 0), 0u);
  }
  EXPECT_EQ(rows, 4u * 25u);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace tabgen::validation
