#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "jolopt/data.hpp"
#include "jolopt/error.hpp"

using namespace jolopt;
using namespace jolopt::data;
namespace fs = std::filesystem;

namespace {

class DataFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("jolopt_data_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void expect_code(ErrorCode code, const std::function<void()>& fn) const {
    try {
      fn();
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  }

  fs::path dir_;
};

LogitGenSpec small_logit(std::uint64_t seed = 1) {
  LogitGenSpec s;
  s.products = 4;
  s.weeks = 6;
  s.noise_std = 0.02;
  s.seed = seed;
  return s;
}

constexpr const char* kOpfHeader = "timestamp,demand,cap_1,f_1,solar\n";

}  // namespace

TEST(LogitGen, DefaultsGive2500Cells) {
  const auto ds = generate_logit_dataset({});
  EXPECT_EQ(ds.instance.products(), 50);
  EXPECT_EQ(ds.instance.periods_count(), 50);
  EXPECT_EQ(ds.instance.prices.size(), 2500);
  EXPECT_EQ(ds.truth.products(), 50);
  EXPECT_GE(ds.instance.prices.minCoeff(), 1.0);
  EXPECT_LE(ds.instance.prices.maxCoeff(), 5.0);
  EXPECT_GE(ds.truth.coef.col(0).minCoeff(), 0.5);
  EXPECT_LE(ds.truth.coef.col(0).maxCoeff(), 2.0);
  EXPECT_GE(ds.truth.coef.col(1).minCoeff(), -1.0);
  EXPECT_LE(ds.truth.coef.col(1).maxCoeff(), 1.0);
}

TEST(LogitGen, Deterministic) {
  const auto a = generate_logit_dataset(small_logit(9));
  const auto b = generate_logit_dataset(small_logit(9));
  const auto c = generate_logit_dataset(small_logit(10));
  EXPECT_EQ(a.instance.prices, b.instance.prices);
  EXPECT_EQ(a.instance.sales, b.instance.sales);
  EXPECT_EQ(a.truth.coef, b.truth.coef);
  EXPECT_NE(a.instance.prices, c.instance.prices);
}

TEST(LogitGen, NoiseDeviationBounded) {
  for (double noise : {0.0, 0.01, 0.05}) {
    LogitGenSpec spec;
    spec.noise_std = noise;
    spec.seed = 31;
    const auto ds = generate_logit_dataset(spec);
    double mad = 0.0;
    for (Eigen::Index i = 0; i < 50; ++i) {
      for (Eigen::Index t = 0; t < 50; ++t) {
        mad += std::abs(ds.instance.sales_frac(i, t) -
                        retail::demand(ds.truth, i, ds.instance.prices(i, t), -1));
      }
    }
    mad /= 2500.0;
    EXPECT_LE(mad, 2.0 * noise + 1e-6) << noise;
    EXPECT_GT(ds.instance.sales_frac.minCoeff(), 0.0);
    EXPECT_LT(ds.instance.sales_frac.maxCoeff(), 1.0);
  }
}

TEST(LogitGen, InvalidSpec) {
  for (auto mutate : std::vector<std::function<void(LogitGenSpec&)>>{
           [](LogitGenSpec& s) { s.products = 0; }, [](LogitGenSpec& s) { s.weeks = 0; },
           [](LogitGenSpec& s) { s.noise_std = -1; }, [](LogitGenSpec& s) { s.price_low = 0; },
           [](LogitGenSpec& s) { s.price_high = 0.5; },
           [](LogitGenSpec& s) { s.sensitivity_sign = 2; }}) {
    LogitGenSpec spec;
    mutate(spec);
    try {
      (void)generate_logit_dataset(spec);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kSpecInvalid);
    }
  }
}

TEST_F(DataFiles, RetailRoundTrip) {
  const auto ds = generate_logit_dataset(small_logit());
  write_retail_csv(ds.instance, dir_ / "r.csv");
  write_retail_sidecar(ds.instance, &ds.truth, dir_ / "r.json");
  const auto back = load_retail_csv(dir_ / "r.csv", dir_ / "r.json");
  EXPECT_EQ(back.product_ids, ds.instance.product_ids);
  EXPECT_EQ(back.periods, ds.instance.periods);
  EXPECT_EQ(back.prices, ds.instance.prices);
  EXPECT_EQ(back.sales, ds.instance.sales);
  EXPECT_EQ(back.sales_frac, ds.instance.sales_frac);
  EXPECT_EQ(back.market_size, ds.instance.market_size);
  EXPECT_EQ(back.price_lower, ds.instance.price_lower);
  EXPECT_EQ(back.price_upper, ds.instance.price_upper);
  EXPECT_EQ(back.sensitivity_sign, ds.instance.sensitivity_sign);

  write_retail_csv(back, dir_ / "r2.csv");
  EXPECT_EQ(slurp(dir_ / "r.csv"), slurp(dir_ / "r2.csv"));
}

TEST_F(DataFiles, RetailDefaultsWithoutSidecar) {
  const auto p = write("r.csv",
                       "product_id,period,price,sales\n"
                       "a,1,2,10\n"
                       "a,2,4,20\n"
                       "b,2,3,5\n"
                       "\n"
                       "b,1,1,0\n");
  const auto inst = load_retail_csv(p);
  EXPECT_EQ(inst.product_ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(inst.periods, (std::vector<long>{1, 2}));
  EXPECT_DOUBLE_EQ(inst.prices(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(inst.price_lower[0], 1.0);
  EXPECT_DOUBLE_EQ(inst.price_upper[0], 6.0);
  EXPECT_DOUBLE_EQ(inst.market_size[1], 5.25);
  EXPECT_EQ(inst.sensitivity_sign, -1);
}

TEST_F(DataFiles, RetailShape44x98) {
  std::string text = "product_id,period,price,sales\n";
  for (int i = 0; i < 44; ++i) {
    for (int w = 0; w < 98; ++w) {
      text += "sku" + std::to_string(i) + "," + std::to_string(201601 + w) + ",2.5,7\n";
    }
  }
  const auto inst = load_retail_csv(write("c.csv", text));
  EXPECT_EQ(inst.products(), 44);
  EXPECT_EQ(inst.periods_count(), 98);
}

TEST_F(DataFiles, RetailRejectsMalformedInput) {
  expect_code(ErrorCode::kMissingCell, [&] {
    load_retail_csv(write("dup.csv", "product_id,period,price,sales\na,1,2,1\na,1,2,1\n"));
  });
  expect_code(ErrorCode::kMissingCell, [&] {
    load_retail_csv(write("gap.csv", "product_id,period,price,sales\na,1,2,1\na,2,2,1\nb,1,2,1\n"));
  });
  expect_code(ErrorCode::kBadHeader,
              [&] { load_retail_csv(write("hdr.csv", "product,period,price,sales\na,1,2,1\n")); });
  expect_code(ErrorCode::kNonPositivePrice, [&] {
    load_retail_csv(write("neg.csv", "product_id,period,price,sales\na,1,0,1\n"));
  });
  expect_code(ErrorCode::kIoError, [&] { load_retail_csv(dir_ / "missing.csv"); });
}

TEST(OpfGen, DefaultsBuild) {
  const auto ds = generate_opf_synthetic({});
  EXPECT_EQ(ds.instance.steps(), 96);
  EXPECT_EQ(ds.instance.units(), 3);
  EXPECT_EQ(ds.instance.feature_count(), 23);
  EXPECT_EQ(ds.solar_truth.size(), 24);
  EXPECT_NO_THROW((void)opf::build_problem(ds.instance, 0.5, 0.5));
  EXPECT_LE(ds.instance.demand.maxCoeff(), 0.8 * 300.0);
  EXPECT_EQ(ds.instance.timestamps.front(), "2018-01-01T00:00:00");
  EXPECT_EQ(ds.instance.timestamps[4], "2018-01-01T01:00:00");
}

TEST(OpfGen, Deterministic) {
  OpfGenSpec spec;
  spec.seed = 5;
  const auto a = generate_opf_synthetic(spec);
  const auto b = generate_opf_synthetic(spec);
  EXPECT_EQ(a.instance.features, b.instance.features);
  EXPECT_EQ(a.instance.demand, b.instance.demand);
  EXPECT_EQ(a.instance.solar_true, b.instance.solar_true);
  EXPECT_EQ(a.solar_truth, b.solar_truth);
}

TEST(OpfGen, InvalidSpec) {
  OpfGenSpec spec;
  spec.units = 0;
  try {
    (void)generate_opf_synthetic(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpecInvalid);
  }
}

TEST_F(DataFiles, OpfRoundTrip) {
  OpfGenSpec spec;
  spec.steps = 20;
  spec.features = 5;
  spec.solar_noise = 1.0;
  const auto ds = generate_opf_synthetic(spec);
  write_opf_csv(ds.instance, dir_ / "o.csv");
  const auto back = load_opf_csv(dir_ / "o.csv");
  EXPECT_EQ(back.steps(), 20);
  EXPECT_EQ(back.units(), 3);
  EXPECT_EQ(back.feature_count(), 5);
  EXPECT_EQ(back.features, ds.instance.features);
  EXPECT_EQ(back.caps, ds.instance.caps);
  EXPECT_EQ(back.demand, ds.instance.demand);
  EXPECT_EQ(back.solar_true, ds.instance.solar_true);
  EXPECT_EQ(back.timestamps, ds.instance.timestamps);
  EXPECT_EQ(back.eps_den, ds.instance.eps_den);
  write_opf_csv(back, dir_ / "o2.csv");
  EXPECT_EQ(slurp(dir_ / "o.csv"), slurp(dir_ / "o2.csv"));
}

TEST_F(DataFiles, OpfCoefficientsFromDefaults) {
  const auto p = write("o.csv", std::string(kOpfHeader) +
                                    "2020-05-01T00:00:00Z,1,5,0.1,0\n2020-05-01T00:15:00Z,1,5,0.2,0\n");
  opf::OpfInstance defaults;
  defaults.a1 = 3;
  defaults.a2 = 0.5;
  defaults.ramp_delta = 0.1;
  const auto inst = load_opf_csv(p, defaults);
  EXPECT_EQ(inst.a1, 3);
  EXPECT_EQ(inst.a2, 0.5);
  EXPECT_EQ(inst.ramp_delta, 0.1);
  EXPECT_EQ(inst.steps(), 2);
}

TEST_F(DataFiles, OpfRejectsMalformedInput) {
  expect_code(ErrorCode::kIrregularTimestamps, [&] {
    load_opf_csv(write("shuf.csv", std::string(kOpfHeader) +
                                       "2020-05-01T00:15:00,1,5,0,0\n"
                                       "2020-05-01T00:00:00,1,5,0,0\n"
                                       "2020-05-01T00:30:00,1,5,0,0\n"));
  });
  expect_code(ErrorCode::kIrregularTimestamps, [&] {
    load_opf_csv(write("gap.csv", std::string(kOpfHeader) +
                                      "2020-05-01T00:00:00,1,5,0,0\n"
                                      "2020-05-01T00:15:00,1,5,0,0\n"
                                      "2020-05-01T00:45:00,1,5,0,0\n"));
  });
  expect_code(ErrorCode::kIrregularTimestamps, [&] {
    load_opf_csv(write("bad.csv", std::string(kOpfHeader) + "yesterday,1,5,0,0\n"));
  });
  expect_code(ErrorCode::kNegativeCapacity, [&] {
    load_opf_csv(write("cap.csv", std::string(kOpfHeader) + "2020-05-01T00:00:00,1,-5,0,0\n"));
  });
  expect_code(ErrorCode::kBadHeader, [&] {
    load_opf_csv(write("hdr.csv", "time,demand,cap_1,f_1,solar\n2020-05-01T00:00:00,1,5,0,0\n"));
  });
  expect_code(ErrorCode::kBadHeader, [&] {
    load_opf_csv(write("nocap.csv", "timestamp,demand,f_1,f_2,solar\n2020-05-01T00:00:00,1,5,0,0\n"));
  });
}

TEST(Iso8601, ParseAndFormat) {
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:00"), 0);
  EXPECT_EQ(parse_iso8601("1970-01-02T00:00Z"), 86400);
  EXPECT_EQ(parse_iso8601("2018-01-01T00:15:00"), 1514765700);
  EXPECT_FALSE(parse_iso8601("2018-02-30T00:00:00"));
  EXPECT_FALSE(parse_iso8601("2018-01-01 00:00:00"));
  EXPECT_FALSE(parse_iso8601("2018-01-01T00:00:00+01:00"));
  EXPECT_EQ(format_iso8601(1514765700), "2018-01-01T00:15:00");
  for (std::int64_t s : {0LL, 951782400LL, 1700000000LL, -86399LL}) {
    EXPECT_EQ(parse_iso8601(format_iso8601(s)), s);
  }
}
