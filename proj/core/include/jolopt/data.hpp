#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "jolopt/opf.hpp"
#include "jolopt/retail.hpp"

namespace jolopt::data {

/// Synthetic binary-logit price/sales panel.
struct LogitGenSpec {
  Eigen::Index products = 50;
  Eigen::Index weeks = 50;
  double price_low = 1.0;
  double price_high = 5.0;
  double theta0_low = 0.5;   // price sensitivity range
  double theta0_high = 2.0;
  double theta1_low = -1.0;  // intercept range
  double theta1_high = 1.0;
  double noise_std = 0.0;    // additive noise on the demand fraction
  double market_size = 100.0;
  int sensitivity_sign = -1;
  std::uint64_t seed = 0;
};

struct LogitDataset {
  retail::RetailInstance instance;
  retail::LogitParams truth;
};

/// Prices uniform on [price_low, price_high]; y = demand(truth, p) + N(0, noise_std^2),
/// clamped to [1e-6, 1 - 1e-6]; sales = y * market_size. Price bounds are the
/// sampling range. Throws Error(kSpecInvalid).
LogitDataset generate_logit_dataset(const LogitGenSpec& spec);

/// CSV header: product_id,period,price,sales.
void write_retail_csv(const retail::RetailInstance& instance, const std::filesystem::path& path);

/// Optional per-product sidecar: {"products": {"<id>": {"price_lower": ..,
/// "price_upper": .., "market_size": ..}}, "sensitivity_sign": -1}.
void write_retail_sidecar(const retail::RetailInstance& instance, const retail::LogitParams* truth,
                          const std::filesystem::path& path);

/// Throws kIoError, kBadHeader, kMissingCell (gap or duplicate), kNonPositivePrice.
retail::RetailInstance load_retail_csv(const std::filesystem::path& path,
                                       const std::optional<std::filesystem::path>& sidecar = {},
                                       int sensitivity_sign = -1);

struct OpfGenSpec {
  Eigen::Index steps = 96;
  Eigen::Index units = 3;
  Eigen::Index features = 23;
  double capacity = 100.0;      // per unit, constant over time
  double solar_noise = 0.0;
  double demand_base = 150.0;
  double demand_amplitude = 40.0;
  double demand_noise = 2.0;
  std::uint64_t seed = 0;
};

struct OpfDataset {
  opf::OpfInstance instance;
  Vector solar_truth;  // (weights, intercept) used to generate solar
};

/// Standard-normal features, solar = max(0, w.phi + c + noise), sinusoidal
/// demand capped at 80% of total capacity (hence feasible for every
/// nonnegative renewable prediction). Throws Error(kSpecInvalid).
OpfDataset generate_opf_synthetic(const OpfGenSpec& spec);

/// CSV header: timestamp,demand,cap_1..cap_N2,f_1..f_F,solar.
void write_opf_csv(const opf::OpfInstance& instance, const std::filesystem::path& path);

/// Throws kIoError, kBadHeader, kIrregularTimestamps, kNegativeCapacity.
/// Cost coefficients and ramp delta come from `defaults`.
opf::OpfInstance load_opf_csv(const std::filesystem::path& path,
                              const opf::OpfInstance& defaults = {});

/// Seconds since the Unix epoch for "YYYY-MM-DDTHH:MM[:SS][Z]".
std::optional<std::int64_t> parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t epoch_seconds);

}  // namespace jolopt::data
