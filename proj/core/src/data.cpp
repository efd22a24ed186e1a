#include "jolopt/data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "jolopt/error.hpp"

namespace jolopt::data {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
      line = line.substr(3);  // UTF-8 BOM
    }
    if (trim(line).empty()) continue;
    if (table.header.empty()) {
      table.header = split_row(line);
      continue;
    }
    table.rows.push_back(split_row(line));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw Error(ErrorCode::kBadHeader, path.string() + " has no header row");
  return table;
}

double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kBadHeader,
                "line " + std::to_string(line) + ": column " + column + " is not a number: '" + s + "'");
  }
}

long parse_long(const std::string& s, std::size_t line, const std::string& column) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kBadHeader,
                "line " + std::to_string(line) + ": column " + column + " is not an integer: '" + s + "'");
  }
}

void require_columns(const CsvTable& table) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw Error(ErrorCode::kBadHeader, "line " + std::to_string(table.line_numbers[r]) +
                                             " has " + std::to_string(table.rows[r].size()) +
                                             " cells, header has " +
                                             std::to_string(table.header.size()));
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

}  // namespace

LogitDataset generate_logit_dataset(const LogitGenSpec& spec) {
  if (spec.products < 1 || spec.weeks < 1) {
    throw Error(ErrorCode::kSpecInvalid, "products and weeks must be >= 1");
  }
  if (!(spec.noise_std >= 0.0)) throw Error(ErrorCode::kSpecInvalid, "noise_std must be >= 0");
  if (!(spec.price_low > 0.0) || !(spec.price_low <= spec.price_high)) {
    throw Error(ErrorCode::kSpecInvalid, "price range must satisfy 0 < low <= high");
  }
  if (!(spec.theta0_low <= spec.theta0_high) || !(spec.theta1_low <= spec.theta1_high)) {
    throw Error(ErrorCode::kSpecInvalid, "parameter ranges must be ordered");
  }
  if (!(spec.market_size > 0.0)) throw Error(ErrorCode::kSpecInvalid, "market size must be > 0");
  if (spec.sensitivity_sign != 1 && spec.sensitivity_sign != -1) {
    throw Error(ErrorCode::kSpecInvalid, "sensitivity sign must be +1 or -1");
  }

  Rng rng(spec.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  std::normal_distribution<double> noise(0.0, 1.0);

  const Eigen::Index n = spec.products;
  const Eigen::Index t = spec.weeks;
  retail::LogitParams truth;
  truth.coef.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    truth.coef(i, 0) = uniform(spec.theta0_low, spec.theta0_high);
    truth.coef(i, 1) = uniform(spec.theta1_low, spec.theta1_high);
  }
  retail::Matrix prices(n, t);
  retail::Matrix sales(n, t);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      const double p = uniform(spec.price_low, spec.price_high);
      double y = retail::demand(truth, i, p, spec.sensitivity_sign);
      if (spec.noise_std > 0.0) y += spec.noise_std * noise(rng);
      y = std::clamp(y, retail::kFracFloor, 1.0 - retail::kFracFloor);
      prices(i, k) = p;
      sales(i, k) = y * spec.market_size;
    }
  }
  LogitDataset out;
  out.instance = retail::make_instance({}, {}, std::move(prices), std::move(sales),
                                       Vector::Constant(n, spec.market_size),
                                       Vector::Constant(n, spec.price_low),
                                       Vector::Constant(n, spec.price_high), spec.sensitivity_sign);
  out.truth = std::move(truth);
  return out;
}

void write_retail_csv(const retail::RetailInstance& instance, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "product_id,period,price,sales\n";
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    for (Eigen::Index k = 0; k < instance.periods_count(); ++k) {
      out << instance.product_ids[i] << ',' << instance.periods[k] << ','
          << fmt_double(instance.prices(i, k)) << ',' << fmt_double(instance.sales(i, k)) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

void write_retail_sidecar(const retail::RetailInstance& instance, const retail::LogitParams* truth,
                          const std::filesystem::path& path) {
  json doc;
  doc["sensitivity_sign"] = instance.sensitivity_sign;
  json products = json::object();
  for (Eigen::Index i = 0; i < instance.products(); ++i) {
    json p;
    p["price_lower"] = instance.price_lower[i];
    p["price_upper"] = instance.price_upper[i];
    p["market_size"] = instance.market_size[i];
    if (truth != nullptr) {
      p["theta0"] = truth->coef(i, 0);
      p["theta1"] = truth->coef(i, 1);
    }
    products[instance.product_ids[i]] = std::move(p);
  }
  doc["products"] = std::move(products);
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

retail::RetailInstance load_retail_csv(const std::filesystem::path& path,
                                       const std::optional<std::filesystem::path>& sidecar,
                                       int sensitivity_sign) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected{"product_id", "period", "price", "sales"};
  if (table.header != expected) {
    throw Error(ErrorCode::kBadHeader, path.string() + ": expected header product_id,period,price,sales");
  }
  require_columns(table);
  if (table.rows.empty()) throw Error(ErrorCode::kMissingCell, path.string() + " has no data rows");

  std::vector<std::string> ids;
  std::unordered_map<std::string, Eigen::Index> id_index;
  std::map<long, Eigen::Index> period_index;
  struct Cell {
    Eigen::Index product;
    long period;
    double price;
    double sales;
    std::size_t line;
  };
  std::vector<Cell> cells;
  cells.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (row[0].empty()) throw Error(ErrorCode::kBadHeader, "line " + std::to_string(line) + ": empty product_id");
    auto [it, inserted] = id_index.emplace(row[0], static_cast<Eigen::Index>(ids.size()));
    if (inserted) ids.push_back(row[0]);
    const long period = parse_long(row[1], line, "period");
    const double price = parse_double(row[2], line, "price");
    const double sales = parse_double(row[3], line, "sales");
    if (!(price > 0.0)) {
      throw Error(ErrorCode::kNonPositivePrice, "line " + std::to_string(line) + ": price must be > 0");
    }
    if (sales < 0.0) {
      throw Error(ErrorCode::kBadHeader, "line " + std::to_string(line) + ": negative sales");
    }
    period_index.emplace(period, 0);
    cells.push_back({it->second, period, price, sales, line});
  }
  std::vector<long> periods;
  for (auto& [p, idx] : period_index) {
    idx = static_cast<Eigen::Index>(periods.size());
    periods.push_back(p);
  }

  const auto n = static_cast<Eigen::Index>(ids.size());
  const auto t = static_cast<Eigen::Index>(periods.size());
  retail::Matrix prices(n, t);
  retail::Matrix sales(n, t);
  std::vector<char> seen(static_cast<std::size_t>(n * t), 0);
  for (const Cell& c : cells) {
    const Eigen::Index k = period_index.at(c.period);
    auto& flag = seen[static_cast<std::size_t>(c.product * t + k)];
    if (flag) {
      throw Error(ErrorCode::kMissingCell, "line " + std::to_string(c.line) + ": duplicate row for product " +
                                               ids[c.product] + ", period " + std::to_string(c.period));
    }
    flag = 1;
    prices(c.product, k) = c.price;
    sales(c.product, k) = c.sales;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < t; ++k) {
      if (!seen[static_cast<std::size_t>(i * t + k)]) {
        throw Error(ErrorCode::kMissingCell, "no row for product " + ids[i] + ", period " +
                                                 std::to_string(periods[k]));
      }
    }
  }

  Vector market_size;
  Vector lower;
  Vector upper;
  if (sidecar) {
    std::ifstream in(*sidecar);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + sidecar->string());
    json doc;
    try {
      in >> doc;
      if (doc.contains("sensitivity_sign")) sensitivity_sign = doc.at("sensitivity_sign").get<int>();
      const json& prods = doc.at("products");
      market_size.resize(n);
      lower.resize(n);
      upper.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const json& p = prods.at(ids[i]);
        lower[i] = p.at("price_lower").get<double>();
        upper[i] = p.at("price_upper").get<double>();
        market_size[i] = p.at("market_size").get<double>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kBadHeader, sidecar->string() + ": " + e.what());
    }
  }
  return retail::make_instance(std::move(ids), std::move(periods), std::move(prices),
                               std::move(sales), std::move(market_size), std::move(lower),
                               std::move(upper), sensitivity_sign);
}

OpfDataset generate_opf_synthetic(const OpfGenSpec& spec) {
  if (spec.steps < 1 || spec.units < 1 || spec.features < 1) {
    throw Error(ErrorCode::kSpecInvalid, "steps, units and features must be >= 1");
  }
  if (!(spec.capacity > 0.0) || !(spec.demand_base >= 0.0) || !(spec.solar_noise >= 0.0) ||
      !(spec.demand_noise >= 0.0)) {
    throw Error(ErrorCode::kSpecInvalid, "capacity must be > 0; demand and noise levels >= 0");
  }
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-5.0, 5.0);

  const Eigen::Index t = spec.steps;
  const Eigen::Index f = spec.features;
  Vector truth(f + 1);
  for (Eigen::Index j = 0; j < f; ++j) truth[j] = weight(rng);
  truth[f] = 40.0;

  opf::OpfInstance raw;
  raw.features.resize(t, f);
  for (Eigen::Index k = 0; k < t; ++k) {
    for (Eigen::Index j = 0; j < f; ++j) raw.features(k, j) = normal(rng);
  }
  raw.solar_true.resize(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    double s = raw.features.row(k).dot(truth.head(f)) + truth[f];
    if (spec.solar_noise > 0.0) s += spec.solar_noise * normal(rng);
    raw.solar_true[k] = std::max(0.0, s);
  }
  raw.caps = opf::Matrix::Constant(spec.units, t, spec.capacity);
  const double demand_cap = 0.8 * spec.capacity * static_cast<double>(spec.units);
  raw.demand.resize(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(t);
    double d = spec.demand_base + spec.demand_amplitude * std::sin(phase);
    if (spec.demand_noise > 0.0) d += spec.demand_noise * normal(rng);
    raw.demand[k] = std::clamp(d, 0.0, demand_cap);
  }
  const std::int64_t start = *parse_iso8601("2018-01-01T00:00:00");
  for (Eigen::Index k = 0; k < t; ++k) raw.timestamps.push_back(format_iso8601(start + 900 * k));

  return OpfDataset{.instance = opf::make_instance(std::move(raw)), .solar_truth = truth};
}

void write_opf_csv(const opf::OpfInstance& instance, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "timestamp,demand";
  for (Eigen::Index i = 0; i < instance.units(); ++i) out << ",cap_" << (i + 1);
  for (Eigen::Index j = 0; j < instance.feature_count(); ++j) out << ",f_" << (j + 1);
  out << ",solar\n";
  const std::int64_t start = *parse_iso8601("2018-01-01T00:00:00");
  for (Eigen::Index k = 0; k < instance.steps(); ++k) {
    out << (instance.timestamps.empty() ? format_iso8601(start + 900 * k) : instance.timestamps[k])
        << ',' << fmt_double(instance.demand[k]);
    for (Eigen::Index i = 0; i < instance.units(); ++i) out << ',' << fmt_double(instance.caps(i, k));
    for (Eigen::Index j = 0; j < instance.feature_count(); ++j) {
      out << ',' << fmt_double(instance.features(k, j));
    }
    out << ',' << fmt_double(instance.solar_true[k]) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

opf::OpfInstance load_opf_csv(const std::filesystem::path& path, const opf::OpfInstance& defaults) {
  const CsvTable table = read_csv(path);
  const auto& h = table.header;
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::kBadHeader, path.string() + ": " + why);
  };
  if (h.size() < 5 || h[0] != "timestamp" || h[1] != "demand" || h.back() != "solar") {
    bad("expected timestamp,demand,cap_1..cap_N2,f_1..f_F,solar");
  }
  std::size_t col = 2;
  Eigen::Index units = 0;
  while (col < h.size() && h[col] == "cap_" + std::to_string(units + 1)) {
    ++units;
    ++col;
  }
  Eigen::Index feats = 0;
  while (col < h.size() && h[col] == "f_" + std::to_string(feats + 1)) {
    ++feats;
    ++col;
  }
  if (units < 1) bad("no cap_1.. columns");
  if (feats < 1) bad("no f_1.. columns");
  if (col != h.size() - 1) bad("unexpected column '" + h[col] + "'");
  require_columns(table);
  if (table.rows.empty()) bad("no data rows");

  const auto t = static_cast<Eigen::Index>(table.rows.size());
  opf::OpfInstance raw;
  raw.a1 = defaults.a1;
  raw.a2 = defaults.a2;
  raw.ramp_delta = defaults.ramp_delta;
  raw.eps_den = defaults.eps_den;
  raw.demand.resize(t);
  raw.caps.resize(units, t);
  raw.features.resize(t, feats);
  raw.solar_true.resize(t);
  std::vector<std::int64_t> stamps;
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto& row = table.rows[static_cast<std::size_t>(k)];
    const std::size_t line = table.line_numbers[static_cast<std::size_t>(k)];
    const auto stamp = parse_iso8601(row[0]);
    if (!stamp) {
      throw Error(ErrorCode::kIrregularTimestamps,
                  "line " + std::to_string(line) + ": unparseable timestamp '" + row[0] + "'");
    }
    stamps.push_back(*stamp);
    raw.timestamps.push_back(row[0]);
    raw.demand[k] = parse_double(row[1], line, "demand");
    for (Eigen::Index i = 0; i < units; ++i) {
      const double cap = parse_double(row[2 + i], line, h[2 + i]);
      if (cap < 0.0) {
        throw Error(ErrorCode::kNegativeCapacity,
                    "line " + std::to_string(line) + ": " + h[2 + i] + " is negative");
      }
      raw.caps(i, k) = cap;
    }
    for (Eigen::Index j = 0; j < feats; ++j) {
      raw.features(k, j) = parse_double(row[2 + units + j], line, h[2 + units + j]);
    }
    raw.solar_true[k] = parse_double(row.back(), line, "solar");
  }
  if (t >= 2) {
    const std::int64_t step = stamps[1] - stamps[0];
    if (step <= 0) throw Error(ErrorCode::kIrregularTimestamps, "timestamps must increase");
    for (std::size_t k = 2; k < stamps.size(); ++k) {
      if (stamps[k] - stamps[k - 1] != step) {
        throw Error(ErrorCode::kIrregularTimestamps,
                    "row " + std::to_string(k + 1) + " breaks the uniform spacing of " +
                        std::to_string(step) + " s");
      }
    }
  }
  return opf::make_instance(std::move(raw));
}

std::optional<std::int64_t> parse_iso8601(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail[8] = {0};
  int n = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%7s", &y, &mo, &d, &h, &mi, &s, tail);
  if (n < 6) {
    s = 0;
    tail[0] = 0;
    n = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d%7s", &y, &mo, &d, &h, &mi, tail);
    if (n < 5) return std::nullopt;
  }
  const std::string rest(tail);
  if (!rest.empty() && rest != "Z") return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60 || h < 0 || mi < 0 || s < 0) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                static_cast<int>(rem % 60));
  return buf;
}

}  // namespace jolopt::data
