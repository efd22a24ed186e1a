#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "jolopt/error.hpp"

namespace jolopt::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::kConfigInvalid, message);
}

void reject_unknown(const json& object, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!object.is_object()) fail(where + " must be an object");
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      fail("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double as_number(const json& value, const std::string& name) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail(name + " must be a number");
}

std::uint64_t as_count(const json& value, const std::string& name) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
      try {
        return std::stoull(text);
      } catch (const std::exception&) {
      }
    }
  }
  fail(name + " must be a nonnegative integer");
}

bool as_bool(const json& value, const std::string& name) {
  if (!value.is_boolean()) fail(name + " must be true or false");
  return value.get<bool>();
}

std::string as_string(const json& value, const std::string& name) {
  if (!value.is_string()) fail(name + " must be a string");
  return value.get<std::string>();
}

template <typename F>
void read(const json& object, const std::string& where, const char* key, F&& assign) {
  if (auto it = object.find(key); it != object.end()) assign(*it, path_of(where, key));
}

void read_number(const json& o, const std::string& w, const char* key, double& out) {
  read(o, w, key, [&](const json& v, const std::string& n) { out = as_number(v, n); });
}

template <typename Int>
void read_count(const json& o, const std::string& w, const char* key, Int& out) {
  read(o, w, key, [&](const json& v, const std::string& n) {
    out = static_cast<Int>(as_count(v, n));
  });
}

ProblemKind parse_problem(const std::string& name) {
  if (name == "retail") return ProblemKind::kRetail;
  if (name == "opf") return ProblemKind::kOpf;
  if (name == "synthetic-test") return ProblemKind::kSynthetic;
  fail("problem must be retail, opf or synthetic-test, got '" + name + "'");
}

void parse_generator(const json& g, RunConfig& c) {
  const std::string w = "generate";
  switch (c.problem) {
    case ProblemKind::kRetail: {
      reject_unknown(g, w, {"products", "weeks", "price_low", "price_high", "theta0_low",
                            "theta0_high", "theta1_low", "theta1_high", "noise_std",
                            "market_size", "seed"});
      auto& s = c.logit_gen;
      read_count(g, w, "products", s.products);
      read_count(g, w, "weeks", s.weeks);
      read_number(g, w, "price_low", s.price_low);
      read_number(g, w, "price_high", s.price_high);
      read_number(g, w, "theta0_low", s.theta0_low);
      read_number(g, w, "theta0_high", s.theta0_high);
      read_number(g, w, "theta1_low", s.theta1_low);
      read_number(g, w, "theta1_high", s.theta1_high);
      read_number(g, w, "noise_std", s.noise_std);
      read_number(g, w, "market_size", s.market_size);
      read_count(g, w, "seed", s.seed);
      break;
    }
    case ProblemKind::kOpf: {
      reject_unknown(g, w, {"steps", "units", "features", "capacity", "solar_noise", "demand_base",
                            "demand_amplitude", "demand_noise", "seed"});
      auto& s = c.opf_gen;
      read_count(g, w, "steps", s.steps);
      read_count(g, w, "units", s.units);
      read_count(g, w, "features", s.features);
      read_number(g, w, "capacity", s.capacity);
      read_number(g, w, "solar_noise", s.solar_noise);
      read_number(g, w, "demand_base", s.demand_base);
      read_number(g, w, "demand_amplitude", s.demand_amplitude);
      read_number(g, w, "demand_noise", s.demand_noise);
      read_count(g, w, "seed", s.seed);
      break;
    }
    case ProblemKind::kSynthetic:
      fail("synthetic-test takes no generate section");
  }
}

moo::WeightPair parse_weight(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 2) fail(name + " must be a [w1, w2] pair");
  const moo::WeightPair p{.w1 = as_number(v[0], name), .w2 = as_number(v[1], name)};
  if (!(p.w1 >= 0.0) || !(p.w2 >= 0.0) || std::abs(p.w1 + p.w2 - 1.0) > 1e-12) {
    fail(name + " must be nonnegative and sum to 1");
  }
  return p;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kRetail: return "retail";
    case ProblemKind::kOpf: return "opf";
    case ProblemKind::kSynthetic: return "synthetic-test";
  }
  return "unknown";
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig c;
  c.schedule = validate_schedule(schedule.gamma0, schedule.beta0, schedule.a, schedule.b,
                                 schedule.tau);
  c.outer_steps = outer_steps;
  c.inner_steps = inner_steps;
  c.stop = StopCriteria{.max_global_iters = max_iters, .max_wall_time_s = max_wall_time_s};
  c.seed = seed;
  c.record_every = record_every;
  c.projection = projection;
  c.clamp_inner_step = clamp_inner_step;
  c.validate();
  return c;
}

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, "",
                 {"problem", "data", "generate", "schedule", "outer_steps", "inner_steps",
                  "max_iters", "max_wall_time_s", "seed", "record_every", "projection",
                  "clamp_inner_step", "noise", "ridge", "retail", "opf", "synthetic", "grid",
                  "jobs"});
  RunConfig c;
  read(doc, "", "problem", [&](const json& v, const std::string& n) {
    c.problem = parse_problem(as_string(v, n));
  });

  if (auto it = doc.find("data"); it != doc.end()) {
    reject_unknown(*it, "data", {"path", "sidecar"});
    read(*it, "data", "path", [&](const json& v, const std::string& n) { c.data_path = as_string(v, n); });
    read(*it, "data", "sidecar", [&](const json& v, const std::string& n) {
      c.sidecar_path = as_string(v, n);
    });
    if (c.sidecar_path && !c.data_path) fail("data.sidecar given without data.path");
    if (c.sidecar_path && c.problem != ProblemKind::kRetail) fail("data.sidecar applies to retail only");
    if (c.data_path && c.problem == ProblemKind::kSynthetic) fail("synthetic-test takes no data");
  }
  if (auto it = doc.find("generate"); it != doc.end()) {
    if (c.data_path) fail("data.path and generate are mutually exclusive");
    parse_generator(*it, c);
  }

  if (auto it = doc.find("schedule"); it != doc.end()) {
    reject_unknown(*it, "schedule", {"gamma0", "beta0", "a", "b", "tau"});
    read_number(*it, "schedule", "gamma0", c.schedule.gamma0);
    read_number(*it, "schedule", "beta0", c.schedule.beta0);
    read_number(*it, "schedule", "a", c.schedule.a);
    read_number(*it, "schedule", "b", c.schedule.b);
    read_number(*it, "schedule", "tau", c.schedule.tau);
  }
  read_count(doc, "", "outer_steps", c.outer_steps);
  read_count(doc, "", "inner_steps", c.inner_steps);

  switch (c.problem) {
    case ProblemKind::kRetail:
      c.max_iters = 500;
      c.max_wall_time_s = 30.0;
      break;
    case ProblemKind::kOpf:
      c.max_iters = 100;
      c.max_wall_time_s = 600.0;
      c.projection.max_sweeps = 200000;
      break;
    case ProblemKind::kSynthetic:
      c.max_iters = 5000;
      c.max_wall_time_s = std::nullopt;
      c.noise.kind = NoiseKind::kNone;
      break;
  }
  read(doc, "", "max_iters", [&](const json& v, const std::string& n) {
    c.max_iters = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(as_count(v, n));
  });
  read(doc, "", "max_wall_time_s", [&](const json& v, const std::string& n) {
    c.max_wall_time_s = v.is_null() ? std::nullopt : std::optional<double>(as_number(v, n));
  });
  read_count(doc, "", "seed", c.seed);
  read_count(doc, "", "record_every", c.record_every);
  if (auto it = doc.find("projection"); it != doc.end()) {
    reject_unknown(*it, "projection", {"tol", "max_sweeps"});
    read_number(*it, "projection", "tol", c.projection.tol);
    read_count(*it, "projection", "max_sweeps", c.projection.max_sweeps);
  }
  read(doc, "", "clamp_inner_step", [&](const json& v, const std::string& n) {
    c.clamp_inner_step = as_bool(v, n);
  });
  if (auto it = doc.find("noise"); it != doc.end()) {
    reject_unknown(*it, "noise", {"kind", "stddev", "batch_size"});
    read(*it, "noise", "kind", [&](const json& v, const std::string& n) {
      const auto kind = as_string(v, n);
      if (kind == "none") c.noise.kind = NoiseKind::kNone;
      else if (kind == "gaussian") c.noise.kind = NoiseKind::kGaussian;
      else if (kind == "minibatch") c.noise.kind = NoiseKind::kMinibatch;
      else fail("noise.kind must be none, gaussian or minibatch");
    });
    read_number(*it, "noise", "stddev", c.noise.stddev);
    read_count(*it, "noise", "batch_size", c.noise.batch_size);
  }
  if (!(c.noise.stddev >= 0.0)) fail("noise.stddev must be >= 0");
  if (c.noise.kind == NoiseKind::kMinibatch && c.noise.batch_size == 0) {
    fail("noise.batch_size must be >= 1");
  }
  read(doc, "", "ridge", [&](const json& v, const std::string& n) {
    c.ridge = as_number(v, n);
    if (!(*c.ridge >= 0.0)) fail("ridge must be >= 0");
  });

  if (auto it = doc.find("retail"); it != doc.end()) {
    if (c.problem != ProblemKind::kRetail) fail("retail section given for problem " + std::string(to_string(c.problem)));
    reject_unknown(*it, "retail", {"sensitivity_sign", "free_theta"});
    read(*it, "retail", "sensitivity_sign", [&](const json& v, const std::string& n) {
      const double s = as_number(v, n);
      if (s != 1.0 && s != -1.0) fail(n + " must be +1 or -1");
      c.sensitivity_sign = static_cast<int>(s);
    });
    read(*it, "retail", "free_theta", [&](const json& v, const std::string& n) {
      c.free_theta = as_bool(v, n);
    });
  }
  c.logit_gen.sensitivity_sign = c.sensitivity_sign;

  if (auto it = doc.find("opf"); it != doc.end()) {
    if (c.problem != ProblemKind::kOpf) fail("opf section given for problem " + std::string(to_string(c.problem)));
    reject_unknown(*it, "opf", {"a1", "a2", "ramp_delta", "weight", "weights", "weight_count",
                                "exclusions"});
    read_number(*it, "opf", "a1", c.a1);
    read_number(*it, "opf", "a2", c.a2);
    read_number(*it, "opf", "ramp_delta", c.ramp_delta);
    read(*it, "opf", "weight", [&](const json& v, const std::string& n) { c.weight = parse_weight(v, n); });
    read(*it, "opf", "weights", [&](const json& v, const std::string& n) {
      if (!v.is_array() || v.empty()) fail(n + " must be a nonempty list of [w1, w2] pairs");
      for (std::size_t i = 0; i < v.size(); ++i) {
        c.weights.push_back(parse_weight(v[i], n + "[" + std::to_string(i) + "]"));
      }
    });
    read(*it, "opf", "weight_count", [&](const json& v, const std::string& n) {
      if (!c.weights.empty()) fail("opf.weights and opf.weight_count are mutually exclusive");
      const auto count = as_count(v, n);
      if (count < 2 || count > 10000) fail(n + " must be in [2, 10000]");
      c.weights = moo::uniform_weights(static_cast<int>(count));
    });
    read(*it, "opf", "exclusions", [&](const json& v, const std::string& n) {
      if (!v.is_array()) fail(n + " must be a list of tags");
      for (const auto& e : v) c.exclusions.push_back(as_string(e, n));
    });
  }

  if (auto it = doc.find("synthetic"); it != doc.end()) {
    if (c.problem != ProblemKind::kSynthetic) fail("synthetic section given for problem " + std::string(to_string(c.problem)));
    reject_unknown(*it, "synthetic", {"theta_dim", "curvature_min", "curvature_max"});
    read_count(*it, "synthetic", "theta_dim", c.theta_dim);
    read_number(*it, "synthetic", "curvature_min", c.curvature_min);
    read_number(*it, "synthetic", "curvature_max", c.curvature_max);
  }

  if (auto it = doc.find("grid"); it != doc.end()) {
    reject_unknown(*it, "grid", {"out_in", "gamma0"});
    read(*it, "grid", "out_in", [&](const json& v, const std::string& n) {
      if (!v.is_array() || v.empty()) fail(n + " must be a nonempty list of [Q, R] pairs");
      for (const auto& pair : v) {
        if (!pair.is_array() || pair.size() != 2) fail(n + " entries must be [Q, R] pairs");
        c.grid.out_in.emplace_back(static_cast<unsigned>(as_count(pair[0], n)),
                                   static_cast<unsigned>(as_count(pair[1], n)));
      }
    });
    read(*it, "grid", "gamma0", [&](const json& v, const std::string& n) {
      if (!v.is_array() || v.empty()) fail(n + " must be a nonempty list of numbers");
      for (const auto& g : v) c.grid.gamma0.push_back(as_number(g, n));
    });
  }
  read_count(doc, "", "jobs", c.jobs);

  // Schedule, budget and projection checks surface as config errors now
  // rather than at run time.
  (void)c.solver_config();
  return c;
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &document;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail("--set key '" + key + "' has an empty component");
    if (!node->is_object()) fail("--set key '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides,
                      const std::optional<std::string>& default_problem) {
  json doc = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) fail("cannot open config " + path->string());
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail("config " + path->string() + " is not valid JSON");
    if (!doc.is_object()) fail("config must be a JSON object");
  }
  for (const auto& o : overrides) apply_override(doc, o);
  if (default_problem && !doc.contains("problem")) doc["problem"] = *default_problem;
  return parse_config(doc);
}

}  // namespace jolopt::cli
