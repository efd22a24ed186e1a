#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "jolopt/data.hpp"
#include "jolopt/error.hpp"
#include "jolopt/log.hpp"
#include "jolopt/opf.hpp"
#include "jolopt/retail.hpp"
#include "jolopt/synthetic.hpp"
#include "output.hpp"

namespace jolopt::cli {
namespace {

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::shared_ptr<const retail::RetailInstance> retail_instance(const RunConfig& c) {
  if (c.data_path) {
    return std::make_shared<const retail::RetailInstance>(
        data::load_retail_csv(*c.data_path, c.sidecar_path, c.sensitivity_sign));
  }
  return std::make_shared<const retail::RetailInstance>(
      data::generate_logit_dataset(c.logit_gen).instance);
}

std::shared_ptr<const opf::OpfInstance> opf_instance(const RunConfig& c) {
  opf::OpfInstance defaults;
  defaults.a1 = c.a1;
  defaults.a2 = c.a2;
  defaults.ramp_delta = c.ramp_delta;
  if (c.data_path) {
    return std::make_shared<const opf::OpfInstance>(data::load_opf_csv(*c.data_path, defaults));
  }
  opf::OpfInstance inst = data::generate_opf_synthetic(c.opf_gen).instance;
  inst.a1 = c.a1;
  inst.a2 = c.a2;
  inst.ramp_delta = c.ramp_delta;
  return std::make_shared<const opf::OpfInstance>(opf::make_instance(std::move(inst)));
}

/// Builds problems for one dataset, loaded once.
class ProblemSource {
 public:
  explicit ProblemSource(const RunConfig& config) : config_(config) {
    if (config.problem == ProblemKind::kRetail) retail_ = retail_instance(config);
    if (config.problem == ProblemKind::kOpf) opf_ = opf_instance(config);
  }

  PreparedProblem make(const moo::WeightPair& weight) const {
    const RunConfig& c = config_;
    PreparedProblem out;
    switch (c.problem) {
      case ProblemKind::kRetail: {
        retail::ProblemOptions o;
        if (c.ridge) o.ridge = *c.ridge;
        o.noise = c.noise;
        o.free_theta = c.free_theta;
        out.problem = retail::build_problem(*retail_, o);
        auto inst = retail_;
        out.objectives = [inst](const Vector& x, const Vector& theta) {
          const auto prices = retail::unflatten_prices(x, inst->products(), inst->periods_count());
          return std::vector<double>{
              retail::revenue_objective(*inst, retail::LogitParams::unflatten(theta), prices)};
        };
        break;
      }
      case ProblemKind::kOpf: {
        opf::ProblemOptions o;
        if (c.ridge) o.ridge = *c.ridge;
        o.noise = c.noise;
        o.projection = c.projection;
        out.problem = opf::build_problem(*opf_, weight.w1, weight.w2, o);
        auto inst = opf_;
        out.objectives = [inst](const Vector& x, const Vector& theta) {
          return opf::objective_pair(*inst, theta, x);
        };
        break;
      }
      case ProblemKind::kSynthetic: {
        synthetic::FractionalOptions o;
        o.theta_dim = c.theta_dim;
        o.curvature_min = c.curvature_min;
        o.curvature_max = c.curvature_max;
        o.noise = c.noise;
        out.problem = synthetic::make_fractional_problem(o);
        out.objectives = [](const Vector& x, const Vector&) {
          return std::vector<double>{synthetic::fractional_value(x[0])};
        };
        break;
      }
    }
    return out;
  }

 private:
  RunConfig config_;
  std::shared_ptr<const retail::RetailInstance> retail_;
  std::shared_ptr<const opf::OpfInstance> opf_;
};

unsigned job_count(const RunConfig& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

}  // namespace

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kScheduleInvalid:
    case ErrorCode::kSpecInvalid:
    case ErrorCode::kWeightsInvalid:
      return true;
    default:
      return false;
  }
}

PreparedProblem prepare_problem(const RunConfig& config, const moo::WeightPair& weight) {
  return ProblemSource(config).make(weight);
}

int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  const SolverConfig solver = config.solver_config();
  const PreparedProblem prepared = prepare_problem(config, config.weight);
  Trajectory trajectory;
  try {
    trajectory = run_mslo(prepared.problem, solver);
  } catch (const RunFailure& failure) {
    if (!failure.partial().records.empty()) write_trajectory(failure.partial(), out_dir);
    throw;
  }
  write_trajectory(trajectory, out_dir);
  const auto& last = trajectory.last();
  log << "final f=" << fmt(last.f) << " h=" << fmt(last.h)
      << " iterations=" << trajectory.iterations << " seconds=" << fmt(last.wall_clock_s)
      << " reason=" << to_string(trajectory.reason) << '\n';
  return kExitOk;
}

int cmd_grid(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  if (config.grid.out_in.empty() && config.grid.gamma0.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "grid needs grid.out_in or grid.gamma0");
  }
  const auto out_in = config.grid.out_in.empty()
                          ? std::vector<std::pair<unsigned, unsigned>>{{config.outer_steps,
                                                                        config.inner_steps}}
                          : config.grid.out_in;
  const auto gammas =
      config.grid.gamma0.empty() ? std::vector<double>{config.schedule.gamma0} : config.grid.gamma0;

  std::vector<SolverConfig> configs;
  std::vector<std::string> names;
  std::vector<std::pair<unsigned, unsigned>> cell_qr;
  std::vector<double> cell_gamma;
  for (const auto& [q, r] : out_in) {
    for (double g : gammas) {
      RunConfig cell = config;
      cell.outer_steps = q;
      cell.inner_steps = r;
      cell.schedule.gamma0 = g;
      configs.push_back(cell.solver_config());
      names.push_back("q" + std::to_string(q) + "_r" + std::to_string(r) + "_g" + short_double(g));
      cell_qr.emplace_back(q, r);
      cell_gamma.push_back(g);
    }
  }

  const ProblemSource source(config);
  const auto outcomes = run_grid([&](std::size_t) { return source.make(config.weight).problem; },
                                 configs, job_count(config) > 1, job_count(config));

  std::size_t succeeded = 0;
  auto summary = open_out(out_dir / "summary.csv");
  summary << "cell,outer_steps,inner_steps,gamma0,seed,status,reason,iterations,final_f,final_h,"
             "wall_clock_s,error\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    summary << names[i] << ',' << cell_qr[i].first << ',' << cell_qr[i].second << ','
            << fmt(cell_gamma[i]) << ',' << (configs[i].seed + i) << ',';
    if (o.ok()) {
      ++succeeded;
      const Trajectory& t = *o.trajectory;
      write_trajectory(t, out_dir / names[i]);
      summary << "ok," << to_string(t.reason) << ',' << t.iterations << ',' << fmt(t.last().f)
              << ',' << fmt(t.last().h) << ',' << fmt(t.last().wall_clock_s) << ",\n";
    } else {
      summary << "failed,,,,,," << csv_cell(o.error) << '\n';
      log << names[i] << ": " << o.error << '\n';
    }
  }
  log << succeeded << " of " << outcomes.size() << " cells succeeded\n";
  return succeeded > 0 ? kExitOk : kExitRuntime;
}

int cmd_sweep_opf(const RunConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& log) {
  if (config.problem != ProblemKind::kOpf) {
    throw Error(ErrorCode::kConfigInvalid, "sweep-opf needs problem = opf");
  }
  const SolverConfig solver = config.solver_config();
  const auto weights = config.weights.empty() ? moo::uniform_weights(11) : config.weights;
  const ProblemSource source(config);
  moo::SweepOptions options;
  options.exclusions = config.exclusions;
  options.jobs = job_count(config);
  options.parallel = options.jobs > 1;
  const auto factory = [&](const moo::WeightPair& w) {
    PreparedProblem p = source.make(w);
    return moo::SweepProblem{.problem = std::move(p.problem), .objectives = std::move(p.objectives)};
  };
  const moo::SweepResult sweep = moo::weight_sweep(factory, solver, weights, options);

  std::size_t succeeded = 0;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    if (sweep.runs[i].ok()) {
      ++succeeded;
      write_trajectory(*sweep.runs[i].trajectory, out_dir / sweep.tags[i]);
    } else {
      log << sweep.tags[i] << ": " << sweep.runs[i].error << '\n';
    }
  }

  auto archive = open_out(out_dir / "archive.csv");
  archive << "tag,w1,w2,status,f1,neg_f2,norm_f1,norm_f2,nondominated,error\n";
  const auto front = moo::pareto_filter(sweep.archive.points);
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    const std::string& tag = sweep.tags[i];
    archive << tag << ',' << fmt(sweep.weights[i].w1) << ',' << fmt(sweep.weights[i].w2) << ',';
    if (!sweep.runs[i].ok()) {
      archive << "failed,,,,,," << csv_cell(sweep.runs[i].error) << '\n';
      continue;
    }
    const auto raw = std::find_if(sweep.finals.begin(), sweep.finals.end(),
                                  [&](const moo::ObjectivePoint& p) { return p.tag == tag; });
    const auto norm = std::find_if(sweep.archive.points.begin(), sweep.archive.points.end(),
                                   [&](const moo::ObjectivePoint& p) { return p.tag == tag; });
    if (norm == sweep.archive.points.end()) {
      archive << "excluded," << fmt(raw->values[0]) << ',' << fmt(raw->values[1]) << ",,,,\n";
      continue;
    }
    const bool nondominated = std::any_of(front.begin(), front.end(),
                                          [&](const moo::ObjectivePoint& p) { return p.tag == tag; });
    archive << "ok," << fmt(raw->values[0]) << ',' << fmt(raw->values[1]) << ','
            << fmt(norm->values[0]) << ',' << fmt(norm->values[1]) << ','
            << (nondominated ? 1 : 0) << ",\n";
  }
  archive.close();
  write_hv_curve(sweep.hv_vs_iter, "k", out_dir / "hv_vs_iter.csv");
  write_hv_curve(sweep.hv_vs_time, "wall_clock_s", out_dir / "hv_vs_time.csv");
  log << "hypervolume=" << fmt(sweep.hypervolume) << " runs=" << succeeded << '/'
      << sweep.runs.size() << '\n';
  return succeeded > 0 ? kExitOk : kExitRuntime;
}

int cmd_gen(const RunConfig& config, const std::string& kind, const std::filesystem::path& out_dir,
            std::ostream& log) {
  if (kind == "logit") {
    const auto ds = data::generate_logit_dataset(config.logit_gen);
    data::write_retail_csv(ds.instance, out_dir / "logit.csv");
    data::write_retail_sidecar(ds.instance, &ds.truth, out_dir / "logit_truth.json");
    log << "wrote " << ds.instance.products() * ds.instance.periods_count() << " rows to "
        << (out_dir / "logit.csv").string() << '\n';
    return kExitOk;
  }
  if (kind == "opf") {
    const auto ds = data::generate_opf_synthetic(config.opf_gen);
    data::write_opf_csv(ds.instance, out_dir / "opf.csv");
    const auto model = opf::SolarModel::unflatten(ds.solar_truth);
    nlohmann::json truth;
    truth["weights"] = std::vector<double>(model.weights.data(),
                                           model.weights.data() + model.weights.size());
    truth["intercept"] = model.intercept;
    auto out = open_out(out_dir / "opf_truth.json");
    out << truth.dump(2) << '\n';
    log << "wrote " << ds.instance.steps() << " rows to " << (out_dir / "opf.csv").string() << '\n';
    return kExitOk;
  }
  throw Error(ErrorCode::kConfigInvalid, "gen kind must be logit or opf, got '" + kind + "'");
}

double archive_hypervolume(const std::filesystem::path& archive,
                           const std::vector<std::string>& exclusions, double margin) {
  const CsvRows table = read_csv_rows(archive);
  const std::size_t tag = table.column("tag");
  const std::size_t status = table.column("status");
  const std::size_t f1 = table.column("f1");
  const std::size_t f2 = table.column("neg_f2");
  std::vector<moo::ObjectivePoint> points;
  for (const auto& row : table.rows) {
    if (row[status] != "ok" && row[status] != "excluded") continue;
    points.push_back({.values = {std::stod(row[f1]), std::stod(row[f2])}, .tag = row[tag]});
  }
  if (points.empty()) throw Error(ErrorCode::kAllExcluded, "archive has no points");
  const auto frame = moo::make_frame(points, exclusions, margin);
  return moo::frame_hypervolume(frame, points);
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace jolopt::cli
