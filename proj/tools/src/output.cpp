#include "output.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "jolopt/error.hpp"

namespace jolopt::cli {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> split_quoted(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

}  // namespace

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  auto out = open_out(path);
  const Eigen::Index n = trajectory.final_x.size();
  const Eigen::Index m = trajectory.final_theta.size();
  out << "k,wall_clock_s,f,h";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  for (Eigen::Index j = 0; j < m; ++j) out << ",theta_" << j;
  out << '\n';
  std::string line;
  for (const auto& r : trajectory.records) {
    line = std::to_string(r.k) + ',' + fmt(r.wall_clock_s) + ',' + fmt(r.f) + ',' + fmt(r.h);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) line += ',' + fmt(r.x[i]);
    for (Eigen::Index j = 0; j < r.theta.size(); ++j) line += ',' + fmt(r.theta[j]);
    out << line << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

void write_trajectory_json(const Trajectory& trajectory, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["terminal"] = {{"reason", std::string(to_string(trajectory.reason))},
                     {"iterations", trajectory.iterations},
                     {"final_x", to_std(trajectory.final_x)},
                     {"final_theta", to_std(trajectory.final_theta)}};
  doc["beta0_used"] = trajectory.beta0_used;
  auto records = nlohmann::json::array();
  for (const auto& r : trajectory.records) {
    records.push_back({{"k", r.k},
                       {"wall_clock_s", r.wall_clock_s},
                       {"f", r.f},
                       {"h", r.h},
                       {"x", to_std(r.x)},
                       {"theta", to_std(r.theta)}});
  }
  doc["records"] = std::move(records);
  auto out = open_out(path);
  out << doc.dump() << '\n';
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& dir) {
  write_trajectory_csv(trajectory, dir / "trajectory.csv");
  write_trajectory_json(trajectory, dir / "trajectory.json");
}

void write_hv_curve(const std::vector<moo::CurvePoint>& curve, const std::string& axis,
                    const std::filesystem::path& path) {
  auto out = open_out(path);
  out << axis << ",hv\n";
  for (const auto& p : curve) out << fmt(p.at) << ',' << fmt(p.hv) << '\n';
}

std::size_t CsvRows::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kBadHeader, "missing column '" + name + "'");
}

CsvRows read_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  CsvRows table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_quoted(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        throw Error(ErrorCode::kBadHeader, path.string() + ": row width differs from header");
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw Error(ErrorCode::kBadHeader, path.string() + " is empty");
  return table;
}

}  // namespace jolopt::cli
