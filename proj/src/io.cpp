#include "hardcore/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace hardcore {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string distribution_csv(const GridDistribution& F, std::string_view derivative_column) {
  const Grid& grid = F.grid();
  std::string out = "z,F,";
  out += derivative_column;
  out += '\n';
  auto row = [&](std::size_t i, double value) {
    out += format_double(grid[i]);
    out += ',';
    out += format_double(value);
    out += ',';
    if (F.has_derivative()) out += format_double(F.derivative()[i]);
    out += '\n';
  };
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F.jump_at(i) != 0.0) row(i, F.left_limit(i));
    row(i, F[i]);
  }
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
  std::string out = "n,logZ_per_node,std_err\n";
  for (const auto& p : points) {
    out += std::to_string(p.n) + ',' + format_double(p.log_Z_per_node) + ',' + format_double(p.std_err) + '\n';
  }
  return out;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RecursionReport& r) {
  nlohmann::json j;
  j["delta"] = r.delta;
  j["depth_reached"] = r.depth_reached;
  j["converged"] = r.converged;
  j["stalled"] = r.stalled;
  j["gap_sup"] = r.gap_sup;
  j["C_gap"] = r.C_gap;
  j["parity_step"] = r.parity_step;
  j["C_o"] = r.C_o;
  j["C_e"] = r.C_e;
  j["theta_o"] = optional_number(r.theta_o);
  j["theta_e"] = optional_number(r.theta_e);
  j["log_Z"] = optional_number(r.log_Z);
  j["log_Z_per_node"] = r.log_Z_per_node;
  j["monotonicity_violations"] = r.monotonicity_violations;
  j["ratios"] = r.ratios;
  auto& trace = j["gap_trace"] = nlohmann::json::array();
  for (auto [depth, gap] : r.gap_trace) trace.push_back({depth, gap});
  return j;
}

nlohmann::json to_json(const ShootingResult& s) {
  nlohmann::json j;
  j["delta"] = s.delta;
  j["C_star"] = s.C_star;
  j["tau_star"] = s.tau_star;
  j["bisection_iters"] = s.bisection_iters;
  j["delta_cut"] = s.delta_cut;
  j["tau_tenth_cut"] = s.tau_tenth_cut;
  auto& trace = j["tau_trace"] = nlohmann::json::array();
  for (auto [C, tau] : s.tau_trace) trace.push_back({C, tau});
  return j;
}

nlohmann::json to_json(const HamiltonianProfile& h) {
  nlohmann::json j;
  j["delta"] = h.delta;
  j["lambda"] = h.lambda;
  j["eps"] = h.eps;
  j["theta_o"] = h.theta_o;
  j["theta_e"] = h.theta_e;
  j["max_spread"] = h.max_spread();
  j["R_left"] = h.R_left;
  j["R_right"] = h.R_right;
  j["target_left"] = h.target_left;
  j["target_right"] = h.target_right;
  auto& iv = j["intervals"] = nlohmann::json::array();
  for (const auto& i : h.intervals) {
    iv.push_back({{"a", i.a}, {"b", i.b}, {"samples", i.samples}, {"mean", i.mean}, {"spread", i.spread}});
  }
  return j;
}

nlohmann::json to_json(const VolumeRecord& r) {
  const auto& e = r.estimate;
  nlohmann::json j;
  j["graph"] = r.graph;
  j["n_nodes"] = r.n_nodes;
  j["lambda"] = r.lambda;
  j["measure"] = r.measure;
  j["method"] = to_string(e.method);
  j["log_Z"] = e.log_Z;
  j["std_err"] = e.std_err;
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  if (e.refined_log_Z) j["refined_log_Z"] = *e.refined_log_Z;
  if (e.extrapolated_log_Z) j["extrapolated_log_Z"] = *e.extrapolated_log_Z;
  return j;
}

void atomic_write(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

}  // namespace hardcore
