#include "morley/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "morley/element.hpp"
#include "morley/parallel.hpp"

namespace morley {

namespace {

// Sum of per-cell contributions, accumulated in cell order so the result does
// not depend on the number of workers.
template <class Fn>
double sum_over_cells(const TensorMesh& mesh, Fn&& per_cell) {
  const std::size_t n = mesh.num_cells();
  std::vector<double> parts(n);
  const int chunks = static_cast<int>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 64)));
  parallel_chunks(n, chunks, [&](int, std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) parts[c] = per_cell(c);
  });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum;
}

// Values and physical gradients of a local expansion at the tabulation points.
struct CellSamples {
  Eigen::VectorXd values;
  std::vector<Eigen::VectorXd> gradients;
};

CellSamples sample(const Tabulation& tab, const MorleyElement& el, const Cell& cell, const Eigen::VectorXd& coef) {
  Eigen::VectorXd scaled = coef;
  for (int r = 0; r < el.num_dofs(); ++r) scaled[r] *= el.scale(cell, r);
  CellSamples s;
  s.values = tab.values * scaled;
  for (int j = 0; j < el.dim(); ++j) s.gradients.push_back(tab.gradients[j] * scaled / cell.half_lengths[j]);
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

constexpr const char* kCsvHeader = "level,h,ndof,err_l2,err_h1,rate_l2,rate_h1,lb_ratio";

}  // namespace

double l2_error(const FeFunction& v, const SmoothField& exact, int quad_points_per_axis) {
  const auto& mesh = v.space().mesh;
  const int d = mesh.dim();
  const auto& el = element_for(d);
  const auto& tab = el.tabulation(quad_points_per_axis);
  const double sq = sum_over_cells(mesh, [&](std::size_t c) {
    const Cell cell = mesh.cell(c);
    const auto s = sample(tab, el, cell, v.local_coefficients(c));
    std::vector<double> x(d);
    double sum = 0.0;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      cell.to_physical(tab.rule.point(q), x);
      const double e = exact.value(x) - s.values[q];
      sum += tab.rule.weight(q) * e * e;
    }
    return sum * cell.volume() / std::ldexp(1.0, d);
  });
  return std::sqrt(sq);
}

double broken_h1_error(const FeFunction& v, const SmoothField& exact, int quad_points_per_axis) {
  const auto& mesh = v.space().mesh;
  const int d = mesh.dim();
  const auto& el = element_for(d);
  const auto& tab = el.tabulation(quad_points_per_axis);
  const double sq = sum_over_cells(mesh, [&](std::size_t c) {
    const Cell cell = mesh.cell(c);
    const auto s = sample(tab, el, cell, v.local_coefficients(c));
    std::vector<double> x(d), g(d);
    double sum = 0.0;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      cell.to_physical(tab.rule.point(q), x);
      exact.gradient(x, g);
      double e2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double e = g[j] - s.gradients[j][q];
        e2 += e * e;
      }
      sum += tab.rule.weight(q) * e2;
    }
    return sum * cell.volume() / std::ldexp(1.0, d);
  });
  return std::sqrt(sq);
}

double broken_h1_seminorm(const FeFunction& v) {
  const auto& mesh = v.space().mesh;
  const double sq = sum_over_cells(mesh, [&](std::size_t c) {
    const Eigen::VectorXd coef = v.local_coefficients(c);
    return coef.dot(local_stiffness(mesh.cell(c)) * coef);
  });
  return std::sqrt(std::max(0.0, sq));
}

DiscreteSolution solve_problem(const TensorMesh& mesh, const ManufacturedProblem& problem,
                               const SolveOptions& options) {
  if (!problem.homogeneous)
    throw std::invalid_argument("problem '" + problem.name + "' has nonzero boundary values");
  auto space = make_space(mesh);
  const auto system = apply_dirichlet(assemble(*space, problem.f, options.quad_points), space->dofs);
  auto result = cg_solve(system, options.tol, options.max_iter);
  DiscreteSolution out{FeFunction(space, system.expand(result.solution)), result.report,
                       system.free_dofs.size()};
  return out;
}

std::optional<double> pairwise_rate(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1) return std::nullopt;
  return std::log(e0 / e1) / std::log(h0 / h1);
}

RateEstimate estimate_rate(std::span<const double> errors, std::span<const double> hs, int m) {
  if (errors.size() != hs.size()) throw std::invalid_argument("errors and mesh sizes differ in length");
  RateEstimate est;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    est.pairwise.push_back(pairwise_rate(errors[k], errors[k + 1], hs[k], hs[k + 1]));

  const std::size_t n = errors.size();
  const std::size_t first = n > static_cast<std::size_t>(std::max(m, 2)) ? n - std::max(m, 2) : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = first; k < n; ++k) {
    if (!(errors[k] > 0.0) || !(hs[k] > 0.0)) return est;
    const double x = std::log(hs[k]), y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (count >= 2 && denom > 0.0) est.slope = (count * sxy - sx * sy) / denom;
  return est;
}

std::vector<ConvergenceRecord> run_study(const ManufacturedProblem& problem, const MeshSpec& base, int levels,
                                         const SolveOptions& options) {
  if (levels < 2) throw std::invalid_argument("a study needs at least two levels");
  std::vector<ConvergenceRecord> records;
  for (int k = 0; k < levels; ++k) {
    const TensorMesh mesh = base.refined(k).build();
    const auto sol = solve_problem(mesh, problem, options);
    ConvergenceRecord rec;
    rec.level = k;
    rec.h = mesh_size(mesh);
    rec.ndof = sol.ndof;
    rec.err_l2 = l2_error(sol.uh, problem.u, options.quad_points);
    rec.err_h1 = broken_h1_error(sol.uh, problem.u, options.quad_points);
    rec.lb_ratio = rec.err_l2 / (rec.h * rec.h);
    rec.converged = sol.report.converged;
    rec.iterations = sol.report.iterations;
    if (!records.empty()) {
      const auto& prev = records.back();
      rec.rate_l2 = pairwise_rate(prev.err_l2, rec.err_l2, prev.h, rec.h);
      rec.rate_h1 = pairwise_rate(prev.err_h1, rec.err_h1, prev.h, rec.h);
    }
    records.push_back(rec);
  }
  return records;
}

double superclose_pairing(const std::shared_ptr<const FeSpace>& space, const SmoothField& u,
                          int quad_points_per_axis) {
  const FeFunction pu = global_interpolate(space, u);
  const auto& mesh = space->mesh;
  const int d = mesh.dim();
  const auto& el = element_for(d);
  const auto& tab = el.tabulation(quad_points_per_axis);
  return sum_over_cells(mesh, [&](std::size_t c) {
    const Cell cell = mesh.cell(c);
    const auto s = sample(tab, el, cell, pu.local_coefficients(c));
    std::vector<double> x(d), g(d);
    double sum = 0.0;
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      cell.to_physical(tab.rule.point(q), x);
      u.gradient(x, g);
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += (g[j] - s.gradients[j][q]) * s.gradients[j][q];
      sum += tab.rule.weight(q) * dot;
    }
    return sum * cell.volume() / std::ldexp(1.0, d);
  });
}

void write_csv(std::ostream& out, std::span<const ConvergenceRecord> records) {
  out << kCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out << r.level << ',' << format_double(r.h) << ',' << r.ndof << ',' << format_double(r.err_l2) << ','
        << format_double(r.err_h1) << ',' << opt(r.rate_l2) << ',' << opt(r.rate_h1) << ','
        << format_double(r.lb_ratio) << '\n';
  }
}

std::vector<ConvergenceRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("missing or unexpected CSV header");
  std::vector<ConvergenceRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw std::invalid_argument("CSV row needs 8 fields: " + line);
    auto opt = [](const std::string& s) { return s.empty() ? std::optional<double>() : std::stod(s); };
    ConvergenceRecord r;
    r.level = std::stoi(f[0]);
    r.h = std::stod(f[1]);
    r.ndof = std::stoull(f[2]);
    r.err_l2 = std::stod(f[3]);
    r.err_h1 = std::stod(f[4]);
    r.rate_l2 = opt(f[5]);
    r.rate_h1 = opt(f[6]);
    r.lb_ratio = std::stod(f[7]);
    out.push_back(r);
  }
  return out;
}

nlohmann::json to_json(const ConvergenceRecord& r) {
  nlohmann::json j;
  j["level"] = r.level;
  j["h"] = r.h;
  j["ndof"] = r.ndof;
  j["err_l2"] = r.err_l2;
  j["err_h1"] = r.err_h1;
  j["rate_l2"] = r.rate_l2 ? nlohmann::json(*r.rate_l2) : nlohmann::json(nullptr);
  j["rate_h1"] = r.rate_h1 ? nlohmann::json(*r.rate_h1) : nlohmann::json(nullptr);
  j["lb_ratio"] = r.lb_ratio;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  return j;
}

}  // namespace morley
