#include "morley/lemma_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "morley/element.hpp"
#include "morley/linear_solver.hpp"
#include "morley/quadrature.hpp"

namespace morley {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, int dim, int salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(dim), static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

LemmaReport make_report(std::string lemma, int dim, int trials, std::uint64_t seed, double tol, double residual) {
  return {std::move(lemma), dim, trials, seed, tol, residual, residual <= tol};
}

// Integral of g over the face xi_axis = side of the cell, and of |g|.
template <class G>
std::pair<double, double> face_integral(const Cell& cell, int axis, int side, G&& g) {
  const int d = cell.dim();
  const QuadratureRule rule(d - 1, 4);
  double area = 1.0;
  for (int j = 0; j < d; ++j)
    if (j != axis) area *= cell.half_lengths[j];
  std::vector<double> xi(d), x(d);
  double sum = 0.0, abs_sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    auto eta = rule.point(q);
    for (int j = 0, c = 0; j < d; ++j) xi[j] = j == axis ? side : eta[c++];
    cell.to_physical(xi, x);
    const double v = g(std::span<const double>(x)) * rule.weight(q);
    sum += v;
    abs_sum += std::abs(v);
  }
  return {sum * area, abs_sum * area};
}

// int_{dK} g n_axis ds = int_{xi_axis=+1} g - int_{xi_axis=-1} g.
template <class G>
std::pair<double, double> normal_moment(const Cell& cell, int axis, G&& g) {
  auto [p, pa] = face_integral(cell, axis, 1, g);
  auto [m, ma] = face_integral(cell, axis, -1, g);
  return {p - m, pa + ma};
}

SmoothField local_field(const Cell& cell, Eigen::VectorXd coef) {
  SmoothField f;
  f.dim = cell.dim();
  f.value = [cell, coef](std::span<const double> x) { return eval_local(cell, coef, x, {}); };
  f.gradient = [cell, coef](std::span<const double> x, std::span<double> out) {
    std::vector<int> alpha(cell.dim(), 0);
    for (int j = 0; j < cell.dim(); ++j) {
      alpha[j] = 1;
      out[j] = eval_local(cell, coef, x, alpha);
      alpha[j] = 0;
    }
  };
  return f;
}

// Columns spanning the range of an SPSD matrix, scaled so that P^T A P = I.
Eigen::MatrixXd inverse_sqrt_on_range(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const auto& lam = eig.eigenvalues();
  const double cutoff = 1e-10 * lam.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (lam[k] > cutoff) keep.push_back(k);
  Eigen::MatrixXd p(a.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    p.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) / std::sqrt(lam[keep[c]]);
  return p;
}

}  // namespace

nlohmann::json to_json(const LemmaReport& r) {
  return {{"lemma", r.lemma},         {"dim", r.dim},
          {"trials", r.trials},       {"seed", r.seed},
          {"tolerance", r.tolerance}, {"max_residual", r.max_residual},
          {"pass", r.pass}};
}

Cell random_cell(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-1.0, 1.0), half(0.2, 1.5);
  Cell c;
  for (int j = 0; j < dim; ++j) {
    c.center.push_back(center(rng));
    c.half_lengths.push_back(half(rng));
  }
  return c;
}

LemmaReport check_unisolvence(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 1);
  const auto& el = element_for(dim);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Cell cell = random_cell(dim, rng);
    for (int s = 0; s < el.num_dofs(); ++s) {
      const auto dofs = dof_functionals(cell, local_field(cell, Eigen::VectorXd::Unit(el.num_dofs(), s)));
      for (int r = 0; r < el.num_dofs(); ++r) worst = std::max(worst, std::abs(dofs[r] - (r == s ? 1.0 : 0.0)));
    }
  }
  return make_report("unisolvence", dim, trials, seed, 1e-12, worst);
}

LemmaReport check_vertex_orthogonality(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 2);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& el = element_for(dim);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Cell cell = random_cell(dim, rng);
    const Polynomial p1 = random_linear(dim, rng);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(el.num_dofs());
    std::vector<double> vertex_values(el.num_vertices());
    for (int i = 0; i < el.num_vertices(); ++i) vertex_values[i] = a[i] = coef(rng);
    const Q1Interpolant q1(cell, vertex_values);
    for (int i = 0; i < dim; ++i) {
      auto [m, scale] = normal_moment(cell, i, [&](std::span<const double> x) {
        return p1(x) * (eval_local(cell, a, x, {}) - q1(x));
      });
      (void)scale;
      worst = std::max(worst, std::abs(m));
    }
  }
  return make_report("vertex_boundary_orthogonality", dim, trials, seed, 1e-12, worst);
}

LemmaReport check_face_orthogonality(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& el = element_for(dim);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Cell cell = random_cell(dim, rng);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(el.num_dofs());
    for (int f = 0; f < el.num_faces(); ++f) b[el.num_vertices() + f] = coef(rng);
    for (int i = 0; i < dim; ++i) {
      auto [m, scale] = normal_moment(cell, i, [&](std::span<const double> x) { return eval_local(cell, b, x, {}); });
      (void)scale;
      worst = std::max(worst, std::abs(m));
    }
  }
  return make_report("face_boundary_orthogonality", dim, trials, seed, 1e-12, worst);
}

Cell PatchSpec::left() const {
  Cell c{face_center, half_lengths};
  c.half_lengths[axis] = h_left;
  c.center[axis] = face_center[axis] - h_left;
  return c;
}

Cell PatchSpec::right() const {
  Cell c{face_center, half_lengths};
  c.half_lengths[axis] = h_right;
  c.center[axis] = face_center[axis] + h_right;
  return c;
}

PatchResidual patch_residual(const PatchSpec& patch, const Polynomial& p1) {
  const int d = static_cast<int>(patch.face_center.size());
  if (static_cast<int>(patch.half_lengths.size()) != d || patch.axis < 0 || patch.axis >= d)
    throw std::invalid_argument("inconsistent patch description");
  if (!(patch.h_left > 0.0) || !(patch.h_right > 0.0)) throw std::invalid_argument("patch cells must be nondegenerate");
  const auto& el = element_for(d);
  const Cell left = patch.left(), right = patch.right();
  // Unit global DOF: the left cell sees its upper face (+), the right cell its lower face (-).
  Eigen::VectorXd psi_l = Eigen::VectorXd::Zero(el.num_dofs());
  Eigen::VectorXd psi_r = Eigen::VectorXd::Zero(el.num_dofs());
  psi_l[el.num_vertices() + 2 * patch.axis] = 1.0;
  psi_r[el.num_vertices() + 2 * patch.axis + 1] = -1.0;

  PatchResidual out;
  for (int i = 0; i < d; ++i) {
    double total = 0.0;
    for (const auto& [cell, psi] : {std::pair{&left, &psi_l}, std::pair{&right, &psi_r}}) {
      auto [m, scale] = normal_moment(*cell, i, [&](std::span<const double> x) {
        return p1(x) * eval_local(*cell, *psi, x, {});
      });
      total += m;
      out.scale += scale;
    }
    out.residual = std::max(out.residual, std::abs(total));
  }
  return out;
}

LemmaReport check_patch_orthogonality(const PatchSpec& patch, int trials, std::uint64_t seed) {
  const int d = static_cast<int>(patch.face_center.size());
  auto rng = make_rng(seed, d, 4);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) worst = std::max(worst, patch_residual(patch, random_linear(d, rng)).residual);
  return make_report("uniform_patch_orthogonality", d, trials, seed, 1e-12, worst);
}

ThetaValues compute_theta(const Cell& cell) {
  const auto& el = element_for(cell.dim());
  const int nv = el.num_vertices(), nf = el.num_faces();
  const Eigen::MatrixXd a = local_stiffness(cell);
  ThetaValues theta;
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j)
      if (i != j) {
        const int r = nv + i, s = nv + j;
        theta.pairwise = std::max(theta.pairwise, std::abs(a(r, s)) / (a(r, r) + a(s, s)));
      }
  // sup |b(phi,psi)| / (|phi|^2 + |psi|^2) = (1/2) * largest cosine between the
  // two gradient spaces, the top singular value of the whitened coupling block.
  const Eigen::MatrixXd px = inverse_sqrt_on_range(a.topLeftCorner(nv, nv));
  const Eigen::MatrixXd pf = inverse_sqrt_on_range(a.bottomRightCorner(nf, nf));
  const Eigen::MatrixXd coupling = px.transpose() * a.topRightCorner(nv, nf) * pf;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(coupling);
  theta.cross = 0.5 * svd.singularValues()(0);
  return theta;
}

LemmaReport check_theta_pairwise(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 5);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) worst = std::max(worst, std::abs(compute_theta(random_cell(dim, rng)).pairwise - 0.125));
  return make_report("theta_pairwise", dim, trials, seed, 1e-12, worst);
}

LemmaReport check_theta_cross(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 6);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) worst = std::max(worst, compute_theta(random_cell(dim, rng)).cross);
  // Strict bound: theta < 1/2.
  return make_report("theta_cross", dim, trials, seed, std::nextafter(0.5, 0.0), worst);
}

LemmaReport check_expansion(int dim, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, dim, 7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& el = element_for(dim);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Cell cell = random_cell(dim, rng);
    const Polynomial u = random_polynomial(dim, 3, rng);
    Eigen::VectorXd v(el.num_dofs());
    for (auto& c : v) c = coef(rng);
    worst = std::max(worst, expansion_residual(cell, u, v).relative());
  }
  return make_report("expansion_identity", dim, trials, seed, 1e-10, worst);
}

LemmaReport check_stable_decomposition(const std::shared_ptr<const FeSpace>& space, int trials, std::uint64_t seed) {
  const auto& mesh = space->mesh;
  const auto& el = element_for(mesh.dim());
  const int nv = el.num_vertices();
  std::vector<Eigen::MatrixXd> stiffness;
  std::vector<double> theta;
  double theta_max = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell cell = mesh.cell(c);
    stiffness.push_back(local_stiffness(cell));
    const auto th = compute_theta(cell);
    theta.push_back(std::max(th.pairwise, th.cross));
    theta_max = std::max(theta_max, theta.back());
  }

  auto rng = make_rng(seed, mesh.dim(), 8);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> g(space->dofs.size());
    for (auto& x : g) x = coef(rng);
    const FeFunction v(space, std::move(g));
    double full = 0.0, split = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::VectorXd lv = v.local_coefficients(c);
      Eigen::VectorXd vx = lv, vf = lv;
      vx.tail(vf.size() - nv).setZero();
      vf.head(nv).setZero();
      const auto& a = stiffness[c];
      const double e = lv.dot(a * lv), ex = vx.dot(a * vx), ef = vf.dot(a * vf);
      worst = std::max(worst, -(e - (1.0 - 2.0 * theta[c]) * (ex + ef)));
      full += e;
      split += ex + ef;
    }
    worst = std::max(worst, -(full - (1.0 - 2.0 * theta_max) * split));
  }
  return make_report("stable_decomposition", mesh.dim(), trials, seed, 1e-12, std::max(0.0, worst));
}

LemmaReport check_conformity(const std::shared_ptr<const FeSpace>& space, int trials, std::uint64_t seed) {
  const auto& mesh = space->mesh;
  auto rng = make_rng(seed, mesh.dim(), 9);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto field = random_polynomial(mesh.dim(), 3, rng).to_field();
    const FeFunction pu = global_interpolate(space, field);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::VectorXd local = local_interpolate(mesh.cell(c), field);
      const double scale = std::max(1.0, local.cwiseAbs().maxCoeff());
      worst = std::max(worst, (pu.local_coefficients(c) - local).cwiseAbs().maxCoeff() / scale);
    }
  }
  return make_report("conformity", mesh.dim(), trials, seed, 1e-12, worst);
}

ConsistencyProbe consistency_probe(const std::shared_ptr<const FeSpace>& space, const ManufacturedProblem& problem,
                                   int quad_points_per_axis) {
  const auto& mesh = space->mesh;
  const auto& dofs = space->dofs;
  const int d = mesh.dim();
  const auto& el = element_for(d);
  const auto& tab = el.tabulation(quad_points_per_axis);
  const int nloc = el.num_dofs();

  // R(phi_g) = sum_K int_K grad u . grad phi_g - f phi_g, accumulated in cell order.
  std::vector<double> residual(dofs.size(), 0.0);
  std::vector<double> x(d), grad(d);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell cell = mesh.cell(c);
    const double jac = cell.volume() / std::ldexp(1.0, d);
    Eigen::VectorXd w_grad = Eigen::VectorXd::Zero(nloc);
    Eigen::VectorXd local = Eigen::VectorXd::Zero(nloc);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      cell.to_physical(tab.rule.point(q), x);
      problem.u.gradient(x, grad);
      const double wq = tab.rule.weight(q) * jac;
      const double fq = problem.f.value(x);
      for (int r = 0; r < nloc; ++r) {
        double dot = 0.0;
        for (int j = 0; j < d; ++j) dot += grad[j] * tab.gradients[j](q, r) / cell.half_lengths[j];
        local[r] += wq * (dot - fq * tab.values(q, r));
      }
    }
    const auto map = dofs.cell_dofs(c);
    for (int r = 0; r < nloc; ++r) residual[map[r].index] += map[r].sign * el.scale(cell, r) * local[r];
  }

  SmoothField zero;
  zero.dim = d;
  zero.value = [](std::span<const double>) { return 0.0; };
  const auto sys = apply_dirichlet(assemble(*space, zero, 1), dofs);

  std::vector<std::size_t> xs, fs;
  for (std::size_t k = 0; k < sys.free_dofs.size(); ++k) (dofs.is_face_dof(sys.free_dofs[k]) ? fs : xs).push_back(k);

  ConsistencyProbe probe;
  auto block = [&](const std::vector<std::size_t>& keep, double& per_basis, double& dual) {
    if (keep.empty()) return;
    const CsrMatrix a = sys.matrix.submatrix(keep);
    const auto diag = a.diagonal();
    std::vector<double> r(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      r[k] = residual[sys.free_dofs[keep[k]]];
      per_basis = std::max(per_basis, std::abs(r[k]) / std::sqrt(diag[k]));
    }
    CgOptions opts;
    opts.tol = 1e-13;
    const auto sol = cg_solve(a, r, opts);
    double s = 0.0;
    for (std::size_t k = 0; k < keep.size(); ++k) s += r[k] * sol.solution[k];
    dual = std::sqrt(std::max(0.0, s));
  };
  block(xs, probe.max_X, probe.dual_X);
  block(fs, probe.max_F, probe.dual_F);
  return probe;
}

std::vector<LemmaReport> run_verification(const VerifyOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be positive");
  std::vector<LemmaReport> reports;
  for (int d : options.dims) {
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    const int n = d == 2 ? 4 : (d == 3 ? 3 : 2);
    const auto box = unit_box(d);
    const std::vector<int> counts(d, n);

    reports.push_back(check_unisolvence(d, options.trials, options.seed));
    reports.push_back(check_vertex_orthogonality(d, options.trials, options.seed));
    reports.push_back(check_face_orthogonality(d, options.trials, options.seed));
    PatchSpec patch{std::vector<double>(d, 0.5), std::vector<double>(d, 0.25), 0, 0.25, 0.25};
    reports.push_back(check_patch_orthogonality(patch, options.trials, options.seed));
    reports.push_back(check_theta_pairwise(d, options.trials, options.seed));
    reports.push_back(check_theta_cross(d, options.trials, options.seed));
    reports.push_back(check_expansion(d, options.trials, options.seed));
    reports.push_back(check_stable_decomposition(make_space(build_uniform(box, counts)), options.trials, options.seed));

    auto mesh = build_jittered(box, counts, 0.2, options.seed);
    auto dofs = build_dof_map(mesh);
    if (options.flip_face_signs) dofs = dofs.with_flipped_face_signs();
    // A handful of random cubics exposes any orientation error.
    reports.push_back(check_conformity(make_space(std::move(mesh), std::move(dofs)), std::min(options.trials, 5),
                                       options.seed));
  }
  return reports;
}

}  // namespace morley
