#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "morley/element.hpp"
#include "morley/error_analysis.hpp"
#include "morley/fe_space.hpp"
#include "morley/problems.hpp"

using namespace morley;

namespace {

Eigen::MatrixXd dense(const CsrMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) m(i, a.col_idx()[k]) = a.values()[k];
  return m;
}

SmoothField zero_field() {
  SmoothField z;
  z.value = [](std::span<const double>) { return 0.0; };
  return z;
}

// Mean over a face of d v/d x_axis evaluated inside `cell`, by 4-point Gauss.
double face_mean_derivative(const FeFunction& v, std::size_t cell, const FaceId& face) {
  const auto& mesh = v.space().mesh;
  const Cell k = mesh.cell(cell);
  const int d = mesh.dim();
  const QuadratureRule rule(d - 1, 4);
  const double plane = mesh.partition(face.axis).breakpoints()[face.layer];
  std::vector<double> x(d);
  std::vector<int> alpha(d, 0);
  alpha[face.axis] = 1;
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    auto eta = rule.point(q);
    for (int j = 0, c = 0; j < d; ++j) x[j] = j == face.axis ? plane : k.center[j] + k.half_lengths[j] * eta[c++];
    sum += rule.weight(q) * eval_local(k, v.local_coefficients(cell), x, alpha);
  }
  return sum / std::ldexp(1.0, d - 1);
}

}  // namespace

TEST_CASE("DOF counts") {
  auto s = make_space(build_uniform(unit_box(2), std::vector<int>{2, 2}));
  CHECK(s->dofs.num_vertex_dofs() == 9);
  CHECK(s->dofs.num_face_dofs() == 12);
  CHECK(s->dofs.size() == 21);
  CHECK(s->dofs.boundary_vertex_dofs().size() == 8);
  CHECK(make_space(build_uniform(unit_box(3), std::vector<int>{1, 1, 1}))->dofs.size() == 14);

  const auto m = build_uniform(unit_box(3), std::vector<int>{2, 3, 4});
  const auto dm = build_dof_map(m);
  CHECK(dm.num_vertex_dofs() == 3 * 4 * 5);
  CHECK(dm.num_face_dofs() == 3 * 3 * 4 + 2 * 4 * 4 + 2 * 3 * 5);
}

TEST_CASE("face DOF sharing and signs") {
  const auto m = build_pattern(unit_box(3), {{1, 4}, {2, 1}, {1}}, 2);
  const auto dm = build_dof_map(m);
  const auto& el = element_for(3);
  std::vector<int> plus(dm.size(), 0), minus(dm.size(), 0);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto map = dm.cell_dofs(c);
    for (int r = 0; r < el.num_vertices(); ++r) CHECK(map[r].sign == 1);
    for (int f = 0; f < el.num_faces(); ++f) {
      const auto e = map[el.num_vertices() + f];
      CHECK(e.sign == MorleyElement::face_side(f));
      (e.sign > 0 ? plus : minus)[e.index]++;
    }
  }
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const auto g = dm.face_dof(f);
    if (m.is_boundary(m.face_id(f))) CHECK(plus[g] + minus[g] == 1);
    else CHECK((plus[g] == 1 && minus[g] == 1));
  }
}

TEST_CASE("assembly against a dense per-cell quadrature oracle") {
  const auto mesh = build_divisionally_uniform(unit_box(2), {{0.3}, {0.6}}, {{1, 1}, {1, 1}});
  auto s = make_space(mesh);
  const auto f = make_problem("sinsin", 2).f;
  const auto sys = assemble(*s, f);
  CHECK(sys.matrix.size() == 21);
  CHECK(sys.matrix.asymmetry() < 1e-13);

  // Oracle: basis values and gradients through eval_basis, 6-point rule.
  const auto& el = element_for(2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(21, 21);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(21);
  const QuadratureRule rule(2, 6);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell k = mesh.cell(c);
    const auto map = s->dofs.cell_dofs(c);
    std::vector<double> x(2);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      k.to_physical(rule.point(q), x);
      const double w = rule.weight(q) * k.volume() / 4.0;
      for (int r = 0; r < el.num_dofs(); ++r) {
        const double vr = eval_basis(k, el.basis_index(r), x, {});
        const double gr0 = eval_basis(k, el.basis_index(r), x, std::vector<int>{1, 0});
        const double gr1 = eval_basis(k, el.basis_index(r), x, std::vector<int>{0, 1});
        b[map[r].index] += map[r].sign * w * f.value(x) * vr;
        for (int t = 0; t < el.num_dofs(); ++t) {
          const double gt0 = eval_basis(k, el.basis_index(t), x, std::vector<int>{1, 0});
          const double gt1 = eval_basis(k, el.basis_index(t), x, std::vector<int>{0, 1});
          a(map[r].index, map[t].index) += map[r].sign * map[t].sign * w * (gr0 * gt0 + gr1 * gt1);
        }
      }
    }
  }
  CHECK((dense(sys.matrix) - a).cwiseAbs().maxCoeff() < 1e-12);
  // Load quadrature differs (5 vs 6 points); the difference is quadrature error only.
  CHECK((Eigen::Map<const Eigen::VectorXd>(sys.rhs.data(), 21) - b).cwiseAbs().maxCoeff() < 1e-6);

  std::vector<double> one(21, 0.0);
  for (int v = 0; v < 9; ++v) one[v] = 1.0;
  for (double r : sys.matrix * one) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("Dirichlet elimination keeps every face DOF") {
  auto s = make_space(build_uniform(unit_box(2), std::vector<int>{2, 2}));
  const auto sys = apply_dirichlet(assemble(*s, zero_field()), s->dofs);
  CHECK(sys.free_dofs.size() == 13);
  for (std::size_t g = s->dofs.num_vertex_dofs(); g < s->dofs.size(); ++g)
    CHECK(std::find(sys.free_dofs.begin(), sys.free_dofs.end(), g) != sys.free_dofs.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(sys.matrix));
  CHECK(eig.eigenvalues()[0] > 1e-3);
}

TEST_CASE("constants are the only kernel of the unconstrained operator") {
  auto s = make_space(build_pattern(unit_box(2), {{1, 3}, {2, 1}}, 2));
  const auto full = assemble(*s, zero_field());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(full.matrix));
  CHECK(std::abs(eig.eigenvalues()[0]) < 1e-10);
  CHECK(eig.eigenvalues()[1] > 1e-6);
  // Pinning one vertex removes it.
  std::vector<std::size_t> keep;
  for (std::size_t g = 1; g < s->dofs.size(); ++g) keep.push_back(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pinned(dense(full.matrix.submatrix(keep)));
  CHECK(pinned.eigenvalues()[0] > 1e-6);
}

TEST_CASE("solution vanishes at boundary vertices") {
  const auto mesh = build_uniform(unit_box(2), std::vector<int>{4, 4});
  const auto sol = solve_problem(mesh, make_problem("sinsin", 2));
  CHECK(sol.report.converged);
  const auto dofs = build_dof_map(mesh);
  for (auto g : dofs.boundary_vertex_dofs()) CHECK(sol.uh.coefficients()[g] == 0.0);
}

TEST_CASE("global interpolation") {
  SmoothField lin;
  lin.value = [](std::span<const double> x) { return x[0] + x[1]; };
  lin.gradient = [](std::span<const double>, std::span<double> g) { g[0] = g[1] = 1.0; };
  auto s = make_space(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 2));
  const auto pl = global_interpolate(s, lin);
  CHECK(broken_h1_error(pl, lin) < 1e-13);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x{u(rng), u(rng)};
    CHECK(evaluate(pl, x) == doctest::Approx(x[0] + x[1]).epsilon(1e-13));
  }

  // Restriction to each cell equals the local interpolant, signs included.
  const auto field = make_problem("sinsin", 2).u;
  const auto pu = global_interpolate(s, field);
  for (std::size_t c = 0; c < s->mesh.num_cells(); ++c)
    CHECK((pu.local_coefficients(c) - local_interpolate(s->mesh.cell(c), field)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("interpolation error decays at second order in the broken H1 seminorm") {
  const auto field = make_problem("sinsin", 2).u;
  std::vector<double> err, hs;
  for (int n : {4, 8, 16, 32}) {
    const auto mesh = build_uniform(unit_box(2), std::vector<int>{n, n});
    err.push_back(broken_h1_error(global_interpolate(make_space(mesh), field), field));
    hs.push_back(mesh_size(mesh));
  }
  const auto rates = estimate_rate(err, hs);
  CHECK(*rates.pairwise.back() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("continuity across shared vertices and faces") {
  const auto mesh = build_jittered(unit_box(3), std::vector<int>{3, 2, 3}, 0.25, 4);
  auto s = make_space(mesh);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> coef(s->dofs.size());
  for (auto& c : coef) c = u(rng);
  const FeFunction v(s, coef);

  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto id = mesh.face_id(f);
    const auto adj = mesh.adjacent_cells(id);
    const double left = face_mean_derivative(v, adj[0], id);
    CHECK(left == doctest::Approx(coef[s->dofs.face_dof(f)]).epsilon(1e-12));
    if (adj.size() == 2) CHECK(face_mean_derivative(v, adj[1], id) == doctest::Approx(left).epsilon(1e-12));
  }
  // A vertex seen from every cell around it.
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Cell k = mesh.cell(c);
    const auto map = s->dofs.cell_dofs(c);
    for (int i = 0; i < 8; ++i) {
      std::vector<double> xi(3), x(3);
      for (int j = 0; j < 3; ++j) xi[j] = (i >> j) & 1 ? 1.0 : -1.0;
      k.to_physical(xi, x);
      CHECK(eval_local(k, v.local_coefficients(c), x, {}) == doctest::Approx(coef[map[i].index]).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate and point location") {
  const auto mesh = build_uniform(unit_box(2), std::vector<int>{2, 2});
  CHECK(locate_cell(mesh, std::vector<double>{0.5, 0.5}) == 0);
  CHECK(locate_cell(mesh, std::vector<double>{0.75, 0.5}) == 1);
  CHECK(locate_cell(mesh, std::vector<double>{1.0, 1.0}) == 3);
  CHECK_THROWS_AS(locate_cell(mesh, std::vector<double>{1.1, 0.5}), std::out_of_range);
  auto v = FeFunction::zero(make_space(mesh));
  CHECK_THROWS_AS(evaluate(v, std::vector<double>{-0.2, 0.5}), std::out_of_range);
}

TEST_CASE("decomposition is a direct sum") {
  auto s = make_space(build_uniform(unit_box(2), std::vector<int>{3, 3}));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> coef(s->dofs.size());
  for (auto& c : coef) c = u(rng);
  const FeFunction v(s, coef);
  const auto dec = decompose(v);
  std::vector<double> sum(dec.vertex_part.coefficients().begin(), dec.vertex_part.coefficients().end());
  for (std::size_t f = 0; f < s->dofs.num_face_dofs(); ++f) {
    const auto part = dec.face_component(f);
    for (std::size_t g = 0; g < sum.size(); ++g) sum[g] += part.coefficients()[g];
  }
  for (std::size_t g = 0; g < sum.size(); ++g) CHECK(sum[g] == coef[g]);

  const auto again = decompose(dec.vertex_part);
  for (double c : again.face_part.coefficients()) CHECK(c == 0.0);
  for (std::size_t g = 0; g < coef.size(); ++g) CHECK(again.vertex_part.coefficients()[g] == dec.vertex_part.coefficients()[g]);

  // Linearity.
  std::vector<double> twice(coef);
  for (auto& c : twice) c *= 2.0;
  const auto d2 = decompose(FeFunction(s, twice));
  for (std::size_t g = 0; g < coef.size(); ++g) CHECK(d2.face_part.coefficients()[g] == 2.0 * dec.face_part.coefficients()[g]);
}

TEST_CASE("FeFunction JSON round trip") {
  auto s = make_space(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 1));
  const auto pu = global_interpolate(s, make_problem("bubble", 2).u);
  const auto doc = to_json(pu);
  CHECK(doc["ordering"] == "vertex-major/axis-major-faces/v1");
  const auto back = fe_function_from_json(nlohmann::json::parse(doc.dump()));
  REQUIRE(back.coefficients().size() == pu.coefficients().size());
  for (std::size_t g = 0; g < pu.coefficients().size(); ++g) CHECK(back.coefficients()[g] == pu.coefficients()[g]);
  auto bad = doc;
  bad["ordering"] = "other";
  CHECK_THROWS(fe_function_from_json(bad));
}

TEST_CASE("assembly does not depend on the worker count") {
  auto s = make_space(build_jittered(unit_box(2), std::vector<int>{24, 24}, 0.3, 1));
  const auto f = make_problem("sinsin", 2).f;
  setenv("MORLEY_THREADS", "1", 1);
  const auto one = assemble(*s, f);
  setenv("MORLEY_THREADS", "7", 1);
  const auto many = assemble(*s, f);
  unsetenv("MORLEY_THREADS");
  CHECK(std::equal(one.rhs.begin(), one.rhs.end(), many.rhs.begin()));
  CHECK(std::equal(one.matrix.values().begin(), one.matrix.values().end(), many.matrix.values().begin()));
}
