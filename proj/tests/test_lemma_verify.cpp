#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "morley/element.hpp"
#include "morley/error_analysis.hpp"
#include "morley/lemma_verify.hpp"

using namespace morley;

TEST_CASE("single-cell checks pass") {
  for (int d : {2, 3}) {
    for (const auto& r : {check_unisolvence(d, 10), check_vertex_orthogonality(d, 20), check_face_orthogonality(d, 20),
                          check_theta_pairwise(d, 10), check_theta_cross(d, 10), check_expansion(d, 10)}) {
      INFO(r.lemma << " d=" << d << " residual " << r.max_residual);
      CHECK(r.pass);
      CHECK(r.max_residual <= r.tolerance);
    }
  }
}

TEST_CASE("uniform patch orthogonality and its hypothesis") {
  PatchSpec uniform{{0.3, -0.2}, {0.4, 0.7}, 0, 0.5, 0.5};
  CHECK(check_patch_orthogonality(uniform, 50).max_residual <= 1e-12);

  PatchSpec lopsided{{0.0, 0.0}, {1.0, 1.0}, 0, 1.0, 2.0};
  std::mt19937_64 rng(4);
  double ratio = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto pr = patch_residual(lopsided, random_linear(2, rng));
    ratio = std::max(ratio, pr.residual / pr.scale);
  }
  CHECK(ratio > 1e-3);
  CHECK_FALSE(check_patch_orthogonality(lopsided, 5).pass);

  // Constant p1: the face-class identity holds on each cell regardless.
  Polynomial c(2);
  c.add(0.7, {0, 0});
  CHECK(patch_residual(lopsided, c).residual <= 1e-12);
}

TEST_CASE("theta values") {
  std::mt19937_64 rng(6);
  for (int d : {2, 3, 4}) {
    const Cell cell = random_cell(d, rng);
    const auto th = compute_theta(cell);
    CHECK(th.pairwise == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(th.cross < 0.5);
    CHECK(th.cross > 0.0);

    // Only the two faces of one axis couple.
    const auto& el = element_for(d);
    const auto a = local_stiffness(cell);
    for (int i = 0; i < el.num_faces(); ++i)
      for (int j = 0; j < el.num_faces(); ++j)
        if (i != j && i / 2 != j / 2) CHECK(std::abs(a(el.num_vertices() + i, el.num_vertices() + j)) < 1e-14);

    // Dilation invariance.
    Cell big = cell;
    for (auto& h : big.half_lengths) h *= 2.0;
    for (auto& c : big.center) c *= 2.0;
    CHECK(compute_theta(big).cross == doctest::Approx(th.cross).epsilon(1e-12));
  }
}

TEST_CASE("theta_cross is a true supremum") {
  // Random pairs never exceed it.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Cell cell = random_cell(2, rng);
  const auto th = compute_theta(cell);
  const auto a = local_stiffness(cell);
  double best = 0.0;
  for (int t = 0; t < 2000; ++t) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(8), psi = Eigen::VectorXd::Zero(8);
    for (int r = 0; r < 4; ++r) phi[r] = u(rng);
    for (int r = 4; r < 8; ++r) psi[r] = u(rng);
    best = std::max(best, std::abs(phi.dot(a * psi)) / (phi.dot(a * phi) + psi.dot(a * psi)));
  }
  CHECK(best <= th.cross + 1e-14);
  CHECK(best > 0.5 * th.cross);
}

TEST_CASE("stable decomposition") {
  auto s2 = make_space(build_uniform(unit_box(2), std::vector<int>{4, 4}));
  auto s3 = make_space(build_uniform(unit_box(3), std::vector<int>{3, 3, 3}));
  CHECK(check_stable_decomposition(s2, 30).pass);
  CHECK(check_stable_decomposition(s3, 10).pass);
  CHECK(check_stable_decomposition(make_space(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 2)), 30).pass);

  // Purely vertex-type v: slack 2 theta |v|^2 >= 0 on every cell.
  std::vector<double> coef(s2->dofs.size(), 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t g = 0; g < s2->dofs.num_vertex_dofs(); ++g) coef[g] = u(rng);
  const FeFunction v(s2, coef);
  const auto dec = decompose(v);
  CHECK(broken_h1_seminorm(dec.face_part) == 0.0);
  CHECK(broken_h1_seminorm(dec.vertex_part) == doctest::Approx(broken_h1_seminorm(v)));
}

TEST_CASE("conformity check catches flipped face orientation") {
  const auto mesh = build_jittered(unit_box(2), std::vector<int>{3, 3}, 0.2, 2);
  CHECK(check_conformity(make_space(mesh), 3).pass);
  const auto bad = check_conformity(make_space(mesh, build_dof_map(mesh).with_flipped_face_signs()), 3);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_residual > 0.1);
}

TEST_CASE("consistency probes") {
  const auto lin = make_problem("linear", 2);
  for (const auto& mesh : {build_uniform(unit_box(2), std::vector<int>{6, 6}),
                           build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 3)}) {
    const auto p = consistency_probe(make_space(mesh), lin);
    CHECK(p.max_X <= 1e-10);
    CHECK(p.max_F <= 1e-10);
    CHECK(p.dual_X <= 1e-10);
    CHECK(p.dual_F <= 1e-10);
  }
  // The per-basis probe bounds the class dual norm from below.
  const auto u = make_problem("sinsin", 2);
  const auto p = consistency_probe(make_space(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 2)), u);
  CHECK(p.max_F <= p.dual_F * (1 + 1e-12));
  CHECK(p.max_X <= p.dual_X * (1 + 1e-12));
  CHECK(p.max_F > 0.0);
}

TEST_CASE("consistency probe is translation invariant") {
  const auto u = make_problem("sinsin", 2);
  const double shift = 0.75;
  ManufacturedProblem moved = u;
  auto back = [shift](std::span<const double> x) {
    return std::vector<double>{x[0] - shift, x[1] - shift};
  };
  moved.u.gradient = [g = u.u.gradient, back](std::span<const double> x, std::span<double> out) { g(back(x), out); };
  moved.f.value = [f = u.f.value, back](std::span<const double> x) { return f(back(x)); };
  std::vector<Interval> box{{shift, 1 + shift}, {shift, 1 + shift}};
  const auto a = consistency_probe(make_space(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 2)), u);
  const auto b = consistency_probe(make_space(build_pattern(box, {{1, 4}, {1, 4}}, 2)), moved);
  CHECK(b.max_F == doctest::Approx(a.max_F).epsilon(1e-9));
  CHECK(b.max_X == doctest::Approx(a.max_X).epsilon(1e-9));
  CHECK(b.dual_F == doctest::Approx(a.dual_F).epsilon(1e-9));
}

TEST_CASE("report JSON and full verification") {
  VerifyOptions opt;
  opt.dims = {2};
  opt.trials = 5;
  const auto reports = run_verification(opt);
  CHECK(reports.size() == 9);
  for (const auto& r : reports) {
    CHECK(r.pass);
    const auto j = to_json(r);
    for (const char* key : {"lemma", "dim", "trials", "seed", "tolerance", "max_residual", "pass"}) CHECK(j.contains(key));
  }
  opt.flip_face_signs = true;
  int failed = 0;
  for (const auto& r : run_verification(opt)) failed += r.pass ? 0 : 1;
  CHECK(failed == 1);
  opt.trials = 0;
  CHECK_THROWS_AS(run_verification(opt), std::invalid_argument);
}
