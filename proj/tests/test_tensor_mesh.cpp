#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "morley/mesh_spec.hpp"
#include "morley/tensor_mesh.hpp"

using namespace morley;

namespace {

std::vector<double> bp(const TensorMesh& m, int axis) {
  auto s = m.partition(axis).breakpoints();
  return {s.begin(), s.end()};
}

void check_close(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

}  // namespace

TEST_CASE("uniform mesh counts") {
  const auto m = build_uniform(unit_box(2), std::vector<int>{2, 2});
  CHECK(m.num_cells() == 4);
  CHECK(m.num_vertices() == 9);
  CHECK(m.num_faces() == 12);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto cell = m.cell(c);
    CHECK(cell.half_lengths[0] == doctest::Approx(0.25));
    CHECK(cell.half_lengths[1] == doctest::Approx(0.25));
  }
  const auto cube = build_uniform(unit_box(3), std::vector<int>{1, 1, 1});
  CHECK(cube.num_cells() == 1);
  CHECK(cube.num_vertices() == 8);
  CHECK(cube.num_faces() == 6);
}

TEST_CASE("uniform mesh rejects bad input") {
  CHECK_THROWS_AS(build_uniform(unit_box(2), std::vector<int>{0, 2}), std::invalid_argument);
  std::vector<Interval> flat{{0.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(build_uniform(flat, std::vector<int>{2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(AxisPartition({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(AxisPartition({0.0}), std::invalid_argument);
}

TEST_CASE("divisionally uniform spacing") {
  // 0.3/3 == 0.7/7: the split is invisible.
  auto m = build_divisionally_uniform(unit_box(2), {{0.3}, {}}, {{3, 7}, {4}});
  for (int k = 0; k < m.cells_along(0); ++k) CHECK(m.partition(0).width(k) == doctest::Approx(0.1));
  CHECK(m.cells_along(1) == 4);

  m = build_divisionally_uniform(unit_box(2), {{0.25}, {0.25}}, {{1, 3}, {1, 3}});
  for (int k = 0; k < 4; ++k) CHECK(m.partition(0).width(k) == doctest::Approx(0.25));

  m = build_divisionally_uniform(unit_box(2), {{0.3}, {0.3}}, {{2, 2}, {2, 2}});
  check_close(bp(m, 0), {0.0, 0.15, 0.3, 0.65, 1.0});
  FaceId interface{0, 2, {0}};
  FaceId inside{0, 1, {0}};
  CHECK_FALSE(is_uniform_patch(m, interface));
  CHECK(is_uniform_patch(m, inside));

  CHECK_THROWS_AS(build_divisionally_uniform(unit_box(2), {{1.3}, {}}, {{2, 2}, {2}}), std::invalid_argument);
  CHECK_THROWS_AS(build_divisionally_uniform(unit_box(2), {{0.3}, {}}, {{0, 2}, {2}}), std::invalid_argument);
}

TEST_CASE("pattern mesh") {
  auto m = build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 1);
  check_close(bp(m, 0), {0.0, 0.2, 1.0});
  m = build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 2);
  check_close(bp(m, 0), {0.0, 0.1, 0.5, 0.6, 1.0});
  CHECK_FALSE(is_uniform_patch(m, FaceId{0, 1, {0}}));
  for (int level : {1, 2, 3, 8}) {
    const auto p = build_pattern(unit_box(2), {{1, 4}, {1, 4}}, level);
    // Scan every cell independently of max_aspect_ratio.
    double worst = 0.0;
    for (std::size_t c = 0; c < p.num_cells(); ++c) {
      const auto h = p.cell(c).half_lengths;
      worst = std::max(worst, std::max(h[0] / h[1], h[1] / h[0]));
    }
    CHECK(worst == doctest::Approx(4.0));
    CHECK(max_aspect_ratio(p) == doctest::Approx(4.0));
  }
  CHECK_THROWS_AS(build_pattern(unit_box(2), {{1, -4}, {1, 4}}, 1), std::invalid_argument);
}

TEST_CASE("mesh size") {
  CHECK(mesh_size(build_uniform(unit_box(2), std::vector<int>{2, 2})) == doctest::Approx(std::sqrt(0.5)));
  CHECK(mesh_size(build_uniform(unit_box(2), std::vector<int>{4, 2})) == doctest::Approx(std::sqrt(0.3125)));
  CHECK(mesh_size(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 1)) == doctest::Approx(0.8 * std::sqrt(2.0)));
}

TEST_CASE("uniform patches and boundary faces") {
  const auto m = build_uniform(unit_box(3), std::vector<int>{3, 2, 2});
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const auto id = m.face_id(f);
    CHECK(m.face_linear(id) == f);
    const auto adj = m.adjacent_cells(id);
    if (m.is_boundary(id)) {
      CHECK(adj.size() == 1);
      CHECK_THROWS_AS(is_uniform_patch(m, id), std::invalid_argument);
    } else {
      CHECK(adj.size() == 2);
      CHECK(is_uniform_patch(m, id));
    }
  }
}

TEST_CASE("cell volumes sum to the domain volume") {
  std::vector<Interval> box{{-1.0, 2.0}, {0.5, 1.25}, {0.0, 3.0}};
  for (const auto& m : {build_uniform(box, std::vector<int>{3, 4, 5}),
                        build_pattern(box, {{1, 4}, {2, 3}, {1}}, 3),
                        build_jittered(box, std::vector<int>{4, 4, 4}, 0.3, 7)}) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.num_cells(); ++c) sum += m.cell(c).volume();
    CHECK(sum == doctest::Approx(m.domain_volume()).epsilon(1e-12));
    CHECK(m.domain_volume() == doctest::Approx(3.0 * 0.75 * 3.0));
  }
}

TEST_CASE("doubling halves every half-length") {
  const auto coarse = build_uniform(unit_box(2), std::vector<int>{3, 5});
  const auto fine = build_uniform(unit_box(2), std::vector<int>{6, 10});
  const auto sub = subdivide(coarse, 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(fine.cell(std::size_t{0}).half_lengths[j] == coarse.cell(std::size_t{0}).half_lengths[j] / 2);
    check_close(bp(sub, j), bp(fine, j));
  }
}

TEST_CASE("lexicographic numbering, axis 0 fastest") {
  const auto m = build_uniform(unit_box(2), std::vector<int>{3, 2});
  CHECK(m.cell_index(1) == MultiIndex{1, 0});
  CHECK(m.cell_index(3) == MultiIndex{0, 1});
  CHECK(m.vertex_index(4) == MultiIndex{0, 1});
  // Faces grouped by axis: 4*2 faces normal to axis 0, then 3*3 normal to axis 1.
  CHECK(m.num_faces(0) == 8);
  CHECK(m.num_faces(1) == 9);
  CHECK(m.face_id(8).axis == 1);
  const auto v = m.vertex_point(5);
  CHECK(v[0] == doctest::Approx(1.0 / 3));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK(m.is_boundary_vertex(MultiIndex{1, 0}));
  CHECK_FALSE(m.is_boundary_vertex(MultiIndex{1, 1}));
}

TEST_CASE("point location prefers the smaller index") {
  AxisPartition p({0.0, 0.5, 1.0});
  CHECK(p.locate(0.5) == 0);
  CHECK(p.locate(0.75) == 1);
  CHECK(p.locate(1.0) == 1);
  CHECK(p.locate(0.0) == 0);
}

TEST_CASE("mesh spec JSON and command-line grammar") {
  auto spec = mesh_spec_from_json(nlohmann::json::parse(R"({"dim":2,"family":"pattern","ratios":[1,4],"level":2})"));
  check_close(bp(spec.build(), 1), {0.0, 0.1, 0.5, 0.6, 1.0});
  CHECK(spec.refined(1).level == 4);

  auto back = mesh_spec_from_json(to_json(spec));
  check_close(bp(back.build(), 0), bp(spec.build(), 0));

  spec = parse_mesh_arg("divisional:split=0.3,counts=2:3", 2);
  CHECK(spec.build().cells_along(0) == 5);
  CHECK(spec.refined(2).build().cells_along(1) == 20);

  spec = parse_mesh_arg("uniform:4", 3);
  CHECK(spec.build().num_cells() == 64);

  const auto ex = explicit_spec(build_pattern(unit_box(2), {{1, 4}, {1, 4}}, 1));
  check_close(bp(mesh_spec_from_json(to_json(ex)).build(), 0), {0.0, 0.2, 1.0});

  CHECK_THROWS_AS(parse_mesh_arg("uniform:0", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_mesh_arg("hex:4", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_mesh_arg("pattern:1-0,level=2", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_mesh_arg("file:/nonexistent/mesh.json", 2), std::invalid_argument);
  CHECK_THROWS(mesh_spec_from_json(nlohmann::json::parse(R"({"dim":2,"family":"hex"})")));
}
