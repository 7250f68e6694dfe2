#ifndef MORLEY_LEMMA_VERIFY_HPP
#define MORLEY_LEMMA_VERIFY_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "morley/fe_space.hpp"
#include "morley/polynomial.hpp"
#include "morley/problems.hpp"
#include "morley/tensor_mesh.hpp"

namespace morley {

inline constexpr std::uint64_t kDefaultSeed = 20161121;

struct LemmaReport {
  std::string lemma;
  int dim = 0;
  int trials = 0;
  std::uint64_t seed = kDefaultSeed;
  double tolerance = 0.0;
  double max_residual = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const LemmaReport& report);

/// Cell with center in [-1,1]^d and half-lengths in [0.2, 1.5].
Cell random_cell(int dim, std::mt19937_64& rng);

/// max |D_r(phi_s) - delta_rs| over random cells.
LemmaReport check_unisolvence(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// max_i |int_{dK} p1 (phi - Pi1 phi) n_i| for random p1 in P_1 and phi in
/// the span of the vertex basis.
LemmaReport check_vertex_orthogonality(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// max_i |int_{dK} psi n_i| for psi in the span of the face basis.
LemmaReport check_face_orthogonality(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// Two cells sharing the face x_axis = face_center[axis]. `half_lengths`
/// gives the cross-section (the entry for `axis` is ignored); the cells
/// extend 2*h_left and 2*h_right to either side.
struct PatchSpec {
  std::vector<double> face_center;
  std::vector<double> half_lengths;
  int axis = 0;
  double h_left = 0.5;
  double h_right = 0.5;

  Cell left() const;
  Cell right() const;
};

struct PatchResidual {
  double residual = 0.0;  ///< max_i |int_{d omega} p1 psi n_i|
  double scale = 0.0;     ///< sum of |.| of the individual face integrals
};

/// psi is the face function of the shared face with unit DOF value.
PatchResidual patch_residual(const PatchSpec& patch, const Polynomial& p1);

LemmaReport check_patch_orthogonality(const PatchSpec& patch, int trials, std::uint64_t seed = kDefaultSeed);

struct ThetaValues {
  double pairwise = 0.0;  ///< max over face pairs of |(grad q_i, grad q_j)| / (|q_i|^2 + |q_j|^2)
  double cross = 0.0;     ///< sup over vertex-class phi, face-class psi of the same ratio
};

ThetaValues compute_theta(const Cell& cell);

/// |theta_pairwise - 1/8| over random cells.
LemmaReport check_theta_pairwise(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// max theta_cross over random cells, required to stay below 1/2.
LemmaReport check_theta_cross(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// Relative residual of the cubic expansion identity for random cubic u,
/// random Morley v and random cells.
LemmaReport check_expansion(int dim, int trials, std::uint64_t seed = kDefaultSeed);

/// Most negative slack of |v|^2_K >= (1 - 2 theta_K)(|v_X|^2_K + |v_F|^2_K)
/// (per cell, and summed with the largest theta) over random v in V_h.
LemmaReport check_stable_decomposition(const std::shared_ptr<const FeSpace>& space, int trials,
                                       std::uint64_t seed = kDefaultSeed);

/// Restrictions of Pi_h u to every cell against Pi_K u for random cubic u.
/// Catches orientation errors in the DOF map.
LemmaReport check_conformity(const std::shared_ptr<const FeSpace>& space, int trials,
                             std::uint64_t seed = kDefaultSeed);

/// Consistency residual R(phi) = a_h(u, phi) - (f, phi) over V_h0.
struct ConsistencyProbe {
  double max_X = 0.0;   ///< max |R(phi)| / |phi|_{1,h}, phi a vertex basis function
  double max_F = 0.0;   ///< same over face basis functions
  double dual_X = 0.0;  ///< sup |R(v)| / |v|_{1,h} over the vertex class
  double dual_F = 0.0;  ///< sup |R(v)| / |v|_{1,h} over the face class
};

ConsistencyProbe consistency_probe(const std::shared_ptr<const FeSpace>& space, const ManufacturedProblem& problem,
                                   int quad_points_per_axis = 5);

struct VerifyOptions {
  std::vector<int> dims{2, 3};
  int trials = 100;
  std::uint64_t seed = kDefaultSeed;
  bool flip_face_signs = false;  ///< fault injection for the conformity check
};

/// Every check for every requested dimension, one report each.
std::vector<LemmaReport> run_verification(const VerifyOptions& options);

}  // namespace morley

#endif
