#include "morley/element.hpp"

#include <cmath>
#include <stdexcept>

namespace morley {

namespace {

constexpr std::array<double, 4> kOne{1.0, 0.0, 0.0, 0.0};

// d^a/dt^a of c0 + c1 t + c2 t^2 + c3 t^3.
double cubic_derivative(const std::array<double, 4>& c, int a, double t) {
  double sum = 0.0;
  double tp = 1.0;
  for (int k = a; k < 4; ++k) {
    double falling = 1.0;
    for (int m = 0; m < a; ++m) falling *= (k - m);
    sum += c[k] * falling * tp;
    tp *= t;
  }
  return sum;
}

int order(std::span<const int> alpha) {
  int s = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("negative derivative order");
    s += a;
  }
  return s;
}

void check_derivative(std::span<const int> deriv, int dim) {
  if (deriv.empty()) return;
  if (static_cast<int>(deriv.size()) != dim)
    throw std::invalid_argument("derivative multi-index length differs from dimension");
  if (order(deriv) > 3) throw std::invalid_argument("derivatives above third order are not supported");
}

}  // namespace

MorleyElement::MorleyElement(int dim) : dim_(dim) {
  if (dim < 2) throw std::invalid_argument("element dimension must be at least 2");
  const double base = std::ldexp(1.0, -(dim + 1));  // 1 / 2^(d+1)

  for (int i = 0; i < num_vertices(); ++i) {
    std::vector<Term> terms;
    Term product{2.0 * base, {}};
    for (int j = 0; j < dim; ++j) product.factors.push_back({1.0, double(vertex_sign(i, j)), 0.0, 0.0});
    terms.push_back(product);
    for (int j = 0; j < dim; ++j) {
      Term t{-vertex_sign(i, j) * base, std::vector<std::array<double, 4>>(dim, kOne)};
      t.factors[j] = {0.0, -1.0, 0.0, 1.0};  // xi^3 - xi
      terms.push_back(t);
    }
    shapes_.push_back(std::move(terms));
  }
  for (int f = 0; f < num_faces(); ++f) {
    const int k = face_axis(f);
    Term t{0.25, std::vector<std::array<double, 4>>(dim, kOne)};
    if (face_side(f) > 0) {
      t.factors[k] = {-1.0, -1.0, 1.0, 1.0};  // (xi+1)^2 (xi-1)
    } else {
      t.coefficient = -0.25;
      t.factors[k] = {1.0, -1.0, -1.0, 1.0};  // (xi+1) (xi-1)^2
    }
    shapes_.push_back({t});
  }

  const auto& tab = tabulation(3);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(tab.rule.weights().data(),
                                                                static_cast<Eigen::Index>(tab.rule.size()));
  for (int j = 0; j < dim; ++j)
    ref_stiffness_.push_back(tab.gradients[j].transpose() * w.asDiagonal() * tab.gradients[j]);
}

int MorleyElement::flat_index(LocalBasisIndex idx) const {
  if (idx.kind == DofKind::vertex) {
    if (idx.index < 0 || idx.index >= num_vertices()) throw std::out_of_range("vertex basis index out of range");
    return idx.index;
  }
  if (idx.index < 0 || idx.index >= num_faces()) throw std::out_of_range("face basis index out of range");
  return num_vertices() + idx.index;
}

LocalBasisIndex MorleyElement::basis_index(int r) const {
  if (r < 0 || r >= num_dofs()) throw std::out_of_range("local dof out of range");
  if (r < num_vertices()) return {DofKind::vertex, r};
  return {DofKind::face, r - num_vertices()};
}

double MorleyElement::reference_derivative(int r, std::span<const double> xi,
                                           std::span<const int> alpha) const {
  double sum = 0.0;
  for (const auto& t : shapes_[r]) {
    double v = t.coefficient;
    for (int j = 0; j < dim_ && v != 0.0; ++j)
      v *= cubic_derivative(t.factors[j], alpha.empty() ? 0 : alpha[j], xi[j]);
    sum += v;
  }
  return sum;
}

double MorleyElement::scale(const Cell& cell, int r) const {
  return r < num_vertices() ? 1.0 : cell.half_lengths[face_axis(r - num_vertices())];
}

Tabulation MorleyElement::make_tabulation(int points_per_axis) const {
  Tabulation tab{QuadratureRule(dim_, points_per_axis), {}, {}};
  const auto nq = static_cast<Eigen::Index>(tab.rule.size());
  tab.values.resize(nq, num_dofs());
  tab.gradients.assign(dim_, Eigen::MatrixXd(nq, num_dofs()));
  std::vector<int> alpha(dim_, 0);
  for (Eigen::Index q = 0; q < nq; ++q) {
    auto xi = tab.rule.point(q);
    for (int r = 0; r < num_dofs(); ++r) {
      tab.values(q, r) = reference_derivative(r, xi, {});
      for (int j = 0; j < dim_; ++j) {
        alpha[j] = 1;
        tab.gradients[j](q, r) = reference_derivative(r, xi, alpha);
        alpha[j] = 0;
      }
    }
  }
  return tab;
}

const Tabulation& MorleyElement::tabulation(int points_per_axis) const {
  if (points_per_axis < 1) throw std::invalid_argument("quadrature needs at least one point per axis");
  std::lock_guard lock(cache_mutex_);
  auto& slot = tabulations_[points_per_axis];
  if (!slot) slot = std::make_unique<Tabulation>(make_tabulation(points_per_axis));
  return *slot;
}

const MorleyElement& element_for(int dim) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<MorleyElement>> elements;
  std::lock_guard lock(mutex);
  auto& slot = elements[dim];
  if (!slot) slot = std::make_unique<MorleyElement>(dim);
  return *slot;
}

double eval_basis(const Cell& cell, LocalBasisIndex idx, std::span<const double> point,
                  std::span<const int> deriv) {
  const auto& el = element_for(cell.dim());
  check_derivative(deriv, cell.dim());
  const int r = el.flat_index(idx);
  std::vector<double> xi(cell.dim());
  cell.to_reference(point, xi);
  double chain = el.scale(cell, r);
  if (!deriv.empty())
    for (int j = 0; j < cell.dim(); ++j) chain /= std::pow(cell.half_lengths[j], deriv[j]);
  return chain * el.reference_derivative(r, xi, deriv);
}

Eigen::VectorXd dof_functionals(const Cell& cell, const SmoothField& field, int face_points) {
  const int d = cell.dim();
  const auto& el = element_for(d);
  Eigen::VectorXd dofs(el.num_dofs());
  std::vector<double> xi(d), x(d), grad(d);
  for (int i = 0; i < el.num_vertices(); ++i) {
    for (int j = 0; j < d; ++j) xi[j] = el.vertex_sign(i, j);
    cell.to_physical(xi, x);
    dofs[i] = field.value(x);
  }
  const QuadratureRule face_rule(d - 1, face_points);
  const double face_measure = std::ldexp(1.0, d - 1);
  for (int f = 0; f < el.num_faces(); ++f) {
    const int k = MorleyElement::face_axis(f);
    const int side = MorleyElement::face_side(f);
    double sum = 0.0;
    for (std::size_t q = 0; q < face_rule.size(); ++q) {
      auto eta = face_rule.point(q);
      for (int j = 0, c = 0; j < d; ++j) xi[j] = (j == k) ? side : eta[c++];
      cell.to_physical(xi, x);
      field.gradient(x, grad);
      sum += face_rule.weight(q) * side * grad[k];
    }
    dofs[el.num_vertices() + f] = sum / face_measure;
  }
  return dofs;
}

Eigen::VectorXd local_interpolate(const Cell& cell, const SmoothField& field, int face_points) {
  // Duality of basis and DOFs: the coefficients are the DOF values.
  return dof_functionals(cell, field, face_points);
}

double eval_local(const Cell& cell, const Eigen::VectorXd& coefficients, std::span<const double> point,
                  std::span<const int> deriv) {
  const auto& el = element_for(cell.dim());
  check_derivative(deriv, cell.dim());
  if (coefficients.size() != el.num_dofs()) throw std::invalid_argument("wrong local coefficient count");
  std::vector<double> xi(cell.dim());
  cell.to_reference(point, xi);
  double chain = 1.0;
  if (!deriv.empty())
    for (int j = 0; j < cell.dim(); ++j) chain /= std::pow(cell.half_lengths[j], deriv[j]);
  double sum = 0.0;
  for (int r = 0; r < el.num_dofs(); ++r)
    if (coefficients[r] != 0.0) sum += coefficients[r] * el.scale(cell, r) * el.reference_derivative(r, xi, deriv);
  return chain * sum;
}

Q1Interpolant::Q1Interpolant(Cell cell, std::vector<double> vertex_values)
    : cell_(std::move(cell)), vertex_values_(std::move(vertex_values)) {
  if (vertex_values_.size() != (std::size_t{1} << cell_.dim()))
    throw std::invalid_argument("Q1 interpolant needs one value per vertex");
}

double Q1Interpolant::operator()(std::span<const double> point, std::span<const int> deriv) const {
  const int d = cell_.dim();
  check_derivative(deriv, d);
  std::vector<double> xi(d);
  cell_.to_reference(point, xi);
  double sum = 0.0;
  for (std::size_t i = 0; i < vertex_values_.size(); ++i) {
    double v = vertex_values_[i];
    for (int j = 0; j < d && v != 0.0; ++j) {
      const double s = (i >> j) & 1 ? 1.0 : -1.0;
      const int a = deriv.empty() ? 0 : deriv[j];
      if (a == 0) v *= 0.5 * (1.0 + s * xi[j]);
      else if (a == 1) v *= 0.5 * s / cell_.half_lengths[j];
      else v = 0.0;
    }
    sum += v;
  }
  return sum;
}

Q1Interpolant local_q1_interpolate(const Cell& cell, const SmoothField& field) {
  const int d = cell.dim();
  std::vector<double> values(std::size_t{1} << d), xi(d), x(d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (int j = 0; j < d; ++j) xi[j] = (i >> j) & 1 ? 1.0 : -1.0;
    cell.to_physical(xi, x);
    values[i] = field.value(x);
  }
  return Q1Interpolant(cell, std::move(values));
}

Eigen::MatrixXd local_stiffness(const Cell& cell) {
  const int d = cell.dim();
  const auto& el = element_for(d);
  const double jac = cell.volume() / std::ldexp(1.0, d);
  Eigen::VectorXd c(el.num_dofs());
  for (int r = 0; r < el.num_dofs(); ++r) c[r] = el.scale(cell, r);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(el.num_dofs(), el.num_dofs());
  for (int j = 0; j < d; ++j)
    a += el.reference_stiffness(j) / (cell.half_lengths[j] * cell.half_lengths[j]);
  a *= jac;
  return c.asDiagonal() * a * c.asDiagonal();
}

Eigen::VectorXd local_load(const Cell& cell, const SmoothField& f, int quad_points_per_axis) {
  const int d = cell.dim();
  const auto& el = element_for(d);
  const auto& tab = el.tabulation(quad_points_per_axis);
  const double jac = cell.volume() / std::ldexp(1.0, d);
  Eigen::VectorXd fw(static_cast<Eigen::Index>(tab.rule.size()));
  std::vector<double> x(d);
  for (std::size_t q = 0; q < tab.rule.size(); ++q) {
    cell.to_physical(tab.rule.point(q), x);
    fw[q] = tab.rule.weight(q) * f.value(x);
  }
  Eigen::VectorXd b = jac * (tab.values.transpose() * fw);
  for (int r = 0; r < el.num_dofs(); ++r) b[r] *= el.scale(cell, r);
  return b;
}

ExpansionCheck expansion_residual(const Cell& cell, const Polynomial& u, const Eigen::VectorXd& v) {
  const int d = cell.dim();
  const auto field = u.to_field();
  const Eigen::VectorXd pu = local_interpolate(cell, field);
  // Integrands have per-axis degree <= 4 and are integrated exactly.
  const QuadratureRule rule(d, 4);
  const double jac = cell.volume() / std::ldexp(1.0, d);
  const auto& h = cell.half_lengths;

  ExpansionCheck out;
  double err_sq = 0.0, v_sq = 0.0;
  std::vector<double> x(d);
  std::vector<int> alpha(d, 0);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    cell.to_physical(rule.point(q), x);
    const double w = rule.weight(q) * jac;
    for (int i = 0; i < d; ++i) {
      alpha.assign(d, 0);
      alpha[i] = 1;
      const double de = u.derivative(x, alpha) - eval_local(cell, pu, x, alpha);
      const double dv = eval_local(cell, v, x, alpha);
      out.lhs += w * de * dv;
      err_sq += w * de * de;
      v_sq += w * dv * dv;
      alpha[i] = 3;
      const double dv3 = eval_local(cell, v, x, alpha);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        alpha.assign(d, 0);
        alpha[i] = 1;
        alpha[j] = 2;
        const double uijj = u.derivative(x, alpha);
        out.rhs += w * uijj * (-(h[j] * h[j] / 3.0) * dv + (h[i] * h[i] * h[j] * h[j] / 45.0) * dv3);
      }
    }
  }
  out.residual = std::abs(out.lhs - out.rhs);
  out.scale = std::sqrt(err_sq * v_sq);
  return out;
}

}  // namespace morley
