#include "morley/problems.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace morley {

namespace {

// g and its first three derivatives at t.
using Profile = std::function<std::array<double, 4>(double)>;

// u(x) = prod_i g(x_i).
SmoothField separable(int dim, Profile g) {
  SmoothField u;
  u.dim = dim;
  u.partial = [dim, g](std::span<const double> x, std::span<const int> alpha) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
      const int a = alpha.empty() ? 0 : alpha[i];
      if (a > 3) throw std::invalid_argument("derivative order above 3");
      v *= g(x[i])[a];
    }
    return v;
  };
  u.value = [p = u.partial](std::span<const double> x) { return p(x, {}); };
  u.gradient = [dim, g](std::span<const double> x, std::span<double> out) {
    std::vector<std::array<double, 4>> gx(dim);
    for (int i = 0; i < dim; ++i) gx[i] = g(x[i]);
    for (int i = 0; i < dim; ++i) {
      double v = gx[i][1];
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= gx[j][0];
      out[i] = v;
    }
  };
  u.laplacian = [dim, g](std::span<const double> x) {
    std::vector<std::array<double, 4>> gx(dim);
    for (int i = 0; i < dim; ++i) gx[i] = g(x[i]);
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
      double v = gx[i][2];
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= gx[j][0];
      sum += v;
    }
    return sum;
  };
  return u;
}

SmoothField minus_laplacian(const SmoothField& u) {
  SmoothField f;
  f.dim = u.dim;
  f.value = [lap = u.laplacian](std::span<const double> x) { return -lap(x); };
  return f;
}

SmoothField zero_field(int dim) {
  SmoothField z;
  z.dim = dim;
  z.value = [](std::span<const double>) { return 0.0; };
  z.gradient = [](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  z.laplacian = z.value;
  z.partial = [](std::span<const double>, std::span<const int>) { return 0.0; };
  return z;
}

}  // namespace

std::vector<std::string> problem_names() { return {"bubble", "sinsin", "zero", "linear"}; }

ManufacturedProblem make_problem(const std::string& name, int dim) {
  if (dim < 1) throw std::invalid_argument("problem dimension must be positive");
  ManufacturedProblem p;
  p.name = name;
  if (name == "bubble") {
    p.u = separable(dim, [](double t) { return std::array<double, 4>{t * (1.0 - t), 1.0 - 2.0 * t, -2.0, 0.0}; });
    p.f = minus_laplacian(p.u);
  } else if (name == "sinsin") {
    constexpr double pi = std::numbers::pi;
    p.u = separable(dim, [](double t) {
      const double s = std::sin(pi * t), c = std::cos(pi * t);
      return std::array<double, 4>{s, pi * c, -pi * pi * s, -pi * pi * pi * c};
    });
    p.f = minus_laplacian(p.u);
  } else if (name == "zero") {
    p.u = zero_field(dim);
    p.f = zero_field(dim);
  } else if (name == "linear") {
    p.homogeneous = false;
    p.u.dim = dim;
    p.u.value = [dim](std::span<const double> x) {
      double v = 1.0;
      for (int i = 0; i < dim; ++i) v += (i + 1) * x[i];
      return v;
    };
    p.u.gradient = [dim](std::span<const double>, std::span<double> out) {
      for (int i = 0; i < dim; ++i) out[i] = i + 1;
    };
    p.u.laplacian = [](std::span<const double>) { return 0.0; };
    p.u.partial = [dim, value = p.u.value](std::span<const double> x, std::span<const int> alpha) {
      int order = 0, axis = -1;
      for (int i = 0; i < dim && !alpha.empty(); ++i) {
        order += alpha[i];
        if (alpha[i] > 0) axis = i;
      }
      if (order == 0) return value(x);
      return order == 1 ? double(axis + 1) : 0.0;
    };
    p.f = zero_field(dim);
  } else {
    throw std::invalid_argument("unknown problem '" + name + "'");
  }
  return p;
}

}  // namespace morley
