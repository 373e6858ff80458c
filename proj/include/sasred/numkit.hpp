#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace sasred::numkit {

// Central-difference stencil with Richardson extrapolation.  With L
// extrapolation levels the effective truncation order is 2L (central
// differences carry only even error powers), so the defaults below reach
// order >= 4.
struct Stencil {
  double step = 1e-3;
  int richardson_levels = 2;  // in [1, 4]
  int order = 1;              // derivative order, 1 or 2

  static Stencil first_derivative() { return Stencil{1e-3, 2, 1}; }
  static Stencil second_derivative() { return Stencil{5e-3, 2, 2}; }

  void validate() const;  // throws Error(Precondition) on a bad stencil
  // Farthest parameter offset the stencil samples (level 0 uses the full step).
  double span() const { return step; }
};

using CurveFn = std::function<Eigen::VectorXd(double)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarCurveFn = std::function<double(double)>;
using InnerFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

// d/dt c(t) at t=0 (order 1) or d^2/dt^2 c(t) at t=0 (order 2).
// Throws Error(EvaluationDomain) if the curve produces non-finite values.
Eigen::VectorXd curve_derivative(const CurveFn& c, const Stencil& s);
double curve_derivative(const ScalarCurveFn& c, const Stencil& s);

// Directional derivative of f: R^m -> R^k along v, i.e. the derivative of
// t -> f(x + t v) at t=0 with the given stencil order.
Eigen::VectorXd directional_derivative(const VectorFn& f, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& v, const Stencil& s);

// Mixed second derivative d^2/ds dt f(s, t) at (0, 0), Richardson-extrapolated.
Eigen::VectorXd mixed_second_derivative(const std::function<Eigen::VectorXd(double, double)>& f,
                                        const Stencil& s);
double mixed_second_derivative(const std::function<double(double, double)>& f, const Stencil& s);

struct OrthonormalBasis {
  std::vector<Eigen::VectorXd> vectors;  // orthonormal w.r.t. the supplied form
  // vectors[a] = sum_j coefficients(a, j) * input[j]
  Eigen::MatrixXd coefficients;
  std::vector<int> kept;  // indices of inputs that produced a pivot
};

// Modified Gram-Schmidt (two passes) against an arbitrary SPD bilinear form.
// A pivot whose length falls below pivot_tol times the input length marks the
// input as dependent: gram_schmidt throws Error(RankDeficiency) carrying the
// offending index, orthonormal_span skips the vector instead.
OrthonormalBasis gram_schmidt(const std::vector<Eigen::VectorXd>& vectors, const InnerFn& inner,
                              double pivot_tol = 1e-8);
OrthonormalBasis orthonormal_span(const std::vector<Eigen::VectorXd>& vectors, const InnerFn& inner,
                                  double pivot_tol = 1e-8);

inline double euclidean_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b);
}

// Orthonormal kernel basis of M (columns of the result), computed from a full
// SVD; singular values at or below tol * sigma_max count as zero.  A matrix
// with no rows has the full standard basis as kernel.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& M, double tol = 1e-9);

// Least-squares power-law fit: given pairs (t, q), the exponent s minimizing
// sum (log q - s log t)^2 and the largest deviation |q - t^s|.
struct PowerFit {
  double exponent = 0.0;
  double max_residual = 0.0;
};
PowerFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

}  // namespace sasred::numkit
