#include "sasred/numkit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sasred/errors.hpp"

namespace sasred::numkit {

void Stencil::validate() const {
  if (!(step > 0.0) || !std::isfinite(step))
    throw Error(ErrorKind::Precondition, "stencil step must be positive and finite", step);
  if (richardson_levels < 1 || richardson_levels > 4)
    throw Error(ErrorKind::Precondition, "richardson_levels must lie in [1,4]", richardson_levels);
  if (order != 1 && order != 2)
    throw Error(ErrorKind::Precondition, "stencil order must be 1 or 2", order);
}

namespace {

void check_finite(const Eigen::VectorXd& v, double t) {
  if (!v.allFinite())
    throw Error(ErrorKind::EvaluationDomain, "non-finite value inside a finite-difference stencil",
                t);
}

// Standard Richardson table for even-power error expansions.
Eigen::VectorXd richardson_combine(std::vector<Eigen::VectorXd> T) {
  const int L = int(T.size());
  for (int k = 1; k < L; ++k) {
    const double w = std::pow(4.0, k);
    for (int j = L - 1; j >= k; --j) T[j] = (w * T[j] - T[j - 1]) / (w - 1.0);
  }
  return T[L - 1];
}

}  // namespace

Eigen::VectorXd curve_derivative(const CurveFn& c, const Stencil& s) {
  s.validate();
  const int L = s.richardson_levels;
  std::vector<Eigen::VectorXd> T(L);
  Eigen::VectorXd f0;
  if (s.order == 2) {
    f0 = c(0.0);
    check_finite(f0, 0.0);
  }
  for (int j = 0; j < L; ++j) {
    const double h = s.step / double(1 << j);
    Eigen::VectorXd fp = c(h);
    Eigen::VectorXd fm = c(-h);
    check_finite(fp, h);
    check_finite(fm, -h);
    if (s.order == 1)
      T[j] = (fp - fm) / (2.0 * h);
    else
      T[j] = (fp - 2.0 * f0 + fm) / (h * h);
  }
  return richardson_combine(std::move(T));
}

double curve_derivative(const ScalarCurveFn& c, const Stencil& s) {
  Eigen::VectorXd r = curve_derivative(
      [&](double t) {
        Eigen::VectorXd v(1);
        v(0) = c(t);
        return v;
      },
      s);
  return r(0);
}

Eigen::VectorXd directional_derivative(const VectorFn& f, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& v, const Stencil& s) {
  return curve_derivative([&](double t) { return f(x + t * v); }, s);
}

Eigen::VectorXd mixed_second_derivative(const std::function<Eigen::VectorXd(double, double)>& f,
                                        const Stencil& s) {
  s.validate();
  const int L = s.richardson_levels;
  std::vector<Eigen::VectorXd> T(L);
  for (int j = 0; j < L; ++j) {
    const double h = s.step / double(1 << j);
    Eigen::VectorXd a = f(h, h), b = f(h, -h), c = f(-h, h), d = f(-h, -h);
    check_finite(a, h);
    check_finite(b, h);
    check_finite(c, h);
    check_finite(d, h);
    T[j] = (a - b - c + d) / (4.0 * h * h);
  }
  return richardson_combine(std::move(T));
}

double mixed_second_derivative(const std::function<double(double, double)>& f, const Stencil& s) {
  return mixed_second_derivative(
      [&](double a, double b) {
        Eigen::VectorXd v(1);
        v(0) = f(a, b);
        return v;
      },
      s)(0);
}

namespace {

OrthonormalBasis orthonormalize(const std::vector<Eigen::VectorXd>& vectors, const InnerFn& inner,
                                double pivot_tol, bool skip_dependent) {
  OrthonormalBasis out;
  const int k = int(vectors.size());
  if (k == 0) {
    out.coefficients.resize(0, 0);
    return out;
  }
  std::vector<Eigen::VectorXd> coeff_rows;
  for (int idx = 0; idx < k; ++idx) {
    Eigen::VectorXd w = vectors[idx];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(k);
    row(idx) = 1.0;
    const double ref = inner(vectors[idx], vectors[idx]);
    if (!(ref >= 0.0) || !std::isfinite(ref))
      throw Error(ErrorKind::Precondition, "bilinear form is not positive on an input vector", ref,
                  idx);
    // Two projection passes keep orthogonality near machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t a = 0; a < out.vectors.size(); ++a) {
        const double c = inner(out.vectors[a], w);
        w -= c * out.vectors[a];
        row -= c * coeff_rows[a];
      }
    }
    const double nrm2 = inner(w, w);
    if (!(nrm2 > pivot_tol * pivot_tol * (ref > 0.0 ? ref : 1.0))) {
      if (skip_dependent) continue;
      throw Error(ErrorKind::RankDeficiency, "dependent vector in gram_schmidt",
                  std::sqrt(std::max(nrm2, 0.0)), idx);
    }
    const double nrm = std::sqrt(nrm2);
    out.vectors.push_back(w / nrm);
    coeff_rows.push_back(row / nrm);
    out.kept.push_back(idx);
  }
  out.coefficients.resize(int(coeff_rows.size()), k);
  for (std::size_t a = 0; a < coeff_rows.size(); ++a) out.coefficients.row(int(a)) = coeff_rows[a];
  return out;
}

}  // namespace

OrthonormalBasis gram_schmidt(const std::vector<Eigen::VectorXd>& vectors, const InnerFn& inner,
                              double pivot_tol) {
  return orthonormalize(vectors, inner, pivot_tol, /*skip_dependent=*/false);
}

OrthonormalBasis orthonormal_span(const std::vector<Eigen::VectorXd>& vectors, const InnerFn& inner,
                                  double pivot_tol) {
  return orthonormalize(vectors, inner, pivot_tol, /*skip_dependent=*/true);
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& M, double tol) {
  const int m = int(M.cols());
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(m, m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++rank;
  return svd.matrixV().rightCols(m - rank);
}

PowerFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
  double num = 0.0, den = 0.0;
  for (const auto& [t, q] : samples) {
    if (!(t > 0.0) || !(q > 0.0) || t == 1.0) continue;
    const double lt = std::log(t);
    num += lt * std::log(q);
    den += lt * lt;
  }
  if (den == 0.0)
    throw Error(ErrorKind::Precondition, "power-law fit needs samples with t != 1", 0.0);
  PowerFit fit;
  fit.exponent = num / den;
  for (const auto& [t, q] : samples)
    fit.max_residual = std::max(fit.max_residual, std::abs(q - std::pow(t, fit.exponent)));
  return fit;
}

}  // namespace sasred::numkit
