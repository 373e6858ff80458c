#include "sasred/levelset.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sasred/errors.hpp"

namespace sasred::levelset {

namespace {

using ambient::eta;
using ambient::mul_i;
using ambient::phi;
using ambient::sphere_project;

// A weight row with entries of one strict sign makes mu_i a definite form:
// the zero set is empty and no retraction can succeed.
void check_feasible_signs(const action::TorusAction& A) {
  for (int i = 0; i < A.rank(); ++i) {
    const auto row = A.weights().row(i);
    if ((row.array() > 0).all() || (row.array() < 0).all())
      throw Error(ErrorKind::Infeasible, "a weight row is sign-definite, the zero set is empty",
                  0.0, i);
  }
}

double residual_norm(const Eigen::VectorXd& mu) {
  return mu.size() == 0 ? 0.0 : mu.cwiseAbs().maxCoeff();
}

// One Newton correction within the sphere along the tangential moment
// gradients.  Returns the undamped candidate; the caller damps.
Eigen::VectorXd newton_direction(const action::TorusAction& A, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& mu) {
  const int d = A.rank();
  Eigen::MatrixXd G(d, z.size());
  for (int i = 0; i < d; ++i)
    G.row(i) = sphere_project(z, A.moment_gradient(i, z)).transpose();
  const Eigen::MatrixXd gram = G * G.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(d - 1);
  if (!(lo > 1e-13 * std::max(1.0, hi)))
    throw Error(ErrorKind::Regularity, "correction Gram system degenerated", lo);
  const Eigen::VectorXd t = eig.eigenvectors() *
                            (eig.eigenvectors().transpose() * (-mu)).cwiseQuotient(
                                eig.eigenvalues());
  return G.transpose() * t;
}

}  // namespace

Eigen::VectorXd retract(const action::TorusAction& A, const Eigen::VectorXd& y,
                        const RetractOptions& opt) {
  check_feasible_signs(A);
  Eigen::VectorXd z = ambient::normalize(y);
  if (A.rank() == 0) return z;
  double res = residual_norm(A.moment(z));
  int iter = 0;
  while (res >= opt.tol) {
    if (iter++ >= opt.max_iter)
      throw Error(ErrorKind::RetractionFailure, "moment residual stalled above tolerance", res);
    const Eigen::VectorXd dir = newton_direction(A, z, A.moment(z));
    double lambda = 1.0;
    Eigen::VectorXd znew;
    double rnew = res;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      znew = ambient::normalize(z + lambda * dir);
      rnew = residual_norm(A.moment(znew));
      if (rnew < res) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw Error(ErrorKind::RetractionFailure, "damping exhausted without progress", res);
    z = znew;
    res = rnew;
  }
  // One undamped polish step: the returned point then depends smoothly on y,
  // which the finite-difference consumers rely on.
  z = ambient::normalize(z + newton_direction(A, z, A.moment(z)));
  return z;
}

LevelPoint make_level_point(const action::TorusAction& A, const Eigen::VectorXd& z) {
  LevelPoint p;
  p.z = z;
  p.n = ambient::complex_dim(z);
  p.d = A.rank();
  if (std::abs(z.norm() - 1.0) > 1e-10)
    throw Error(ErrorKind::Precondition, "level point must lie on the unit sphere",
                z.norm() - 1.0);
  if (residual_norm(A.moment(z)) > 1e-10)
    throw Error(ErrorKind::Precondition, "point is off the zero set",
                residual_norm(A.moment(z)));

  std::vector<Eigen::VectorXd> phis;
  for (int i = 0; i < p.d; ++i) {
    Eigen::VectorXd x = A.fundamental_field(i, z);
    if (x.norm() < 1e-8)
      throw Error(ErrorKind::DegenerateOrbit, "fundamental field vanishes at the point", x.norm(),
                  i);
    p.vertical.push_back(x);
    phis.push_back(phi(z, x));
  }
  try {
    auto vb = numkit::gram_schmidt(p.vertical, numkit::euclidean_inner);
    p.vertical_on = std::move(vb.vectors);
    p.vertical_coeff = std::move(vb.coefficients);
    auto nb = numkit::gram_schmidt(phis, numkit::euclidean_inner);
    p.normal = std::move(nb.vectors);
    p.normal_coeff = std::move(nb.coefficients);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::RankDeficiency)
      throw Error(ErrorKind::DegenerateOrbit, "orbit directions collapse at the point", e.datum(),
                  e.index());
    throw;
  }

  // Level tangent space: kernel of the moment differentials and of <z, .>.
  Eigen::MatrixXd constraints(p.d + 1, z.size());
  constraints.topRows(p.d) = A.moment_jacobian(z);
  constraints.row(p.d) = z.transpose();
  const Eigen::MatrixXd T = numkit::nullspace(constraints);

  std::vector<Eigen::VectorXd> candidates;
  candidates.push_back(ambient::reeb(z));
  for (int j = 0; j < T.cols(); ++j) candidates.push_back(T.col(j));
  for (Eigen::VectorXd& c : candidates)
    for (const Eigen::VectorXd& v : p.vertical_on) c -= c.dot(v) * v;
  auto hb = numkit::orthonormal_span(candidates, numkit::euclidean_inner);
  p.horizontal = std::move(hb.vectors);
  const int want = 2 * p.n - 2 * p.d - 1;
  if (int(p.horizontal.size()) != want)
    throw Error(ErrorKind::Regularity, "horizontal frame has the wrong dimension",
                double(p.horizontal.size()));
  return p;
}

LevelPoint retract_point(const action::TorusAction& A, const Eigen::VectorXd& y,
                         const RetractOptions& opt) {
  return make_level_point(A, retract(A, y, opt));
}

std::vector<LevelPoint> sample_level_points(const action::TorusAction& A, int count, Rng& rng,
                                            const RetractOptions& opt) {
  std::vector<LevelPoint> out;
  int consecutive_failures = 0;
  int attempts = 0;
  const int attempt_cap = 200 * std::max(count, 1);
  while (int(out.size()) < count) {
    if (attempts++ > attempt_cap)
      throw Error(ErrorKind::Infeasible, "sampler exhausted its attempt budget",
                  double(attempts));
    const Eigen::VectorXd y = rng.sphere_point(int(2 * A.complex_dim()));
    try {
      Eigen::VectorXd z = retract(A, y, opt);
      bool degenerate = false;
      for (int i = 0; i < A.rank(); ++i)
        degenerate = degenerate || A.fundamental_field(i, z).norm() < 1e-6;
      if (degenerate) continue;  // too close to a fixed-point locus
      out.push_back(make_level_point(A, z));
      consecutive_failures = 0;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::RetractionFailure || e.kind() == ErrorKind::Regularity) {
        if (++consecutive_failures >= 64)
          throw Error(ErrorKind::Infeasible, "no retraction converged from 64 seeds", e.datum());
        continue;
      }
      throw;
    }
  }
  return out;
}

Eigen::VectorXd level_project(const LevelPoint& p, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = sphere_project(p.z, v);
  for (const Eigen::VectorXd& nu : p.normal) w -= w.dot(nu) * nu;
  return w;
}

Eigen::VectorXd hor_project(const LevelPoint& p, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = level_project(p, v);
  for (const Eigen::VectorXd& x : p.vertical_on) w -= w.dot(x) * x;
  return w;
}

double shape_form_closed_row(const Eigen::VectorXd& weight_row, const Eigen::VectorXd& z,
                             const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) {
  const Eigen::VectorXd X = mul_i(action::slot_scale(weight_row, z));
  const double nx = X.norm();
  if (nx < 1e-10)
    throw Error(ErrorKind::DegenerateOrbit, "shape form at a vanishing fundamental field", nx);
  // Exact ambient derivative of the linear field X along Y, then the sphere
  // connection is its tangential part.
  const Eigen::VectorXd nablaYX = sphere_project(z, mul_i(action::slot_scale(weight_row, Y)));
  return (X.dot(Y) * eta(z, Z) - phi(z, nablaYX).dot(Z)) / nx;
}

double shape_form_closed(const action::TorusAction& A, const LevelPoint& p, int i,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) {
  return shape_form_closed_row(A.weight_row(i), p.z, Y, Z);
}

double shape_form_direct(const action::TorusAction& A, const LevelPoint& p, int i,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                         const numkit::Stencil& s, const RetractOptions& opt) {
  auto unit_normal = [&](const Eigen::VectorXd& q) {
    const Eigen::VectorXd x = A.fundamental_field(i, q);
    const double nx = x.norm();
    if (nx < 1e-10)
      throw Error(ErrorKind::DegenerateOrbit, "normal field degenerates along the curve", nx, i);
    return Eigen::VectorXd(phi(q, x) / nx);
  };
  const Eigen::VectorXd d = numkit::curve_derivative(
      [&](double t) { return unit_normal(retract(A, p.z + t * Y, opt)); }, s);
  return -sphere_project(p.z, d).dot(Z);
}

namespace {

// Rows of real weights whose fundamental fields are orthonormal at p; the
// matching normals phi Xa are then orthonormal too, which the Gauss chain
// needs.
Eigen::MatrixXd orthonormal_weight_rows(const action::TorusAction& A, const LevelPoint& p) {
  return p.vertical_coeff * A.weights().cast<double>();
}

}  // namespace

double level_curvature(const action::TorusAction& A, const LevelPoint& p, const Eigen::VectorXd& X,
                       const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                       const Eigen::VectorXd& W) {
  double r = Y.dot(Z) * X.dot(W) - X.dot(Z) * Y.dot(W);
  const Eigen::MatrixXd rows = orthonormal_weight_rows(A, p);
  for (int a = 0; a < rows.rows(); ++a) {
    const Eigen::VectorXd w = rows.row(a);
    const double hXW = shape_form_closed_row(w, p.z, X, W);
    const double hYZ = shape_form_closed_row(w, p.z, Y, Z);
    const double hXZ = shape_form_closed_row(w, p.z, X, Z);
    const double hYW = shape_form_closed_row(w, p.z, Y, W);
    r += hXW * hYZ - hXZ * hYW;
  }
  return r;
}

double mixed_curvature_defect(const action::TorusAction& A, const LevelPoint& p,
                              const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                              const Eigen::VectorXd& Z) {
  const Eigen::VectorXd xi = ambient::reeb(p.z);
  const double lhs = level_curvature(A, p, X, xi, Y, Z) - ambient::sphere_r4(X, xi, Y, Z);
  double rhs = 0.0;
  const Eigen::MatrixXd rows = orthonormal_weight_rows(A, p);
  for (int a = 0; a < rows.rows(); ++a) {
    const Eigen::VectorXd w = rows.row(a);
    const Eigen::VectorXd Xa = mul_i(action::slot_scale(w, p.z));
    const Eigen::VectorXd DXXa = sphere_project(p.z, mul_i(action::slot_scale(w, X)));
    rhs -= Xa.dot(Z) * DXXa.dot(phi(p.z, Y)) - Xa.dot(Y) * DXXa.dot(phi(p.z, Z));
  }
  return std::abs(lhs - rhs);
}

double xi_killing_residual(const LevelPoint& p) {
  std::vector<const Eigen::VectorXd*> frame;
  for (const auto& v : p.horizontal) frame.push_back(&v);
  for (const auto& v : p.vertical_on) frame.push_back(&v);
  double res = 0.0;
  for (std::size_t a = 0; a < frame.size(); ++a) {
    for (std::size_t b = a; b < frame.size(); ++b) {
      const Eigen::VectorXd dY = level_project(p, phi(p.z, *frame[a]));
      const Eigen::VectorXd dZ = level_project(p, phi(p.z, *frame[b]));
      res = std::max(res, std::abs(dY.dot(*frame[b]) + dZ.dot(*frame[a])));
    }
  }
  return res;
}

double killing_residual_field(const action::TorusAction& A, const LevelPoint& p,
                              const numkit::VectorFn& field, const numkit::Stencil& s,
                              const RetractOptions& opt) {
  std::vector<const Eigen::VectorXd*> frame;
  for (const auto& v : p.horizontal) frame.push_back(&v);
  for (const auto& v : p.vertical_on) frame.push_back(&v);
  auto covariant = [&](const Eigen::VectorXd& Y) {
    const Eigen::VectorXd d = numkit::curve_derivative(
        [&](double t) { return field(retract(A, p.z + t * Y, opt)); }, s);
    return level_project(p, d);
  };
  std::vector<Eigen::VectorXd> derivs;
  for (const auto* v : frame) derivs.push_back(covariant(*v));
  double res = 0.0;
  for (std::size_t a = 0; a < frame.size(); ++a)
    for (std::size_t b = a; b < frame.size(); ++b)
      res = std::max(res, std::abs(derivs[a].dot(*frame[b]) + derivs[b].dot(*frame[a])));
  return res;
}

}  // namespace sasred::levelset
