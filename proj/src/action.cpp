#include "sasred/action.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "sasred/errors.hpp"

namespace sasred::action {

Eigen::VectorXd slot_scale(const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  const int n = ambient::complex_dim(v);
  if (w.size() != n)
    throw Error(ErrorKind::Precondition, "weight row length must match the complex dimension",
                double(w.size()));
  Eigen::VectorXd out(v.size());
  for (int j = 0; j < n; ++j) {
    out(2 * j) = w(j) * v(2 * j);
    out(2 * j + 1) = w(j) * v(2 * j + 1);
  }
  return out;
}

TorusAction::TorusAction(Eigen::MatrixXi weights) : weights_(std::move(weights)) {
  if (weights_.cols() < 2)
    throw Error(ErrorKind::Precondition, "action needs complex dimension >= 2",
                double(weights_.cols()));
  for (int i = 0; i < weights_.rows(); ++i)
    if ((weights_.row(i).array() == 0).all())
      throw Error(ErrorKind::Precondition, "all-zero weight row", 0.0, i);
}

TorusAction TorusAction::trivial(int n) { return TorusAction{Eigen::MatrixXi(0, n)}; }

Eigen::VectorXd TorusAction::fundamental_field(int i, const Eigen::VectorXd& z) const {
  return ambient::mul_i(slot_scale(weight_row(i), z));
}

Eigen::VectorXd TorusAction::moment(const Eigen::VectorXd& z) const {
  const int n = ambient::complex_dim(z);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(rank());
  for (int i = 0; i < rank(); ++i)
    for (int j = 0; j < n; ++j)
      mu(i) += weights_(i, j) * (z(2 * j) * z(2 * j) + z(2 * j + 1) * z(2 * j + 1));
  return mu;
}

Eigen::VectorXd TorusAction::moment_gradient(int i, const Eigen::VectorXd& z) const {
  return 2.0 * slot_scale(weight_row(i), z);
}

Eigen::MatrixXd TorusAction::moment_jacobian(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd J(rank(), z.size());
  for (int i = 0; i < rank(); ++i) J.row(i) = moment_gradient(i, z).transpose();
  return J;
}

Eigen::VectorXd TorusAction::cone_moment(const ambient::ConePoint& p) const {
  return p.r * p.r * moment(p.z);
}

Eigen::VectorXd TorusAction::flow(const Eigen::VectorXd& v, const Eigen::VectorXd& t) const {
  if (t.size() != rank())
    throw Error(ErrorKind::Precondition, "flow time must have one entry per circle factor",
                double(t.size()));
  const int n = ambient::complex_dim(v);
  Eigen::VectorXd out = v;
  for (int j = 0; j < n; ++j) {
    double angle = 0.0;
    for (int i = 0; i < rank(); ++i) angle += t(i) * weights_(i, j);
    ambient::rotate_slot(out, j, angle);
  }
  return out;
}

double moment_reeb_residual(const TorusAction& A, const Eigen::VectorXd& z) {
  const Eigen::VectorXd mu = A.moment(z);
  double res = 0.0;
  for (int i = 0; i < A.rank(); ++i)
    res = std::max(res, std::abs(mu(i) - ambient::eta(z, A.fundamental_field(i, z))));
  return res;
}

double InvarianceResiduals::max() const { return std::max({metric, contact, reeb_bracket}); }

double metric_lie_residual(const FlowFn& flow, const DFlowFn& dflow, const Eigen::VectorXd& z,
                           Rng& rng, int pairs, const numkit::Stencil& s) {
  double res = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Eigen::VectorXd y = rng.tangent(z);
    const Eigen::VectorXd w = rng.tangent(z);
    const double d = numkit::curve_derivative(
        numkit::ScalarCurveFn([&](double t) { return dflow(z, t, y).dot(dflow(z, t, w)); }), s);
    res = std::max(res, std::abs(d));
  }
  return res;
}

InvarianceResiduals invariance_residuals(const TorusAction& A, const Eigen::VectorXd& z, Rng& rng,
                                         int pairs, const numkit::Stencil& s) {
  InvarianceResiduals out;
  for (int i = 0; i < A.rank(); ++i) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(A.rank());
    dir(i) = 1.0;
    const FlowFn flow = [&](const Eigen::VectorXd& p, double t) { return A.flow(p, t * dir); };
    // The rotations are linear, so they are their own differential.
    const DFlowFn dflow = [&](const Eigen::VectorXd&, double t, const Eigen::VectorXd& v) {
      return A.flow(v, t * dir);
    };
    out.metric = std::max(out.metric, metric_lie_residual(flow, dflow, z, rng, pairs, s));
    for (int k = 0; k < pairs; ++k) {
      const Eigen::VectorXd y = rng.tangent(z);
      const double d = numkit::curve_derivative(
          numkit::ScalarCurveFn(
              [&](double t) { return ambient::eta(flow(z, t), dflow(z, t, y)); }),
          s);
      out.contact = std::max(out.contact, std::abs(d));
    }
    // [X_i, xi] = d/dt of the reeb field pulled back through the flow.
    const Eigen::VectorXd br = numkit::curve_derivative(
        [&](double t) { return A.flow(ambient::reeb(flow(z, t)), -t * dir); }, s);
    out.reeb_bracket = std::max(out.reeb_bracket, br.norm());
  }
  return out;
}

double commutator_residual(const TorusAction& A, const Eigen::VectorXd& z,
                           const numkit::Stencil& s) {
  double res = 0.0;
  auto field = [&](int i) {
    return numkit::VectorFn(
        [&, i](const Eigen::VectorXd& p) { return A.fundamental_field(i, p); });
  };
  for (int i = 0; i < A.rank(); ++i) {
    for (int j = i + 1; j < A.rank(); ++j) {
      const Eigen::VectorXd xi = A.fundamental_field(i, z);
      const Eigen::VectorXd xj = A.fundamental_field(j, z);
      const Eigen::VectorXd br =
          numkit::curve_derivative(
              [&](double t) { return field(j)(ambient::normalize(z + t * xi)); }, s) -
          numkit::curve_derivative(
              [&](double t) { return field(i)(ambient::normalize(z + t * xj)); }, s);
      res = std::max(res, br.norm());
    }
  }
  return res;
}

RegularityVerdict regularity_check(const TorusAction& A,
                                   const std::vector<Eigen::VectorXd>& samples) {
  RegularityVerdict v;
  if (A.rank() == 1) {
    const auto row = A.weights().row(0);
    bool pos = false, neg = false;
    int g = 0;
    for (int j = 0; j < row.size(); ++j) {
      if (row(j) == 0) {
        v.reason = "a weight vanishes";
        return v;
      }
      pos = pos || row(j) > 0;
      neg = neg || row(j) < 0;
      g = std::gcd(g, std::abs(row(j)));
    }
    if (!(pos && neg)) {
      v.reason = "weights do not change sign";
      return v;
    }
    if (g != 1) {
      v.reason = "weights share a common factor " + std::to_string(g);
      return v;
    }
  }
  double min_sv = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& z : samples) {
    Eigen::MatrixXd G(A.rank(), z.size());
    for (int i = 0; i < A.rank(); ++i)
      G.row(i) = ambient::sphere_project(z, A.moment_gradient(i, z)).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const auto& sv = svd.singularValues();
    min_sv = std::min(min_sv, sv.size() > 0 ? sv(sv.size() - 1) : 0.0);
  }
  v.min_singular = samples.empty() ? 0.0 : min_sv;
  if (A.rank() > 0 && samples.empty()) {
    v.reason = "no samples supplied";
    return v;
  }
  if (A.rank() > 0 && v.min_singular <= 1e-6) {
    v.reason = "moment differential loses rank on a sample";
    return v;
  }
  v.regular = true;
  v.reason = "regular";
  return v;
}

double measured_cone_moment_factor(const TorusAction& A, const ambient::Cone& cone,
                                   const ambient::ConePoint& p, int i, std::uint64_t seed,
                                   const numkit::Stencil& s) {
  Rng rng(seed);
  const ambient::ConeVec X{A.fundamental_field(i, p.z), 0.0};
  double acc = 0.0;
  int used = 0;
  for (int k = 0; k < 16; ++k) {
    ambient::ConeVec u{rng.tangent(p.z), rng.uniform(-1.0, 1.0)};
    const double dphi = numkit::curve_derivative(
        numkit::ScalarCurveFn([&](double t) { return A.cone_moment(cone.move(p, u, t))(i); }), s);
    if (std::abs(dphi) < 1e-6) continue;
    acc += cone.kahler_form(p, X, u) / dphi;
    ++used;
  }
  if (used == 0)
    throw Error(ErrorKind::Precondition, "every probe annihilates the moment differential", 0.0);
  return acc / used;
}

}  // namespace sasred::action
