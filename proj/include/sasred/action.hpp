#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "sasred/ambient.hpp"
#include "sasred/numkit.hpp"
#include "sasred/rng.hpp"

// Weighted torus actions on the sphere: fundamental fields, contact and cone
// moment maps, invariance diagnostics and regularity verdicts.

namespace sasred::action {

// Slotwise scaling w (.) v: complex slot j of v multiplied by the real
// number w(j).  Weight rows enter every exact derivative formula this way.
Eigen::VectorXd slot_scale(const Eigen::VectorXd& w, const Eigen::VectorXd& v);

class TorusAction {
 public:
  // weights: d x n integer matrix; row i generates the circle
  // (e^{i w_{i0} t} z_0, ..., e^{i w_{i,n-1} t} z_{n-1}).
  // Throws Error(Precondition) on an all-zero row.
  explicit TorusAction(Eigen::MatrixXi weights);

  // The trivial action (d = 0) on C^n, useful as a control: the level set is
  // the whole sphere and reduction is the identity.
  static TorusAction trivial(int n);

  const Eigen::MatrixXi& weights() const { return weights_; }
  int rank() const { return int(weights_.rows()); }
  int complex_dim() const { return int(weights_.cols()); }
  Eigen::VectorXd weight_row(int i) const { return weights_.row(i).cast<double>(); }

  // Fundamental field X_i(z) = i (w_i (.) z); sphere-tangent.
  Eigen::VectorXd fundamental_field(int i, const Eigen::VectorXd& z) const;

  // mu_i(z) = sum_j w_ij |z_j|^2.
  Eigen::VectorXd moment(const Eigen::VectorXd& z) const;

  // Ambient gradient of mu_i: 2 (w_i (.) z).
  Eigen::VectorXd moment_gradient(int i, const Eigen::VectorXd& z) const;
  Eigen::MatrixXd moment_jacobian(const Eigen::VectorXd& z) const;  // rows = gradients

  // Phi_i(z, r) = r^2 mu_i(z), normalized so Phi at r = 1 restricts to mu.
  Eigen::VectorXd cone_moment(const ambient::ConePoint& p) const;

  // Exact flow e^{i W t} (.) v for t in R^d: slot j rotates by sum_i t_i w_ij.
  // Linear in v, so it transports tangent vectors as well as points.
  Eigen::VectorXd flow(const Eigen::VectorXd& v, const Eigen::VectorXd& t) const;

 private:
  Eigen::MatrixXi weights_;
};

// max_i |mu_i(z) - eta(X_i(z))|; both sides expand to the same sum, so this
// is a pure algebra identity.
double moment_reeb_residual(const TorusAction& A, const Eigen::VectorXd& z);

// Lie-derivative residuals along each generator, measured on the exact flow
// (finite differences only in the flow time).
struct InvarianceResiduals {
  double metric = 0.0;        // L_{X_i} g
  double contact = 0.0;       // L_{X_i} eta
  double reeb_bracket = 0.0;  // [X_i, xi]
  double max() const;
};
InvarianceResiduals invariance_residuals(const TorusAction& A, const Eigen::VectorXd& z, Rng& rng,
                                         int pairs, const numkit::Stencil& s);

// Generic metric Lie-derivative residual for a one-parameter family of maps
// together with its differential; the invariance suite uses the exact torus
// rotations, negative controls feed non-isometric flows.
using FlowFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;
using DFlowFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double, const Eigen::VectorXd&)>;
double metric_lie_residual(const FlowFn& flow, const DFlowFn& dflow, const Eigen::VectorXd& z,
                           Rng& rng, int pairs, const numkit::Stencil& s);

// max_{i<j} ||[X_i, X_j]|| at z, brackets by finite differences.
double commutator_residual(const TorusAction& A, const Eigen::VectorXd& z,
                           const numkit::Stencil& s);

struct RegularityVerdict {
  bool regular = false;
  double min_singular = 0.0;  // of the sphere-tangential moment differentials
  std::string reason;
};

// For d = 1 a closed-form precheck on the weights (all nonzero, gcd one,
// both signs); for every d, the minimal singular value over the samples of
// d mu restricted to sphere tangent spaces must exceed 1e-6.
RegularityVerdict regularity_check(const TorusAction& A,
                                   const std::vector<Eigen::VectorXd>& samples);

// The proportionality kappa in  iota_{X_i} omega = kappa * d Phi_i  measured
// against finite-difference differentials of Phi_i at p; recorded, never
// assumed.  Throws Error(Precondition) if every probe direction annihilates
// both sides.
double measured_cone_moment_factor(const TorusAction& A, const ambient::Cone& cone,
                                   const ambient::ConePoint& p, int i, std::uint64_t seed,
                                   const numkit::Stencil& s);

}  // namespace sasred::action
