#pragma once

#include <Eigen/Core>
#include <vector>

#include "sasred/action.hpp"
#include "sasred/numkit.hpp"
#include "sasred/rng.hpp"

// Geometry of the zero set of the moment map inside the sphere: Newton
// retraction, adapted frames, second fundamental forms computed two
// independent ways, the Gauss-equation curvature chain and Killing checks.

namespace sasred::levelset {

struct RetractOptions {
  double tol = 1e-12;  // on max_i |mu_i|
  int max_iter = 50;
};

// A point of mu^{-1}(0) with its adapted frames.  With n the complex
// dimension and d the action rank, the sphere tangent space splits as
//   vertical (d)  +  horizontal (2n - 2d - 1)    [tangent to the level set]
//   normal-in-sphere (d)                         [spanned by the phi X_i]
// and xi is the first horizontal vector.
struct LevelPoint {
  Eigen::VectorXd z;
  std::vector<Eigen::VectorXd> vertical;       // raw X_i(z)
  std::vector<Eigen::VectorXd> vertical_on;    // orthonormalized verticals
  Eigen::MatrixXd vertical_coeff;              // vertical_on[a] = sum_i coeff(a,i) X_i
  std::vector<Eigen::VectorXd> normal;         // orthonormalized from phi X_i
  Eigen::MatrixXd normal_coeff;                // normal[a] = sum_i coeff(a,i) phi X_i
  std::vector<Eigen::VectorXd> horizontal;     // orthonormal, xi first
  int n = 0;  // complex dimension
  int d = 0;  // action rank
};

// Assemble the frames at a point already on the level set (checked).
// Throws Error(DegenerateOrbit) when some X_i nearly vanishes and
// Error(Precondition) when z is off the sphere or off the level set.
LevelPoint make_level_point(const action::TorusAction& A, const Eigen::VectorXd& z);

// Newton retraction: normalize y to the sphere, then correct along the
// sphere-tangential moment gradients (Gram solve, damped by halving) until
// max_i |mu_i| < tol; one extra polish step keeps the map smooth for
// downstream finite differences.  Throws Error(Infeasible) when a weight row
// has a fixed sign (empty zero set), Error(Regularity) when the correction
// Gram system degenerates, Error(RetractionFailure) on non-convergence.
Eigen::VectorXd retract(const action::TorusAction& A, const Eigen::VectorXd& y,
                        const RetractOptions& opt = {});

LevelPoint retract_point(const action::TorusAction& A, const Eigen::VectorXd& y,
                         const RetractOptions& opt = {});

// Random level points; rejects samples within 1e-6 of a fixed-point locus
// and raises Error(Infeasible) after 64 consecutive failed seeds.
std::vector<LevelPoint> sample_level_points(const action::TorusAction& A, int count, Rng& rng,
                                            const RetractOptions& opt = {});

// Orthogonal projections at p: onto the level-set tangent space and onto the
// horizontal subspace (tangent and orthogonal to every X_i).
Eigen::VectorXd level_project(const LevelPoint& p, const Eigen::VectorXd& v);
Eigen::VectorXd hor_project(const LevelPoint& p, const Eigen::VectorXd& v);

// Second fundamental form h_i(Y, Z) = g(A_i Y, Z) for the unit normal
// phi X_i / ||X_i||, evaluated from the closed form
//   ||X_i||^{-1} { g(X_i, Y) eta(Z) - g(phi P(i (w_i (.) Y)), Z) }
// whose only derivative is the exact ambient derivative of X_i.  The weight
// row may be any real combination of the generator rows (weight_row
// argument), which is what the orthonormalized Gauss chain feeds in.
double shape_form_closed(const action::TorusAction& A, const LevelPoint& p, int i,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z);
double shape_form_closed_row(const Eigen::VectorXd& weight_row, const Eigen::VectorXd& z,
                             const Eigen::VectorXd& Y, const Eigen::VectorXd& Z);

// The same tensor from its definition: finite-difference derivative of the
// unit normal field phi X_i / ||X_i|| along a retraction curve through p.
double shape_form_direct(const action::TorusAction& A, const LevelPoint& p, int i,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                         const numkit::Stencil& s, const RetractOptions& opt = {});

// Gauss-equation curvature of the level set,
//   R(X,Y,Z,W) = <Y,Z><X,W> - <X,Z><Y,W>
//              + sum_a [ h_a(X,W) h_a(Y,Z) - h_a(X,Z) h_a(Y,W) ]
// with the pointwise-orthonormalized normal directions a; this sign
// convention reproduces the round-sphere tensor when d = 0.
double level_curvature(const action::TorusAction& A, const LevelPoint& p, const Eigen::VectorXd& X,
                       const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                       const Eigen::VectorXd& W);

// Mixed-slot curvature defect against the ambient sphere: for X, Y, Z
// tangent to the level set and orthogonal to xi, both sides of
//   R^{level}(X, xi, Y, Z) - R^{sphere}(X, xi, Y, Z)
//     = -sum_a { g(Xa,Z) g(D_X Xa, phi Y) - g(Xa,Y) g(D_X Xa, phi Z) }
// are computed independently (left: Gauss chain; right: exact derivatives
// over the orthonormalized generator combinations Xa); returns |lhs - rhs|.
double mixed_curvature_defect(const action::TorusAction& A, const LevelPoint& p,
                              const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                              const Eigen::VectorXd& Z);

// Killing residual of xi on the level set, using the exact derivative of
// xi = i z: max over horizontal frame pairs of |g(P phi Y, Z) + g(P phi Z, Y)|.
double xi_killing_residual(const LevelPoint& p);

// Killing residual of an arbitrary tangent field given by a callback,
// derivatives by finite differences along retraction curves; the negative
// controls feed non-Killing fields through this.
double killing_residual_field(const action::TorusAction& A, const LevelPoint& p,
                              const numkit::VectorFn& field, const numkit::Stencil& s,
                              const RetractOptions& opt = {});

}  // namespace sasred::levelset
