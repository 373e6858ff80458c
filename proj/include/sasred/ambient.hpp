#pragma once

#include <Eigen/Core>
#include <vector>

#include "sasred/numkit.hpp"

// The ambient stage: the unit sphere S^{2n-1} inside C^n with its standard
// Sasakian structure, and the metric cone over it.
//
// A point of C^n is stored as a real vector of length 2n with interleaved
// components [x0, y0, x1, y1, ...], so multiplication by i is the rotation
// (x, y) -> (-y, x) applied slotwise.  All tensors below act on these real
// coordinates; the round metric is the Euclidean dot product.

namespace sasred::ambient {

// Complex dimension n of C^n for a real vector of length 2n.
int complex_dim(const Eigen::VectorXd& v);

// Slotwise multiplication by i.
Eigen::VectorXd mul_i(const Eigen::VectorXd& v);

// Complex scalar multiplication by e^{i t} on a single slot, applied with
// exact trigonometry (used by torus flows, so it must stay on the sphere).
void rotate_slot(Eigen::VectorXd& v, int slot, double angle);

// Reeb field xi(z) = i z.
Eigen::VectorXd reeb(const Eigen::VectorXd& z);

// Contact form eta(Y) = <i z, Y>.
double eta(const Eigen::VectorXd& z, const Eigen::VectorXd& y);

// Tensor phi at z: phi(Y) = i Y + eta(Y) z, the tangential part of i Y.
Eigen::VectorXd phi(const Eigen::VectorXd& z, const Eigen::VectorXd& y);

// Orthogonal projection onto T_z S^{2n-1}.
Eigen::VectorXd sphere_project(const Eigen::VectorXd& z, const Eigen::VectorXd& y);

// Radial projection onto the sphere; throws Error(EvaluationDomain) near 0.
Eigen::VectorXd normalize(const Eigen::VectorXd& v);

// Constant-curvature-one curvature operator R(X,Y)Z = <Y,Z>X - <X,Z>Y.
Eigen::VectorXd sphere_curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& z);

// R(X,Y,Z,W) = <R(X,Y)Z, W>.
double sphere_r4(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                 const Eigen::VectorXd& w);

// Levi-Civita derivative on the sphere of the field W along the curve
// t -> normalize(z + t y): project the flat derivative of W back to T_z.
// W is sampled through a callback on sphere points.
Eigen::VectorXd sphere_covariant(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                 const numkit::VectorFn& field, const numkit::Stencil& s);

// Exterior derivative of eta measured on tangent vectors by differentiating
// the projected constant extensions of x and y; for the round structure the
// result equals factor * <phi x, y> with a universal factor.
double deta(const Eigen::VectorXd& z, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
            const numkit::Stencil& s);

// The constant c in d eta(X, Y) = c * <X, phi Y>, averaged over the supplied
// tangent pairs.  Pairs with |<x, phi y>| below 1e-6 are skipped; throws
// Error(Precondition) if every pair degenerates.  Nothing downstream assumes
// a value for c: it is calibrated here and recorded in reports.
double measured_deta_factor(const Eigen::VectorXd& z,
                            const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                            const numkit::Stencil& s);

// ---------------------------------------------------------------------------
// The metric cone C(S^{2n-1}) = R_{>0} x S^{2n-1} with g_C = dr^2 + r^2 g.
// Points are (z, r) with z on the sphere; tangent vectors are (Y, a) with Y
// tangent at z.  The almost complex structure rotates the Reeb/radial plane
// into itself and acts as phi on the contact distribution.

struct ConePoint {
  Eigen::VectorXd z;
  double r = 1.0;
};

struct ConeVec {
  Eigen::VectorXd y;
  double a = 0.0;
};

using ConeField = std::function<ConeVec(const ConePoint&)>;

// Almost complex cone over the sphere.  phi_scale = 1 gives the integrable
// Kaehler structure; other values are a deliberate detuning used by negative
// controls (they break both closedness of the form and the Nijenhuis tensor).
struct Cone {
  double phi_scale = 1.0;

  double metric(const ConePoint& p, const ConeVec& u, const ConeVec& v) const;
  ConeVec complex_structure(const ConePoint& p, const ConeVec& u) const;
  // omega(U, V) = g_C(J U, V).
  double kahler_form(const ConePoint& p, const ConeVec& u, const ConeVec& v) const;

  // Straight-line move in the flat chart, sphere part re-normalized; the
  // canonical curve through p in direction u for finite differencing.
  ConePoint move(const ConePoint& p, const ConeVec& u, double t) const;

  // Extend a tangent vector at p to a field near p: constant components in
  // the flat chart, sphere part projected to the tangent space at each point.
  ConeField constant_extension(const ConePoint& p, const ConeVec& u) const;

  // Lie bracket [U, V] of two cone fields by centered differences of their
  // flat components along each other's flows.
  ConeVec bracket(const ConeField& u, const ConeField& v, const ConePoint& p,
                  const numkit::Stencil& s) const;

  // d omega(U, V, W) for the constant extensions of three tangent vectors,
  // assembled from the invariant formula for the exterior derivative.
  double d_kahler(const ConePoint& p, const ConeVec& u, const ConeVec& v, const ConeVec& w,
                  const numkit::Stencil& s) const;

  // Nijenhuis tensor N_J(U, V) on constant extensions.
  ConeVec nijenhuis(const ConePoint& p, const ConeVec& u, const ConeVec& v,
                    const numkit::Stencil& s) const;
};

// Largest |d omega| and |N_J| over random triples/pairs at the given points.
struct KahlerResiduals {
  double d_omega = 0.0;
  double nijenhuis = 0.0;
};
KahlerResiduals kahler_residuals(const Cone& cone, const std::vector<ConePoint>& points,
                                 int directions_per_point, std::uint64_t seed,
                                 const numkit::Stencil& s);

// Scaling exponents of the cone structure under the dilation r -> t r (which
// pushes a tangent vector (Y, a) to (Y, t a)): the fitted power s in
// q(t) = t^s for the Kaehler form on a fixed pair, for the one-form r^2 eta,
// and for the deliberately degree-one form r eta (negative control).
// Fits sample t in {1/2, 1/sqrt 2, sqrt 2, 2}.
struct ScalingExponents {
  numkit::PowerFit omega;           // homogeneity degree of omega
  numkit::PowerFit potential;       // homogeneity degree of r^2 eta
  numkit::PowerFit radial_control;  // homogeneity degree of r eta
};
ScalingExponents cone_scaling(const Cone& cone, const ConePoint& p, std::uint64_t seed);

// Ratio of the numerical exterior derivative of the one-form r^2 eta to the
// metric Kaehler form, averaged over sample pairs at p; relates the two
// normalizations without assuming either.
double measured_potential_factor(const Cone& cone, const ConePoint& p, int pairs,
                                 std::uint64_t seed, const numkit::Stencil& s);

}  // namespace sasred::ambient
