#pragma once

#include <Eigen/Core>
#include <vector>

#include "sasred/levelset.hpp"

// The reduced space through local slice charts: quotient metric, projected
// Reeb field, finite-difference curvature, the Sasakian/Einstein/Killing
// verifiers, O'Neill cross-checks and the cone-commutation test.

namespace sasred::quotient {

// A horizontal disk through a level point.  psi(u) = retract(z + sum u_a e_a)
// parametrizes a slice transverse to the orbits, so horizontal inner products
// along it realize the quotient metric in coordinates.
struct SliceChart {
  action::TorusAction action;
  levelset::LevelPoint base;
  std::vector<Eigen::VectorXd> frame;  // orthonormal horizontal basis, xi first
  double chart_radius = 5e-2;
  levelset::RetractOptions retract_opts;

  int m() const { return int(frame.size()); }
};

SliceChart make_chart(const action::TorusAction& A, const levelset::LevelPoint& base,
                      double chart_radius = 5e-2);

// psi(u); throws Error(Precondition) outside the chart radius.
levelset::LevelPoint chart_point(const SliceChart& C, const Eigen::VectorXd& u);

// d psi(u) e_a by finite differences, denoised to the level tangent space.
std::vector<Eigen::VectorXd> chart_tangents(const SliceChart& C, const Eigen::VectorXd& u,
                                            const numkit::Stencil& s);

// Quotient metric in chart coordinates: g_ab = <hor dpsi_a, hor dpsi_b>.
Eigen::MatrixXd reduced_metric(const SliceChart& C, const Eigen::VectorXd& u,
                               const numkit::Stencil& s);

// Chart coordinates of the projected Reeb field: least-squares solve of
// xi = sum_a c_a dpsi_a + vertical.
Eigen::VectorXd reduced_reeb(const SliceChart& C, const Eigen::VectorXd& u,
                             const numkit::Stencil& s);

// Reduced contact form: eta'_a = eta(dpsi_a).
Eigen::VectorXd reduced_contact(const SliceChart& C, const Eigen::VectorXd& u,
                                const numkit::Stencil& s);

// Coordinate curvature data at one chart point, from finite differences of
// the metric: Christoffel symbols out of first derivatives, the Riemann
// tensor out of second, Ricci by contraction.  metric_scale multiplies the
// measured metric before everything else runs (negative controls detune the
// Sasaki normalization this way).
struct ChartCurvature {
  int m = 0;
  Eigen::MatrixXd g, g_inv;
  std::vector<Eigen::MatrixXd> dg;      // dg[c](a,b) = d_c g_ab
  std::vector<Eigen::MatrixXd> gamma;   // gamma[a](b,c)
  std::vector<double> riem;             // R^a_{bcd}, component a of R(d_c, d_d) d_b
  Eigen::MatrixXd ricci;                // Ric(d_d, d_b) = sum_c R^c_{bcd}

  double r_up(int a, int b, int c, int d) const { return riem[((a * m + b) * m + c) * m + d]; }
  // R(X, Y, Z, W) = g(R(X, Y) Z, W) on coordinate indices.
  double r4(int c, int d, int b, int a) const;
  // Same contraction on coefficient vectors.
  double r4(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
            const Eigen::VectorXd& W) const;
};

ChartCurvature curvature_in_chart(const SliceChart& C, const Eigen::VectorXd& u,
                                  const numkit::Stencil& first, const numkit::Stencil& second,
                                  double metric_scale = 1.0);
ChartCurvature curvature_in_chart(const SliceChart& C, const Eigen::VectorXd& u,
                                  double metric_scale = 1.0);

// max over coordinate pairs (X, Y) of || R(X, zeta) Y - (g(zeta,Y) X - g(X,Y) zeta) ||_g
// with zeta normalized to unit length in the (possibly scaled) metric.
double sasaki_residual(const SliceChart& C, const Eigen::VectorXd& u, double metric_scale = 1.0);

// Same residual from precomputed pieces, so callers can share one curvature
// evaluation between several checks.
double sasaki_residual(const ChartCurvature& curv, const Eigen::VectorXd& zeta);

// Coordinate Killing operator residual for the reduced Reeb field:
// max_ab | zeta^c d_c g_ab + g_cb d_a zeta^c + g_ac d_b zeta^c |.
double killing_residual_zeta(const SliceChart& C, const Eigen::VectorXd& u);

// Variant that reuses the metric and its derivatives from a curvature
// evaluation at the same u (with metric_scale 1).
double killing_residual_zeta(const SliceChart& C, const Eigen::VectorXd& u,
                             const ChartCurvature& curv);

// Same operator on the constant coordinate field e_k; a genuinely
// non-isometric direction serves as the negative control.
double killing_residual_coordinate_field(const SliceChart& C, const Eigen::VectorXd& u, int k);

struct EinsteinFit {
  double constant = 0.0;
  double max_residual = 0.0;  // max over points of ||Ric - c g||_g
  int points = 0;
};

// Two-parameter refinement Ric ~ lambda g + nu (g zeta)(g zeta)^T, reported
// alongside the one-parameter fit whenever the latter is poor.
struct EtaEinsteinFit {
  double lambda = 0.0;
  double nu = 0.0;
  double max_residual = 0.0;
  int points = 0;
};

// Pools Ricci samples across chart points (and, by repeated calls on the
// same accumulator, across charts).
class EinsteinAccumulator {
 public:
  void add(const ChartCurvature& c, const Eigen::VectorXd& zeta);
  EinsteinFit fit() const;
  EtaEinsteinFit eta_fit() const;

 private:
  struct Sample {
    Eigen::MatrixXd g_inv_ric;      // g^{-1} Ric
    Eigen::MatrixXd g, g_inv, ric;
    Eigen::VectorXd theta;          // g zeta
  };
  std::vector<Sample> samples_;
};

// Convenience: fit over a list of coordinates in a single chart.
EinsteinFit einstein_fit(const SliceChart& C, const std::vector<Eigen::VectorXd>& points);

// O'Neill tensor A(Y, Z) = vertical part of the level-set covariant
// derivative along Y of the horizontal extension of Z; returned as the
// ambient vertical vector.
Eigen::VectorXd oneill_A(const action::TorusAction& A, const levelset::LevelPoint& p,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                         const numkit::Stencil& s);

// max over the horizontal frame of ||A(Y, xi)||.
double oneill_xi_residual(const action::TorusAction& A, const levelset::LevelPoint& p,
                          const numkit::Stencil& s);

// Mixed curvature components two ways at the chart center: the coordinate
// engine versus the Gauss chain plus the O'Neill correction terms (which the
// A(., xi) = 0 identity makes vanish); returns the max disagreement.
double oneill_crosscheck(const SliceChart& C);

// Newton retraction onto the zero set of the cone moment map, correcting
// both the sphere and the radial coordinate.
ambient::ConePoint cone_retract(const action::TorusAction& A, const ambient::ConePoint& seed,
                                const levelset::RetractOptions& opt = {});

struct ConeCommutation {
  double metric_deviation = 0.0;   // tangent block vs r^2 * reduced metric
  double radial_deviation = 0.0;   // radial block vs 1
  double mixed_deviation = 0.0;    // cross block vs 0
  double section_drift = 0.0;      // cone retractions at different r heights
};

ConeCommutation cone_commutation(const SliceChart& C, const std::vector<double>& r_values,
                                 int samples, std::uint64_t seed);

// Minimal singular value of d eta' restricted to ker eta' at the chart point.
double contact_nondegeneracy(const SliceChart& C, const Eigen::VectorXd& u);

}  // namespace sasred::quotient
