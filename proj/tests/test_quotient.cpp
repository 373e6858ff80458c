#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "sasred/ambient.hpp"
#include "sasred/action.hpp"
#include "sasred/errors.hpp"
#include "sasred/levelset.hpp"
#include "sasred/quotient.hpp"
#include "sasred/rng.hpp"

using namespace sasred;
using action::TorusAction;

namespace {

TorusAction quad_action() {
  Eigen::MatrixXi m(1, 4);
  m << 1, 1, -1, -1;
  return TorusAction(m);
}

quotient::SliceChart quad_chart(std::uint64_t seed) {
  const TorusAction A = quad_action();
  Rng rng(seed);
  const auto pts = levelset::sample_level_points(A, 1, rng);
  return quotient::make_chart(A, pts.front());
}

Eigen::VectorXd small_u(const quotient::SliceChart& C, Rng& rng, double scale = 0.02) {
  Eigen::VectorXd u = rng.gauss_vector(C.m());
  u *= scale / u.norm();
  return u;
}

}  // namespace

TEST_CASE("trivial action: the chart engine reproduces the round sphere") {
  const TorusAction A = TorusAction::trivial(3);
  Rng rng(61);
  const auto pts = levelset::sample_level_points(A, 1, rng);
  const auto C = quotient::make_chart(A, pts.front());
  CHECK(C.m() == 5);

  std::vector<Eigen::VectorXd> us = {Eigen::VectorXd::Zero(5)};
  for (int t = 0; t < 4; ++t) us.push_back(small_u(C, rng));
  const auto fit = quotient::einstein_fit(C, us);
  CHECK(fit.points == 5);
  CHECK(std::abs(fit.constant - 4.0) < 1e-5);  // Ric = (m - 1) g on the unit sphere
  CHECK(fit.max_residual < 1e-4);

  CHECK(quotient::sasaki_residual(C, us[1]) < 1e-4);
}

TEST_CASE("chart basics at the center") {
  const auto C = quad_chart(62);
  CHECK(C.m() == 5);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(C.m());
  const auto s = numkit::Stencil::first_derivative();

  const Eigen::MatrixXd g = quotient::reduced_metric(C, zero, s);
  CHECK((g - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  CHECK(es.eigenvalues().minCoeff() > 0.9);

  const Eigen::VectorXd zeta = quotient::reduced_reeb(C, zero, s);
  CHECK(std::abs(zeta.dot(g * zeta) - 1.0) < 1e-8);
  const Eigen::VectorXd etap = quotient::reduced_contact(C, zero, s);
  CHECK(std::abs(etap.dot(zeta) - 1.0) < 1e-8);
  // With xi leading the frame, the Reeb coordinates concentrate there.
  CHECK(std::abs(zeta(0) - 1.0) < 1e-8);
  CHECK(zeta.tail(4).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("chart points outside the trust radius are rejected") {
  const auto C = quad_chart(63);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(C.m());
  u(1) = 2.0 * C.chart_radius;
  CHECK_THROWS_AS(quotient::chart_point(C, u), Error);
  try {
    quotient::chart_point(C, u);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("coordinate curvature tensor satisfies its symmetries") {
  const auto C = quad_chart(64);
  Rng rng(640);
  const Eigen::VectorXd u = small_u(C, rng);
  const auto curv = quotient::curvature_in_chart(C, u);
  const int m = curv.m;

  CHECK((curv.ricci - curv.ricci.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  double antisym_cd = 0.0, antisym_ab = 0.0, pair_sym = 0.0, bianchi = 0.0;
  for (int c = 0; c < m; ++c)
    for (int d = 0; d < m; ++d)
      for (int b = 0; b < m; ++b)
        for (int a = 0; a < m; ++a) {
          const double r = curv.r4(c, d, b, a);
          antisym_cd = std::max(antisym_cd, std::abs(r + curv.r4(d, c, b, a)));
          antisym_ab = std::max(antisym_ab, std::abs(r + curv.r4(c, d, a, b)));
          pair_sym = std::max(pair_sym, std::abs(r - curv.r4(b, a, c, d)));
          bianchi = std::max(bianchi,
                             std::abs(r + curv.r4(d, b, c, a) + curv.r4(b, c, d, a)));
        }
  CHECK(antisym_cd < 1e-12);  // exact by construction
  CHECK(antisym_ab < 1e-6);
  CHECK(pair_sym < 1e-6);
  CHECK(bianchi < 1e-6);

  // The coefficient-vector contraction agrees with the index form.
  Eigen::VectorXd X = Eigen::VectorXd::Unit(m, 1), Y = Eigen::VectorXd::Unit(m, 2),
                  Z = Eigen::VectorXd::Unit(m, 0), W = Eigen::VectorXd::Unit(m, 3);
  CHECK(std::abs(curv.r4(X, Y, Z, W) - curv.r4(1, 2, 0, 3)) < 1e-14);
}

TEST_CASE("the reduced structure is Sasakian and detuning the metric breaks it") {
  const auto C = quad_chart(65);
  Rng rng(650);
  for (int t = 0; t < 3; ++t) {
    const Eigen::VectorXd u = small_u(C, rng);
    CHECK(quotient::sasaki_residual(C, u) < 1e-4);
  }
  const Eigen::VectorXd u = small_u(C, rng);
  CHECK(quotient::sasaki_residual(C, u, 2.0) > 0.1);
}

TEST_CASE("the reduced Reeb field is Killing, constant coordinate fields are not") {
  const auto C = quad_chart(66);
  Rng rng(660);
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(C.m());
  CHECK(quotient::killing_residual_zeta(C, center) < 1e-4);
  const Eigen::VectorXd u = small_u(C, rng, 0.03);
  CHECK(quotient::killing_residual_zeta(C, u) < 1e-4);

  // Negative control off-center: a constant coordinate field drags the
  // metric, so some |d_k g_ab| is of the order of the curvature times |u|
  // (about 0.2 here, against 1e-12 noise at the chart center).
  double worst = 0.0;
  for (int k = 0; k < C.m(); ++k)
    worst = std::max(worst, quotient::killing_residual_coordinate_field(C, u, k));
  CHECK(worst > 1e-2);
}

TEST_CASE("Ricci fit: eta-Einstein constants of the balanced four-slot action") {
  const TorusAction A = quad_action();
  Rng rng(68);
  const auto bases = levelset::sample_level_points(A, 2, rng);
  quotient::EinsteinAccumulator acc;
  const auto s1 = numkit::Stencil{1e-3, 2, 1};
  const auto s2 = numkit::Stencil{5e-3, 2, 2};
  for (const auto& b : bases) {
    const auto C = quotient::make_chart(A, b);
    for (int t = 0; t < 6; ++t) {
      const Eigen::VectorXd u = small_u(C, rng);
      const auto curv = quotient::curvature_in_chart(C, u, s1, s2);
      acc.add(curv, quotient::reduced_reeb(C, u, numkit::Stencil::first_derivative()));
    }
  }
  const auto eta = acc.eta_fit();
  CHECK(std::abs(eta.lambda - 6.0) < 1e-4);
  CHECK(std::abs(eta.nu + 2.0) < 1e-4);
  CHECK(eta.max_residual < 1e-4);

  // The one-parameter fit cannot absorb the eta term; its pointwise residual
  // stays at the fixed tensor distance |nu| sqrt(1 - 1/m) = sqrt(3.2).
  const auto flat = acc.fit();
  CHECK(std::abs(flat.constant - 5.6) < 1e-4);
  CHECK(flat.max_residual > 1.0);
}

TEST_CASE("O'Neill tensor: A(., xi) vanishes and the crosscheck closes") {
  const TorusAction A = quad_action();
  Rng rng(69);
  const auto pts = levelset::sample_level_points(A, 5, rng);
  const auto s = numkit::Stencil::first_derivative();
  for (const auto& p : pts) CHECK(quotient::oneill_xi_residual(A, p, s) < 1e-8);

  const auto C = quotient::make_chart(A, pts.front());
  CHECK(quotient::oneill_crosscheck(C) < 1e-4);
}

TEST_CASE("cone retraction corrects both the direction and the radius") {
  const TorusAction A = quad_action();
  Rng rng(70);
  const auto pts = levelset::sample_level_points(A, 3, rng);
  for (const auto& p : pts) {
    Eigen::VectorXd seed_dir = ambient::normalize(p.z + 0.05 * rng.tangent(p.z));
    const auto out = quotient::cone_retract(A, {seed_dir, 1.3});
    CHECK(A.moment(out.z).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(out.z.norm() - 1.0) < 1e-12);
    CHECK(out.r > 0.0);
    CHECK(std::abs(out.r - 1.3) < 0.2);
  }
}

TEST_CASE("horizontal lifts commute with the cone dilations") {
  const auto C = quad_chart(71);
  const auto res = quotient::cone_commutation(C, {0.5, 1.0, 2.0}, 6, 710);
  CHECK(res.metric_deviation < 1e-6);
  CHECK(res.radial_deviation < 1e-6);
  CHECK(res.mixed_deviation < 1e-6);
  CHECK(res.section_drift < 1e-6);
}

TEST_CASE("the reduced contact form is nondegenerate transverse to the Reeb direction") {
  const auto C = quad_chart(72);
  const double sigma = quotient::contact_nondegeneracy(C, Eigen::VectorXd::Zero(C.m()));
  CHECK(sigma > 1e-6);
  CHECK(std::abs(sigma - 2.0) < 1e-3);
}
