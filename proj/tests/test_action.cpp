#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "sasred/action.hpp"
#include "sasred/ambient.hpp"
#include "sasred/errors.hpp"
#include "sasred/rng.hpp"

using namespace sasred;
using action::TorusAction;

namespace {

Eigen::MatrixXi row_weights(std::initializer_list<int> w) {
  Eigen::MatrixXi m(1, int(w.size()));
  int j = 0;
  for (int v : w) m(0, j++) = v;
  return m;
}

TorusAction pair_action() { return TorusAction(row_weights({1, -1})); }

}  // namespace

TEST_CASE("constructor rejects degenerate weight data") {
  Eigen::MatrixXi zero_row(1, 3);
  zero_row << 2, 0, 0;
  zero_row.row(0).setZero();
  CHECK_THROWS_AS(TorusAction{zero_row}, Error);

  Eigen::MatrixXi narrow(1, 1);
  narrow << 1;
  CHECK_THROWS_AS(TorusAction{narrow}, Error);
}

TEST_CASE("fundamental field matches the derivative of the exact flow") {
  const TorusAction A(row_weights({2, -3, 1}));
  Rng rng(21);
  const auto s = numkit::Stencil::first_derivative();
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd z = rng.sphere_point(6);
    const Eigen::VectorXd fd = numkit::curve_derivative(
        [&](double u) {
          Eigen::VectorXd time = Eigen::VectorXd::Zero(1);
          time(0) = u;
          return A.flow(z, time);
        },
        s);
    CHECK((fd - A.fundamental_field(0, z)).norm() < 1e-9);
    CHECK(std::abs(A.fundamental_field(0, z).dot(z)) < 1e-14);
  }
}

TEST_CASE("moment map agrees with the contact pairing of the generators") {
  const TorusAction A(row_weights({1, 4, -2, -1}));
  Rng rng(22);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd z = rng.sphere_point(8);
    CHECK(action::moment_reeb_residual(A, z) < 1e-12);
    const Eigen::VectorXd mu = A.moment(z);
    CHECK(std::abs(mu(0) - ambient::eta(z, A.fundamental_field(0, z))) < 1e-13);
  }
}

TEST_CASE("moment gradient matches finite differences of the moment") {
  const TorusAction A(row_weights({3, -1}));
  Rng rng(23);
  const auto s = numkit::Stencil::first_derivative();
  const Eigen::VectorXd z = rng.sphere_point(4);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd dir = Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) {
      return rng.uniform(-1.0, 1.0);
    });
    dir.normalize();
    const double fd =
        numkit::curve_derivative([&](double u) { return A.moment(z + u * dir); }, s)(0);
    CHECK(std::abs(fd - A.moment_gradient(0, z).dot(dir)) < 1e-9);
  }
}

TEST_CASE("cone moment is the r-squared extension of the sphere moment") {
  const TorusAction A(row_weights({1, -1, 2}));
  Rng rng(24);
  for (double r : {0.5, 1.0, 1.7}) {
    const Eigen::VectorXd z = rng.sphere_point(6);
    const Eigen::VectorXd lhs = A.cone_moment({z, r});
    CHECK((lhs - r * r * A.moment(z)).norm() < 1e-13);
  }
}

TEST_CASE("exact flow preserves norms and satisfies the group law") {
  const TorusAction A([] {
    Eigen::MatrixXi m(2, 3);
    m << 1, -1, 0, 0, 1, -1;
    return m;
  }());
  Rng rng(25);
  const Eigen::VectorXd z = rng.sphere_point(6);
  Eigen::VectorXd t1(2), t2(2);
  t1 << 0.3, -1.1;
  t2 << 0.9, 0.4;
  CHECK(A.flow(z, t1).norm() == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::VectorXd once = A.flow(A.flow(z, t1), t2);
  const Eigen::VectorXd joint = A.flow(z, t1 + t2);
  CHECK((once - joint).norm() < 1e-14);
}

TEST_CASE("torus rotations are isometries fixing the contact structure") {
  const TorusAction A = pair_action();
  Rng rng(26);
  const auto s = numkit::Stencil::first_derivative();
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd z = rng.sphere_point(4);
    const auto res = action::invariance_residuals(A, z, rng, 4, s);
    CHECK(res.metric < 1e-9);
    CHECK(res.contact < 1e-9);
    CHECK(res.reeb_bracket < 1e-9);
    CHECK(res.max() >= res.metric);
  }
}

TEST_CASE("a non-isometric flow is flagged by the metric residual") {
  Rng rng(27);
  const Eigen::VectorXd z = rng.sphere_point(4);
  Eigen::VectorXd squash(2);
  squash << 1.0, -1.0;
  // Normalized linear squeeze: moves along the sphere but stretches the metric.
  action::FlowFn flow = [&](const Eigen::VectorXd& p, double t) {
    Eigen::VectorXd q = p + t * action::slot_scale(squash, p);
    return ambient::normalize(q);
  };
  action::DFlowFn dflow = [&](const Eigen::VectorXd& p, double t, const Eigen::VectorXd& v) {
    const auto s = numkit::Stencil::first_derivative();
    return numkit::curve_derivative([&](double u) { return flow(p + u * v, t); }, s);
  };
  const double res =
      action::metric_lie_residual(flow, dflow, z, rng, 6, numkit::Stencil::first_derivative());
  CHECK(res > 1e-3);
}

TEST_CASE("generators of a rank-two action commute") {
  Eigen::MatrixXi m(2, 3);
  m << 1, -2, 1, 2, 1, -1;
  const TorusAction A(m);
  Rng rng(28);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd z = rng.sphere_point(6);
    CHECK(action::commutator_residual(A, z, numkit::Stencil::first_derivative()) < 1e-9);
  }
}

TEST_CASE("regularity verdicts") {
  Rng rng(29);
  std::vector<Eigen::VectorXd> samples;
  for (int t = 0; t < 16; ++t) samples.push_back(rng.sphere_point(4));

  const auto good = action::regularity_check(pair_action(), samples);
  CHECK(good.regular);
  CHECK(good.min_singular > 1e-6);

  const auto vanish = action::regularity_check(TorusAction(row_weights({1, 0})), samples);
  CHECK_FALSE(vanish.regular);
  CHECK(vanish.reason.find("vanishes") != std::string::npos);

  const auto definite = action::regularity_check(TorusAction(row_weights({1, 2})), samples);
  CHECK_FALSE(definite.regular);
  CHECK(definite.reason.find("sign") != std::string::npos);

  const auto gcd = action::regularity_check(TorusAction(row_weights({-2, 2})), samples);
  CHECK_FALSE(gcd.regular);
  CHECK(gcd.reason.find("common factor") != std::string::npos);

  // Rank 2: no closed form, the singular-value floor decides.
  Eigen::MatrixXi m(2, 4);
  m << 1, -1, 1, -1, 1, 1, -1, -1;
  std::vector<Eigen::VectorXd> s8;
  for (int t = 0; t < 16; ++t) s8.push_back(rng.sphere_point(8));
  const auto rank2 = action::regularity_check(TorusAction(m), s8);
  CHECK(rank2.regular);
  CHECK(rank2.min_singular > 1e-3);
}

TEST_CASE("the cone moment generates the symplectic flow up to a fixed factor") {
  const TorusAction A = pair_action();
  Rng rng(30);
  const ambient::Cone cone;
  const ambient::ConePoint p{rng.sphere_point(4), 1.3};
  const double kappa = action::measured_cone_moment_factor(
      A, cone, p, 0, 404, numkit::Stencil::first_derivative());
  CHECK(std::abs(kappa + 0.5) < 1e-9);
}
