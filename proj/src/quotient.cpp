#include "sasred/quotient.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sasred/errors.hpp"
#include "sasred/rng.hpp"

namespace sasred::quotient {

namespace {

using levelset::LevelPoint;

numkit::Stencil chart_first_stencil() { return numkit::Stencil{1e-3, 2, 1}; }
numkit::Stencil chart_second_stencil() { return numkit::Stencil{5e-3, 2, 2}; }

// One chart evaluation: the level point, its denoised coordinate tangents
// and their horizontal parts, and the reduced metric.  Everything downstream
// (metric derivatives, Reeb coordinates, contact form) reuses this.
struct ChartEval {
  LevelPoint q;
  std::vector<Eigen::VectorXd> tangents;
  std::vector<Eigen::VectorXd> hor;
  Eigen::MatrixXd metric;
};

Eigen::VectorXd chart_center(const SliceChart& C, const Eigen::VectorXd& u) {
  if (u.size() != C.m())
    throw Error(ErrorKind::Precondition, "chart coordinate has the wrong dimension",
                double(u.size()));
  if (u.norm() > C.chart_radius)
    throw Error(ErrorKind::Precondition, "coordinate outside the chart radius", u.norm());
  Eigen::VectorXd y = C.base.z;
  for (int a = 0; a < C.m(); ++a) y += u(a) * C.frame[a];
  return y;
}

ChartEval eval_chart(const SliceChart& C, const Eigen::VectorXd& u, const numkit::Stencil& s) {
  ChartEval ev;
  ev.q = levelset::make_level_point(C.action,
                                    levelset::retract(C.action, chart_center(C, u), C.retract_opts));
  const int m = C.m();
  ev.tangents.reserve(m);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    dir(a) = 1.0;
    Eigen::VectorXd d = numkit::curve_derivative(
        [&](double t) {
          return levelset::retract(C.action, chart_center(C, u + t * dir), C.retract_opts);
        },
        s);
    ev.tangents.push_back(levelset::level_project(ev.q, d));
  }
  ev.hor.reserve(m);
  for (const auto& t : ev.tangents) ev.hor.push_back(levelset::hor_project(ev.q, t));
  ev.metric.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) ev.metric(a, b) = ev.metric(b, a) = ev.hor[a].dot(ev.hor[b]);
  return ev;
}

Eigen::VectorXd reeb_coordinates(const ChartEval& ev) {
  const int m = int(ev.tangents.size());
  const int d = ev.q.d;
  Eigen::MatrixXd M(ev.q.z.size(), m + d);
  for (int a = 0; a < m; ++a) M.col(a) = ev.tangents[a];
  for (int i = 0; i < d; ++i) M.col(m + i) = ev.q.vertical[i];
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(ambient::reeb(ev.q.z));
  return c.head(m);
}

}  // namespace

SliceChart make_chart(const action::TorusAction& A, const levelset::LevelPoint& base,
                      double chart_radius) {
  SliceChart C{A, base, base.horizontal, chart_radius, {}};
  if (C.frame.empty())
    throw Error(ErrorKind::Precondition, "chart needs a nonempty horizontal frame", 0.0);
  return C;
}

levelset::LevelPoint chart_point(const SliceChart& C, const Eigen::VectorXd& u) {
  return levelset::make_level_point(
      C.action, levelset::retract(C.action, chart_center(C, u), C.retract_opts));
}

std::vector<Eigen::VectorXd> chart_tangents(const SliceChart& C, const Eigen::VectorXd& u,
                                            const numkit::Stencil& s) {
  return eval_chart(C, u, s).tangents;
}

Eigen::MatrixXd reduced_metric(const SliceChart& C, const Eigen::VectorXd& u,
                               const numkit::Stencil& s) {
  return eval_chart(C, u, s).metric;
}

Eigen::VectorXd reduced_reeb(const SliceChart& C, const Eigen::VectorXd& u,
                             const numkit::Stencil& s) {
  return reeb_coordinates(eval_chart(C, u, s));
}

Eigen::VectorXd reduced_contact(const SliceChart& C, const Eigen::VectorXd& u,
                                const numkit::Stencil& s) {
  const ChartEval ev = eval_chart(C, u, s);
  Eigen::VectorXd etap(C.m());
  for (int a = 0; a < C.m(); ++a) etap(a) = ambient::eta(ev.q.z, ev.tangents[a]);
  return etap;
}

double ChartCurvature::r4(int c, int d, int b, int a) const {
  double v = 0.0;
  for (int e = 0; e < m; ++e) v += g(a, e) * r_up(e, b, c, d);
  return v;
}

double ChartCurvature::r4(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                          const Eigen::VectorXd& Z, const Eigen::VectorXd& W) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) out(a) += r_up(a, b, c, d) * Z(b) * X(c) * Y(d);
  return W.dot(g * out);
}

ChartCurvature curvature_in_chart(const SliceChart& C, const Eigen::VectorXd& u,
                                  const numkit::Stencil& first, const numkit::Stencil& second,
                                  double metric_scale) {
  const int m = C.m();
  ChartCurvature out;
  out.m = m;

  auto flat_metric = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::MatrixXd g = metric_scale * reduced_metric(C, v, first);
    return Eigen::Map<const Eigen::VectorXd>(g.data(), m * m);
  };
  auto unflatten = [m](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), m, m);
  };
  auto axis = [m](int a) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(a) = 1.0;
    return e;
  };

  out.g = unflatten(flat_metric(u));
  out.g_inv = out.g.inverse();

  out.dg.resize(m);
  for (int c = 0; c < m; ++c)
    out.dg[c] = unflatten(numkit::curve_derivative(
        [&](double t) { return flat_metric(u + t * axis(c)); }, first));

  // Second derivatives: pure along each axis, mixed from the corner stencil.
  std::vector<std::vector<Eigen::MatrixXd>> d2g(m, std::vector<Eigen::MatrixXd>(m));
  for (int c = 0; c < m; ++c)
    d2g[c][c] = unflatten(numkit::curve_derivative(
        [&](double t) { return flat_metric(u + t * axis(c)); }, second));
  for (int c = 0; c < m; ++c) {
    for (int d = c + 1; d < m; ++d) {
      numkit::Stencil mixed = second;
      mixed.order = 1;
      d2g[c][d] = d2g[d][c] = unflatten(numkit::mixed_second_derivative(
          [&](double s1, double s2) { return flat_metric(u + s1 * axis(c) + s2 * axis(d)); },
          mixed));
    }
  }

  out.gamma.assign(m, Eigen::MatrixXd::Zero(m, m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double v = 0.0;
        for (int e = 0; e < m; ++e)
          v += out.g_inv(a, e) * (out.dg[b](e, c) + out.dg[c](e, b) - out.dg[e](b, c));
        out.gamma[a](b, c) = 0.5 * v;
      }

  // d_c Gamma^a_{db} from the closed formula in g, dg, d2g.
  std::vector<Eigen::MatrixXd> dginv(m);
  for (int c = 0; c < m; ++c) dginv[c] = -out.g_inv * out.dg[c] * out.g_inv;
  auto dgamma = [&](int c, int a, int d, int b) {
    double v = 0.0;
    for (int e = 0; e < m; ++e) {
      v += dginv[c](a, e) * (out.dg[d](e, b) + out.dg[b](e, d) - out.dg[e](d, b));
      v += out.g_inv(a, e) * (d2g[c][d](e, b) + d2g[c][b](e, d) - d2g[c][e](d, b));
    }
    return 0.5 * v;
  };

  out.riem.assign(std::size_t(m) * m * m * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          double v = dgamma(c, a, d, b) - dgamma(d, a, c, b);
          for (int e = 0; e < m; ++e)
            v += out.gamma[a](c, e) * out.gamma[e](d, b) -
                 out.gamma[a](d, e) * out.gamma[e](c, b);
          out.riem[std::size_t(((a * m + b) * m + c)) * m + d] = v;
        }

  out.ricci = Eigen::MatrixXd::Zero(m, m);
  for (int d = 0; d < m; ++d)
    for (int b = 0; b < m; ++b) {
      double v = 0.0;
      for (int c = 0; c < m; ++c) v += out.r_up(c, b, c, d);
      out.ricci(d, b) = v;
    }
  return out;
}

ChartCurvature curvature_in_chart(const SliceChart& C, const Eigen::VectorXd& u,
                                  double metric_scale) {
  return curvature_in_chart(C, u, chart_first_stencil(), chart_second_stencil(), metric_scale);
}

double sasaki_residual(const SliceChart& C, const Eigen::VectorXd& u, double metric_scale) {
  const ChartCurvature curv = curvature_in_chart(C, u, metric_scale);
  const Eigen::VectorXd zeta =
      reduced_reeb(C, u, chart_first_stencil()) / std::sqrt(metric_scale);
  return sasaki_residual(curv, zeta);
}

double sasaki_residual(const ChartCurvature& curv, const Eigen::VectorXd& zeta) {
  const int m = curv.m;
  double res = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      for (int a = 0; a < m; ++a) {
        double acc = 0.0;
        for (int d = 0; d < m; ++d) acc += curv.r_up(a, j, i, d) * zeta(d);
        v(a) = acc;
      }
      const double gzy = zeta.dot(curv.g.col(j));
      const double gxy = curv.g(i, j);
      Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
      target(i) += gzy;
      target -= gxy * zeta;
      const Eigen::VectorXd diff = v - target;
      res = std::max(res, std::sqrt(diff.dot(curv.g * diff)));
    }
  }
  return res;
}

namespace {

double killing_from_parts(const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& dg,
                          const Eigen::VectorXd& zeta,
                          const std::vector<Eigen::VectorXd>& dzeta) {
  const int m = int(g.rows());
  double res = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      double k = 0.0;
      for (int c = 0; c < m; ++c)
        k += zeta(c) * dg[c](a, b) + g(c, b) * dzeta[a](c) + g(a, c) * dzeta[b](c);
      res = std::max(res, std::abs(k));
    }
  }
  return res;
}

std::vector<Eigen::VectorXd> reeb_derivatives(const SliceChart& C, const Eigen::VectorXd& u,
                                              const numkit::Stencil& s) {
  const int m = C.m();
  std::vector<Eigen::VectorXd> dzeta(m);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    dir(a) = 1.0;
    dzeta[a] =
        numkit::curve_derivative([&](double t) { return reduced_reeb(C, u + t * dir, s); }, s);
  }
  return dzeta;
}

}  // namespace

double killing_residual_zeta(const SliceChart& C, const Eigen::VectorXd& u) {
  const numkit::Stencil first = chart_first_stencil();
  const int m = C.m();
  const Eigen::MatrixXd g = reduced_metric(C, u, first);
  const Eigen::VectorXd zeta = reduced_reeb(C, u, first);
  std::vector<Eigen::MatrixXd> dg(m);
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    dir(a) = 1.0;
    const Eigen::VectorXd flat = numkit::curve_derivative(
        [&](double t) {
          const Eigen::MatrixXd gg = reduced_metric(C, u + t * dir, first);
          return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(gg.data(), m * m));
        },
        first);
    dg[a] = Eigen::Map<const Eigen::MatrixXd>(flat.data(), m, m);
  }
  return killing_from_parts(g, dg, zeta, reeb_derivatives(C, u, first));
}

double killing_residual_zeta(const SliceChart& C, const Eigen::VectorXd& u,
                             const ChartCurvature& curv) {
  const numkit::Stencil first = chart_first_stencil();
  const Eigen::VectorXd zeta = reduced_reeb(C, u, first);
  return killing_from_parts(curv.g, curv.dg, zeta, reeb_derivatives(C, u, first));
}

double killing_residual_coordinate_field(const SliceChart& C, const Eigen::VectorXd& u, int k) {
  const numkit::Stencil first = chart_first_stencil();
  const int m = C.m();
  if (k < 0 || k >= m)
    throw Error(ErrorKind::Precondition, "coordinate index out of range", double(k));
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
  dir(k) = 1.0;
  const Eigen::VectorXd dgk = numkit::curve_derivative(
      [&](double t) {
        const Eigen::MatrixXd gg = reduced_metric(C, u + t * dir, first);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(gg.data(), m * m));
      },
      first);
  return dgk.cwiseAbs().maxCoeff();
}

void EinsteinAccumulator::add(const ChartCurvature& c, const Eigen::VectorXd& zeta) {
  Sample s;
  s.g = c.g;
  s.g_inv = c.g_inv;
  s.ric = 0.5 * (c.ricci + c.ricci.transpose());
  s.g_inv_ric = s.g_inv * s.ric;
  s.theta = c.g * zeta;
  samples_.push_back(std::move(s));
}

EinsteinFit EinsteinAccumulator::fit() const {
  EinsteinFit f;
  f.points = int(samples_.size());
  if (samples_.empty()) return f;
  double tr = 0.0, dim = 0.0;
  for (const Sample& s : samples_) {
    tr += s.g_inv_ric.trace();
    dim += double(s.g.rows());
  }
  f.constant = tr / dim;
  for (const Sample& s : samples_) {
    const Eigen::MatrixXd e = s.g_inv * (s.ric - f.constant * s.g);
    f.max_residual = std::max(f.max_residual, std::sqrt((e * e).trace()));
  }
  return f;
}

EtaEinsteinFit EinsteinAccumulator::eta_fit() const {
  EtaEinsteinFit f;
  f.points = int(samples_.size());
  if (samples_.empty()) return f;
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (const Sample& s : samples_) {
    const double q = s.theta.dot(s.g_inv * s.theta);  // = g(zeta, zeta)
    M(0, 0) += double(s.g.rows());
    M(0, 1) += q;
    M(1, 0) += q;
    M(1, 1) += q * q;
    b(0) += s.g_inv_ric.trace();
    b(1) += (s.g_inv * s.theta).dot(s.ric * (s.g_inv * s.theta));
  }
  const Eigen::Vector2d x = M.ldlt().solve(b);
  f.lambda = x(0);
  f.nu = x(1);
  for (const Sample& s : samples_) {
    const Eigen::MatrixXd model = f.lambda * s.g + f.nu * (s.theta * s.theta.transpose());
    const Eigen::MatrixXd e = s.g_inv * (s.ric - model);
    f.max_residual = std::max(f.max_residual, std::sqrt((e * e).trace()));
  }
  return f;
}

EinsteinFit einstein_fit(const SliceChart& C, const std::vector<Eigen::VectorXd>& points) {
  EinsteinAccumulator acc;
  for (const Eigen::VectorXd& u : points)
    acc.add(curvature_in_chart(C, u), reduced_reeb(C, u, chart_first_stencil()));
  return acc.fit();
}

Eigen::VectorXd oneill_A(const action::TorusAction& A, const levelset::LevelPoint& p,
                         const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                         const numkit::Stencil& s) {
  auto extension = [&](const Eigen::VectorXd& q) {
    const LevelPoint lp = levelset::make_level_point(A, q);
    return levelset::hor_project(lp, ambient::sphere_project(q, Z));
  };
  const Eigen::VectorXd d = numkit::curve_derivative(
      [&](double t) { return extension(levelset::retract(A, p.z + t * Y)); }, s);
  const Eigen::VectorXd dl = levelset::level_project(p, d);
  Eigen::VectorXd vert = Eigen::VectorXd::Zero(p.z.size());
  for (const Eigen::VectorXd& x : p.vertical_on) vert += dl.dot(x) * x;
  return vert;
}

double oneill_xi_residual(const action::TorusAction& A, const levelset::LevelPoint& p,
                          const numkit::Stencil& s) {
  double res = 0.0;
  for (const Eigen::VectorXd& y : p.horizontal) {
    // The Reeb field is its own natural horizontal extension.
    const Eigen::VectorXd d = numkit::curve_derivative(
        [&](double t) { return ambient::reeb(levelset::retract(A, p.z + t * y)); }, s);
    const Eigen::VectorXd dl = levelset::level_project(p, d);
    double norm2 = 0.0;
    for (const Eigen::VectorXd& x : p.vertical_on) norm2 += dl.dot(x) * dl.dot(x);
    res = std::max(res, std::sqrt(norm2));
  }
  return res;
}

double oneill_crosscheck(const SliceChart& C) {
  const numkit::Stencil s = chart_first_stencil();
  const int m = C.m();
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m);
  const ChartCurvature curv = curvature_in_chart(C, u0);
  const Eigen::VectorXd zeta = reduced_reeb(C, u0, s);
  const Eigen::VectorXd xi = ambient::reeb(C.base.z);

  // O'Neill data at the base point, cached over the non-Reeb frame.
  std::vector<Eigen::VectorXd> a_xi(m);
  std::vector<std::vector<Eigen::VectorXd>> a_pair(m, std::vector<Eigen::VectorXd>(m));
  for (int i = 1; i < m; ++i) {
    a_xi[i] = oneill_A(C.action, C.base, C.frame[i], xi, s);
    for (int j = 1; j < m; ++j)
      a_pair[i][j] = oneill_A(C.action, C.base, C.frame[i], C.frame[j], s);
  }

  double worst = 0.0;
  for (int a = 1; a < m; ++a) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(m);
    X(a) = 1.0;
    for (int b = 1; b < m; ++b) {
      Eigen::VectorXd Y = Eigen::VectorXd::Zero(m);
      Y(b) = 1.0;
      for (int c = 1; c < m; ++c) {
        Eigen::VectorXd Z = Eigen::VectorXd::Zero(m);
        Z(c) = 1.0;
        const double chart_val = curv.r4(X, zeta, Y, Z);
        double extrinsic =
            levelset::level_curvature(C.action, C.base, C.frame[a], xi, C.frame[b], C.frame[c]);
        extrinsic += a_xi[a].dot(a_pair[b][c]);   // g(A(X,xi), A(Y,Z))
        extrinsic += a_xi[b].dot(a_pair[a][c]);   // -g(A(xi,Y), A(X,Z)) with A alternating
        extrinsic += a_pair[a][c].dot(a_xi[c]);   // g(A(X,Z), A(xi,Z)) likewise
        worst = std::max(worst, std::abs(chart_val - extrinsic));
      }
    }
  }
  return worst;
}

ambient::ConePoint cone_retract(const action::TorusAction& A, const ambient::ConePoint& seed,
                                const levelset::RetractOptions& opt) {
  ambient::ConePoint p{ambient::normalize(seed.z), seed.r};
  if (p.r <= 0.0) throw Error(ErrorKind::Precondition, "cone point needs r > 0", p.r);
  if (A.rank() == 0) return p;
  const int d = A.rank();

  auto residual = [&](const ambient::ConePoint& q) {
    const Eigen::VectorXd mu = A.moment(q.z);
    return mu.cwiseAbs().maxCoeff();
  };
  auto step = [&](ambient::ConePoint& q) {
    // Cone-metric gradients of Phi_i = r^2 mu_i: (tangential grad mu_i, 2 r mu_i).
    const Eigen::VectorXd mu = A.moment(q.z);
    Eigen::MatrixXd Gy(d, q.z.size());
    for (int i = 0; i < d; ++i)
      Gy.row(i) = ambient::sphere_project(q.z, A.moment_gradient(i, q.z)).transpose();
    Eigen::MatrixXd gram = q.r * q.r * (Gy * Gy.transpose());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gram(i, j) += 4.0 * q.r * q.r * mu(i) * mu(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(d - 1);
    if (!(lo > 1e-13 * std::max(1.0, hi)))
      throw Error(ErrorKind::Regularity, "cone correction Gram system degenerated", lo);
    const Eigen::VectorXd phi_val = q.r * q.r * mu;
    const Eigen::VectorXd t =
        eig.eigenvectors() *
        (eig.eigenvectors().transpose() * (-phi_val)).cwiseQuotient(eig.eigenvalues());
    return std::pair{Eigen::VectorXd(Gy.transpose() * t), 2.0 * q.r * mu.dot(t)};
  };

  double res = residual(p);
  int iter = 0;
  while (res >= opt.tol) {
    if (iter++ >= opt.max_iter)
      throw Error(ErrorKind::RetractionFailure, "cone retraction stalled", res);
    const auto [dz, dr] = step(p);
    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      ambient::ConePoint q{ambient::normalize(p.z + lambda * dz), p.r + lambda * dr};
      if (q.r > 0.0) {
        const double rq = residual(q);
        if (rq < res) {
          p = q;
          res = rq;
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw Error(ErrorKind::RetractionFailure, "cone damping exhausted without progress", res);
  }
  const auto [dz, dr] = step(p);
  p = ambient::ConePoint{ambient::normalize(p.z + dz), p.r + dr};
  return p;
}

ConeCommutation cone_commutation(const SliceChart& C, const std::vector<double>& r_values,
                                 int samples, std::uint64_t seed) {
  Rng rng(seed);
  const numkit::Stencil s = chart_first_stencil();
  const int m = C.m();
  const int d = C.action.rank();
  ConeCommutation out;
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd u = rng.gauss_vector(m);
    u *= rng.uniform(0.0, 0.4 * C.chart_radius) / u.norm();
    const ChartEval ev = eval_chart(C, u, s);
    Eigen::MatrixXd V(d, ev.q.z.size());
    for (int i = 0; i < d; ++i) V.row(i) = ev.q.vertical[i].transpose();

    const ambient::Cone cone;
    for (double r : r_values) {
      const double r2 = r * r;
      const ambient::ConePoint cp{ev.q.z, r};
      const std::vector<ambient::ConeVec> verts = [&] {
        std::vector<ambient::ConeVec> vs;
        for (int i = 0; i < d; ++i) vs.push_back({ev.q.vertical[i], 0.0});
        return vs;
      }();
      // Horizontal lift against the cone verticals (X_i, 0): subtract the
      // cone-metric Gram solution of the pairings.
      Eigen::MatrixXd gram(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) gram(i, j) = cone.metric(cp, verts[i], verts[j]);
      const auto solver = gram.ldlt();
      auto lift = [&](const ambient::ConeVec& w) {
        if (d == 0) return w;
        Eigen::VectorXd rhs(d);
        for (int i = 0; i < d; ++i) rhs(i) = cone.metric(cp, verts[i], w);
        const Eigen::VectorXd c = solver.solve(rhs);
        ambient::ConeVec h = w;
        for (int i = 0; i < d; ++i) {
          h.y -= c(i) * verts[i].y;
          h.a -= c(i) * verts[i].a;
        }
        return h;
      };

      std::vector<ambient::ConeVec> hlift(m);
      for (int a = 0; a < m; ++a) hlift[a] = lift({ev.tangents[a], 0.0});
      const ambient::ConeVec radial =
          lift({Eigen::VectorXd::Zero(ev.q.z.size()), 1.0});

      const double scale = std::max(1.0, r2);
      for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
          const double g0 = cone.metric(cp, hlift[a], hlift[b]);
          out.metric_deviation =
              std::max(out.metric_deviation, std::abs(g0 - r2 * ev.metric(a, b)) / scale);
        }
        out.mixed_deviation =
            std::max(out.mixed_deviation, std::abs(cone.metric(cp, hlift[a], radial)) / scale);
      }
      out.radial_deviation =
          std::max(out.radial_deviation, std::abs(cone.metric(cp, radial, radial) - 1.0));
    }

    // Scale invariance of the cone zero set: retracting the same off-level
    // seed at every height must land on the same sphere section.
    const Eigen::VectorXd y = ambient::normalize(ev.q.z + 0.05 * rng.gauss_vector(int(ev.q.z.size())));
    Eigen::VectorXd first_section;
    for (double r : r_values) {
      const ambient::ConePoint cp = cone_retract(C.action, ambient::ConePoint{y, r});
      if (first_section.size() == 0)
        first_section = cp.z;
      else
        out.section_drift = std::max(out.section_drift, (cp.z - first_section).norm());
    }
  }
  return out;
}

double contact_nondegeneracy(const SliceChart& C, const Eigen::VectorXd& u) {
  const numkit::Stencil first = chart_first_stencil();
  const int m = C.m();
  const Eigen::VectorXd etap = reduced_contact(C, u, first);
  Eigen::MatrixXd J(m, m);  // J(a, b) = d_a eta'_b
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    dir(a) = 1.0;
    J.row(a) =
        numkit::curve_derivative([&](double t) { return reduced_contact(C, u + t * dir, first); },
                                 first)
            .transpose();
  }
  const Eigen::MatrixXd deta = J - J.transpose();
  const Eigen::MatrixXd K = numkit::nullspace(etap.transpose());
  const Eigen::MatrixXd restricted = K.transpose() * deta * K;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted);
  const auto& sv = svd.singularValues();
  return sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
}

}  // namespace sasred::quotient
