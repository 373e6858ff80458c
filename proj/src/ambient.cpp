#include "sasred/ambient.hpp"

#include <cmath>

#include "sasred/errors.hpp"
#include "sasred/rng.hpp"

namespace sasred::ambient {

int complex_dim(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0 || v.size() < 4)
    throw Error(ErrorKind::Precondition, "ambient vectors interleave n >= 2 complex slots",
                double(v.size()));
  return int(v.size() / 2);
}

Eigen::VectorXd mul_i(const Eigen::VectorXd& v) {
  const int n = complex_dim(v);
  Eigen::VectorXd w(v.size());
  for (int j = 0; j < n; ++j) {
    w(2 * j) = -v(2 * j + 1);
    w(2 * j + 1) = v(2 * j);
  }
  return w;
}

void rotate_slot(Eigen::VectorXd& v, int slot, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double x = v(2 * slot), y = v(2 * slot + 1);
  v(2 * slot) = c * x - s * y;
  v(2 * slot + 1) = s * x + c * y;
}

Eigen::VectorXd reeb(const Eigen::VectorXd& z) { return mul_i(z); }

double eta(const Eigen::VectorXd& z, const Eigen::VectorXd& y) { return mul_i(z).dot(y); }

Eigen::VectorXd phi(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  return mul_i(y) + eta(z, y) * z;
}

Eigen::VectorXd sphere_project(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  return y - z.dot(y) * z;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& v) {
  const double n = v.norm();
  if (n < 1e-12)
    throw Error(ErrorKind::EvaluationDomain, "radial projection undefined near the cone tip", n);
  return v / n;
}

Eigen::VectorXd sphere_curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& z) {
  return y.dot(z) * x - x.dot(z) * y;
}

double sphere_r4(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                 const Eigen::VectorXd& w) {
  return sphere_curvature(x, y, z).dot(w);
}

Eigen::VectorXd sphere_covariant(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                 const numkit::VectorFn& field, const numkit::Stencil& s) {
  Eigen::VectorXd d =
      numkit::curve_derivative([&](double t) { return field(normalize(z + t * y)); }, s);
  return sphere_project(z, d);
}

namespace {

// Tangential constant extension of a vector: the standard field whose bracket
// combinatorics every exterior-derivative measurement below shares.
numkit::VectorFn tangent_extension(Eigen::VectorXd v) {
  return [v = std::move(v)](const Eigen::VectorXd& p) { return sphere_project(p, v); };
}

}  // namespace

double deta(const Eigen::VectorXd& z, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
            const numkit::Stencil& s) {
  const numkit::VectorFn X = tangent_extension(x);
  const numkit::VectorFn Y = tangent_extension(y);
  auto along = [&](const Eigen::VectorXd& dir, const std::function<double(const Eigen::VectorXd&)>& f) {
    return numkit::curve_derivative(
        numkit::ScalarCurveFn([&](double t) { return f(normalize(z + t * dir)); }), s);
  };
  const double x_of_eta_y = along(x, [&](const Eigen::VectorXd& p) { return eta(p, Y(p)); });
  const double y_of_eta_x = along(y, [&](const Eigen::VectorXd& p) { return eta(p, X(p)); });
  // Flat-coordinate bracket of the two tangential extensions.
  Eigen::VectorXd bracket =
      numkit::curve_derivative([&](double t) { return Y(normalize(z + t * x)); }, s) -
      numkit::curve_derivative([&](double t) { return X(normalize(z + t * y)); }, s);
  return x_of_eta_y - y_of_eta_x - eta(z, bracket);
}

double measured_deta_factor(const Eigen::VectorXd& z,
                            const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                            const numkit::Stencil& s) {
  double acc = 0.0;
  int used = 0;
  for (const auto& [x, y] : pairs) {
    const double denom = x.dot(phi(z, y));
    if (std::abs(denom) < 1e-6) continue;
    acc += deta(z, x, y, s) / denom;
    ++used;
  }
  if (used == 0)
    throw Error(ErrorKind::Precondition, "every sample pair pairs to zero against phi", 0.0);
  return acc / used;
}

// ---------------------------------------------------------------------------

double Cone::metric(const ConePoint& p, const ConeVec& u, const ConeVec& v) const {
  return p.r * p.r * u.y.dot(v.y) + u.a * v.a;
}

ConeVec Cone::complex_structure(const ConePoint& p, const ConeVec& u) const {
  ConeVec w;
  w.y = phi_scale * phi(p.z, u.y) + (u.a / p.r) * reeb(p.z);
  w.a = -p.r * eta(p.z, u.y);
  return w;
}

double Cone::kahler_form(const ConePoint& p, const ConeVec& u, const ConeVec& v) const {
  return metric(p, complex_structure(p, u), v);
}

ConePoint Cone::move(const ConePoint& p, const ConeVec& u, double t) const {
  ConePoint q;
  q.z = normalize(p.z + t * u.y);
  q.r = p.r + t * u.a;
  if (q.r <= 0.0)
    throw Error(ErrorKind::EvaluationDomain, "cone move crossed the tip", q.r);
  return q;
}

ConeField Cone::constant_extension(const ConePoint&, const ConeVec& u) const {
  return [u](const ConePoint& q) {
    ConeVec w;
    w.y = sphere_project(q.z, u.y);
    w.a = u.a;
    return w;
  };
}

ConeVec Cone::bracket(const ConeField& u, const ConeField& v, const ConePoint& p,
                      const numkit::Stencil& s) const {
  const ConeVec up = u(p), vp = v(p);
  auto deriv = [&](const ConeVec& dir, const ConeField& f) {
    Eigen::VectorXd d = numkit::curve_derivative(
        [&](double t) {
          const ConeVec w = f(move(p, dir, t));
          Eigen::VectorXd flat(w.y.size() + 1);
          flat << w.y, w.a;
          return flat;
        },
        s);
    ConeVec w;
    w.y = d.head(d.size() - 1);
    w.a = d(d.size() - 1);
    return w;
  };
  const ConeVec duv = deriv(up, v), dvu = deriv(vp, u);
  ConeVec b;
  b.y = sphere_project(p.z, duv.y - dvu.y);
  b.a = duv.a - dvu.a;
  return b;
}

double Cone::d_kahler(const ConePoint& p, const ConeVec& u, const ConeVec& v, const ConeVec& w,
                      const numkit::Stencil& s) const {
  const ConeField U = constant_extension(p, u);
  const ConeField V = constant_extension(p, v);
  const ConeField W = constant_extension(p, w);
  auto omega = [&](const ConePoint& q, const ConeField& a, const ConeField& b) {
    return kahler_form(q, a(q), b(q));
  };
  auto deriv_along = [&](const ConeVec& dir, const ConeField& a, const ConeField& b) {
    return numkit::curve_derivative(
        numkit::ScalarCurveFn([&](double t) { return omega(move(p, dir, t), a, b); }), s);
  };
  const double term1 = deriv_along(u, V, W) - deriv_along(v, U, W) + deriv_along(w, U, V);
  const double term2 = -kahler_form(p, bracket(U, V, p, s), w) +
                       kahler_form(p, bracket(U, W, p, s), v) -
                       kahler_form(p, bracket(V, W, p, s), u);
  return term1 + term2;
}

ConeVec Cone::nijenhuis(const ConePoint& p, const ConeVec& u, const ConeVec& v,
                        const numkit::Stencil& s) const {
  const ConeField U = constant_extension(p, u);
  const ConeField V = constant_extension(p, v);
  auto J_of = [this](const ConeField& f) {
    return ConeField([this, f](const ConePoint& q) { return complex_structure(q, f(q)); });
  };
  const ConeField JU = J_of(U), JV = J_of(V);
  const ConeVec t1 = bracket(JU, JV, p, s);
  const ConeVec t2 = complex_structure(p, bracket(JU, V, p, s));
  const ConeVec t3 = complex_structure(p, bracket(U, JV, p, s));
  const ConeVec t4 = bracket(U, V, p, s);
  ConeVec n;
  n.y = t1.y - t2.y - t3.y - t4.y;
  n.a = t1.a - t2.a - t3.a - t4.a;
  return n;
}

KahlerResiduals kahler_residuals(const Cone& cone, const std::vector<ConePoint>& points,
                                 int directions_per_point, std::uint64_t seed,
                                 const numkit::Stencil& s) {
  Rng rng(seed);
  KahlerResiduals res;
  for (const ConePoint& p : points) {
    for (int k = 0; k < directions_per_point; ++k) {
      auto draw = [&]() {
        ConeVec u;
        u.y = rng.tangent(p.z);
        u.a = rng.uniform(-1.0, 1.0);
        return u;
      };
      const ConeVec u = draw(), v = draw(), w = draw();
      res.d_omega = std::max(res.d_omega, std::abs(cone.d_kahler(p, u, v, w, s)));
      const ConeVec nj = cone.nijenhuis(p, u, v, s);
      res.nijenhuis = std::max(res.nijenhuis, std::sqrt(cone.metric(p, nj, nj)));
    }
  }
  return res;
}

ScalingExponents cone_scaling(const Cone& cone, const ConePoint& p, std::uint64_t seed) {
  Rng rng(seed);
  const double rt2 = std::sqrt(2.0);
  const std::vector<double> factors = {0.5, 1.0 / rt2, rt2, 2.0};
  ScalingExponents out;

  ConeVec u, v;
  double base = 0.0;
  for (int attempt = 0; attempt < 32; ++attempt) {
    u.y = rng.tangent(p.z);
    u.a = rng.uniform(-1.0, 1.0);
    v.y = rng.tangent(p.z);
    v.a = rng.uniform(-1.0, 1.0);
    base = cone.kahler_form(p, u, v);
    if (std::abs(base) > 1e-3) break;
  }
  if (std::abs(base) <= 1e-3)
    throw Error(ErrorKind::Precondition, "could not find a pair pairing nontrivially with omega",
                base);
  std::vector<std::pair<double, double>> omega_samples, pot_samples, lin_samples;
  const double pot_base = p.r * p.r * eta(p.z, u.y);
  if (std::abs(pot_base) < 1e-9)
    throw Error(ErrorKind::Precondition, "sample vector annihilates eta", pot_base);
  for (double t : factors) {
    ConePoint q{p.z, t * p.r};
    ConeVec ut{u.y, t * u.a}, vt{v.y, t * v.a};
    omega_samples.emplace_back(t, cone.kahler_form(q, ut, vt) / base);
    pot_samples.emplace_back(t, q.r * q.r * eta(q.z, ut.y) / pot_base);
    lin_samples.emplace_back(t, q.r * eta(q.z, ut.y) / (p.r * eta(p.z, u.y)));
  }
  out.omega = numkit::fit_power_law(omega_samples);
  out.potential = numkit::fit_power_law(pot_samples);
  out.radial_control = numkit::fit_power_law(lin_samples);
  return out;
}

double measured_potential_factor(const Cone& cone, const ConePoint& p, int pairs,
                                 std::uint64_t seed, const numkit::Stencil& s) {
  Rng rng(seed);
  auto alpha = [](const ConePoint& q, const ConeVec& w) { return q.r * q.r * eta(q.z, w.y); };
  double acc = 0.0;
  int used = 0;
  for (int k = 0; k < pairs; ++k) {
    ConeVec u{rng.tangent(p.z), rng.uniform(-1.0, 1.0)};
    ConeVec v{rng.tangent(p.z), rng.uniform(-1.0, 1.0)};
    const double om = cone.kahler_form(p, u, v);
    if (std::abs(om) < 1e-6) continue;
    const ConeField U = cone.constant_extension(p, u);
    const ConeField V = cone.constant_extension(p, v);
    auto deriv_along = [&](const ConeVec& dir, const ConeField& f) {
      return numkit::curve_derivative(
          numkit::ScalarCurveFn([&](double t) {
            const ConePoint q = cone.move(p, dir, t);
            return alpha(q, f(q));
          }),
          s);
    };
    const double dalpha =
        deriv_along(u, V) - deriv_along(v, U) - alpha(p, cone.bracket(U, V, p, s));
    acc += dalpha / om;
    ++used;
  }
  if (used == 0)
    throw Error(ErrorKind::Precondition, "every sample pair annihilates omega", 0.0);
  return acc / used;
}

}  // namespace sasred::ambient
