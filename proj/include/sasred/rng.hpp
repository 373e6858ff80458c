#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sasred {

// Deterministic random source for sample points, directions and seeds.
// Gaussian deviates use an explicit Box-Muller transform: report output is
// promised to be reproducible for a fixed seed, and std::normal_distribution
// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  Eigen::VectorXd gauss_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss();
    return v;
  }

  // Uniform point on the unit sphere of R^dim.
  Eigen::VectorXd sphere_point(int dim) {
    for (;;) {
      Eigen::VectorXd v = gauss_vector(dim);
      const double n = v.norm();
      if (n > 1e-6) return v / n;
    }
  }

  // Unit tangent vector at a sphere point z, uniform on directions.
  Eigen::VectorXd tangent(const Eigen::VectorXd& z) {
    for (;;) {
      Eigen::VectorXd v = gauss_vector(int(z.size()));
      v -= v.dot(z) * z;
      const double n = v.norm();
      if (n > 1e-6) return v / n;
    }
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sasred
