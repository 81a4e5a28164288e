#ifndef ACCRETA_HAMILTONIAN_HPP
#define ACCRETA_HAMILTONIAN_HPP

#include <functional>
#include <variant>
#include <vector>

#include "accreta/grid.hpp"

namespace accreta {

/**
 * Real function of the activation value u, in one of three configurable
 * forms: constant, affine in clamp(u, u_min, u_max), or a table in u with
 * linear interpolation (constant extrapolation outside the table).
 */
class UProfile {
 public:
  static UProfile constant(double value);
  static UProfile affine(double g0, double g1, double u_min, double u_max);
  static UProfile table(std::vector<double> u, std::vector<double> values);

  double operator()(double u) const;
  /// Extreme values over all u.
  double min_value() const;
  double max_value() const;
  bool is_constant() const;

 private:
  enum class Kind { constant, affine, table };
  Kind kind_ = Kind::constant;
  double g0_ = 1.0, g1_ = 0.0, u_min_ = 0.0, u_max_ = 0.0;
  std::vector<double> us_, vals_;
};

/// H(x,u,p) = gamma(x,u)|p| - 1.
struct GeneralizedEikonal {
  std::function<double(const Point&, double)> gamma;
};

/// H(x,u,p) = sqrt(sum (p_i/a_i)^2) - 1; the zero sublevel is an axis-aligned ellipsoid.
struct Ellipsoidal {
  std::function<Eigen::Vector3d(const Point&, double)> axes;
};

/// Arbitrary H with convex zero sublevels; support values come from direction sampling.
struct CustomHamiltonian {
  std::function<double(const Point&, double, const Point&)> evaluate;
};

/// Hamiltonian H(x,u,p) together with the declared ball bounds sigma_* <= sigma^*.
struct HamiltonianModel {
  std::variant<GeneralizedEikonal, Ellipsoidal, CustomHamiltonian> kind;
  double sigma_lower = 1.0;
  double sigma_upper = 1.0;

  double operator()(const Point& x, double u, const Point& p) const;
  bool is_custom() const { return std::holds_alternative<CustomHamiltonian>(kind); }
};

HamiltonianModel make_eikonal(UProfile gamma, double sigma_lower, double sigma_upper);
/// One profile per axis (2 or 3 entries).
HamiltonianModel make_ellipsoidal(std::vector<UProfile> axes, double sigma_lower, double sigma_upper);

/// Support function q -> sup{q.p : H(x,u,p) <= 0} of the model's zero sublevel.
class SupportEvaluator {
 public:
  explicit SupportEvaluator(HamiltonianModel model, int dim = 2, int direction_samples = 0,
                            double bisection_tol = 1e-10);

  double operator()(const Point& x, double u, const Point& q) const;

  const HamiltonianModel& model() const { return model_; }
  int dim() const { return dim_; }
  int direction_samples() const { return static_cast<int>(directions_.size()); }

 private:
  double sampled(const Point& x, double u, const Point& q) const;

  HamiltonianModel model_;
  int dim_;
  double tol_;
  std::vector<Point> directions_;
};

inline double support(const SupportEvaluator& e, const Point& x, double u, const Point& q) { return e(x, u, q); }

/// M unit directions: equally spaced angles from 0 in 2D, a Fibonacci sphere in 3D.
std::vector<Point> unit_directions(int dim, int count);

/// sup{r >= 0 : H(x,u,r d) <= 0} by bracket expansion and bisection; +inf when unbounded.
double radial_extent(const HamiltonianModel& m, const Point& x, double u, const Point& d, double tol = 1e-12);

/// Minkowski gauge of the zero sublevel minus one; equals -1 at p = 0.
double minkowski_normalize(const HamiltonianModel& m, const Point& x, double u, const Point& p);

struct ProbePoint {
  Point x = Point::Zero();
  double u = 0.0;
};

struct ProbeResult {
  ProbePoint probe;
  bool pass = true;
  double min_extent = 0.0;
  double max_extent = 0.0;
  /// Direction whose extent lies farthest outside [sigma_*, sigma^*] (or closest to it on a pass).
  Point worst_direction = Point::Zero();
  double worst_extent = 0.0;
};

struct BoundsReport {
  bool pass = true;
  std::vector<ProbeResult> probes;
};

/// Ray-probes B_{sigma_*} in C_xu in B_{sigma^*} at every probe; relative tolerance `tol`.
BoundsReport verify_bounds(const HamiltonianModel& m, const std::vector<ProbePoint>& probes, int dim = 2,
                           int directions = 64, double tol = 1e-9);

}  // namespace accreta

#endif  // ACCRETA_HAMILTONIAN_HPP
