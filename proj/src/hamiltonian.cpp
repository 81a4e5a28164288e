#include "accreta/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace accreta {

UProfile UProfile::constant(double value) {
  UProfile p;
  p.kind_ = Kind::constant;
  p.g0_ = value;
  return p;
}

UProfile UProfile::affine(double g0, double g1, double u_min, double u_max) {
  if (!(u_min <= u_max)) throw ValidationError("affine profile needs u_min <= u_max");
  UProfile p;
  p.kind_ = Kind::affine;
  p.g0_ = g0;
  p.g1_ = g1;
  p.u_min_ = u_min;
  p.u_max_ = u_max;
  return p;
}

UProfile UProfile::table(std::vector<double> u, std::vector<double> values) {
  if (u.size() != values.size() || u.empty()) throw ValidationError("profile table needs matching nonempty columns");
  for (std::size_t i = 1; i < u.size(); ++i)
    if (!(u[i] > u[i - 1])) throw ValidationError("profile table u column must increase strictly");
  UProfile p;
  p.kind_ = Kind::table;
  p.us_ = std::move(u);
  p.vals_ = std::move(values);
  return p;
}

double UProfile::operator()(double u) const {
  switch (kind_) {
    case Kind::constant:
      return g0_;
    case Kind::affine:
      return g0_ + g1_ * std::clamp(u, u_min_, u_max_);
    case Kind::table: {
      if (u <= us_.front()) return vals_.front();
      if (u >= us_.back()) return vals_.back();
      const auto it = std::upper_bound(us_.begin(), us_.end(), u);
      const std::size_t i = static_cast<std::size_t>(it - us_.begin());
      const double w = (u - us_[i - 1]) / (us_[i] - us_[i - 1]);
      return (1.0 - w) * vals_[i - 1] + w * vals_[i];
    }
  }
  return g0_;
}

double UProfile::min_value() const {
  switch (kind_) {
    case Kind::constant:
      return g0_;
    case Kind::affine:
      return std::min(g0_ + g1_ * u_min_, g0_ + g1_ * u_max_);
    case Kind::table:
      return *std::min_element(vals_.begin(), vals_.end());
  }
  return g0_;
}

double UProfile::max_value() const {
  switch (kind_) {
    case Kind::constant:
      return g0_;
    case Kind::affine:
      return std::max(g0_ + g1_ * u_min_, g0_ + g1_ * u_max_);
    case Kind::table:
      return *std::max_element(vals_.begin(), vals_.end());
  }
  return g0_;
}

bool UProfile::is_constant() const { return min_value() == max_value(); }

double HamiltonianModel::operator()(const Point& x, double u, const Point& p) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GeneralizedEikonal>) {
          return k.gamma(x, u) * p.norm() - 1.0;
        } else if constexpr (std::is_same_v<K, Ellipsoidal>) {
          const Eigen::Vector3d a = k.axes(x, u);
          double s = 0.0;
          for (int i = 0; i < 3; ++i)
            if (p[i] != 0.0) s += (p[i] / a[i]) * (p[i] / a[i]);
          return std::sqrt(s) - 1.0;
        } else {
          return k.evaluate(x, u, p);
        }
      },
      kind);
}

HamiltonianModel make_eikonal(UProfile gamma, double sigma_lower, double sigma_upper) {
  HamiltonianModel m;
  m.kind = GeneralizedEikonal{[g = std::move(gamma)](const Point&, double u) { return g(u); }};
  m.sigma_lower = sigma_lower;
  m.sigma_upper = sigma_upper;
  return m;
}

HamiltonianModel make_ellipsoidal(std::vector<UProfile> axes, double sigma_lower, double sigma_upper) {
  if (axes.size() < 2 || axes.size() > 3) throw ValidationError("ellipsoidal model needs 2 or 3 axis profiles");
  if (axes.size() == 2) axes.push_back(UProfile::constant(1.0));
  HamiltonianModel m;
  m.kind = Ellipsoidal{[a = std::move(axes)](const Point&, double u) { return Eigen::Vector3d(a[0](u), a[1](u), a[2](u)); }};
  m.sigma_lower = sigma_lower;
  m.sigma_upper = sigma_upper;
  return m;
}

std::vector<Point> unit_directions(int dim, int count) {
  std::vector<Point> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      dirs.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
    }
  }
  return dirs;
}

SupportEvaluator::SupportEvaluator(HamiltonianModel model, int dim, int direction_samples, double bisection_tol)
    : model_(std::move(model)), dim_(dim), tol_(bisection_tol) {
  if (!(model_.sigma_lower > 0.0) || !(model_.sigma_upper >= model_.sigma_lower))
    throw ValidationError("need 0 < sigma_lower <= sigma_upper");
  if (model_.is_custom()) {
    if (direction_samples == 0) direction_samples = dim == 2 ? 64 : 512;
    if (direction_samples < 16) throw ValidationError("custom support needs at least 16 direction samples");
    if (!(bisection_tol > 0.0)) throw ValidationError("bisection tolerance must be positive");
    directions_ = unit_directions(dim, direction_samples);
  }
}

double SupportEvaluator::operator()(const Point& x, double u, const Point& q) const {
  if (q.isZero(0.0)) return 0.0;
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, GeneralizedEikonal>) {
          return q.norm() / k.gamma(x, u);
        } else if constexpr (std::is_same_v<K, Ellipsoidal>) {
          return q.cwiseProduct(k.axes(x, u)).norm();
        } else {
          return sampled(x, u, q);
        }
      },
      model_.kind);
}

double SupportEvaluator::sampled(const Point& x, double u, const Point& q) const {
  const double lo_bound = model_.sigma_lower;
  const double hi_bound = model_.sigma_upper;
  auto h = [&](const Point& p) {
    const double val = model_(x, u, p);
    if (!std::isfinite(val)) throw SolverError("ill-posed Hamiltonian");
    return val;
  };
  double best = 0.0;
  for (const Point& d : directions_) {
    const double qd = q.dot(d);
    if (qd <= 0.0) continue;
    if (h(lo_bound * d) > 0.0) throw SolverError("sigma_* bound violated");
    double lo = lo_bound;
    double hi = hi_bound;
    if (h(hi * d) <= 0.0) {
      lo = hi;
    } else {
      while (hi - lo > tol_) {
        const double mid = 0.5 * (lo + hi);
        (h(mid * d) <= 0.0 ? lo : hi) = mid;
      }
    }
    best = std::max(best, qd * lo);
  }
  return best;
}

double radial_extent(const HamiltonianModel& m, const Point& x, double u, const Point& d, double tol) {
  auto h = [&](double r) {
    const double val = m(x, u, r * d);
    if (!std::isfinite(val)) throw SolverError("ill-posed Hamiltonian");
    return val;
  };
  if (h(0.0) > 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(m.sigma_upper, 1e-3);
  int expansions = 0;
  while (h(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double minkowski_normalize(const HamiltonianModel& m, const Point& x, double u, const Point& p) {
  const double len = p.norm();
  if (len == 0.0) return -1.0;
  const double extent = radial_extent(m, x, u, p / len);
  return len / extent - 1.0;
}

BoundsReport verify_bounds(const HamiltonianModel& m, const std::vector<ProbePoint>& probes, int dim, int directions,
                           double tol) {
  if (probes.empty()) throw ValidationError("verify_bounds needs at least one probe");
  BoundsReport report;
  const auto dirs = unit_directions(dim, directions);
  for (const ProbePoint& probe : probes) {
    ProbeResult r;
    r.probe = probe;
    r.min_extent = std::numeric_limits<double>::infinity();
    r.max_extent = 0.0;
    double worst_violation = -std::numeric_limits<double>::infinity();
    for (const Point& d : dirs) {
      const double ext = radial_extent(m, probe.x, probe.u, d);
      r.min_extent = std::min(r.min_extent, ext);
      r.max_extent = std::max(r.max_extent, ext);
      const double below = m.sigma_lower * (1.0 - tol) - ext;
      const double above = ext - m.sigma_upper * (1.0 + tol);
      const double violation = std::max(below, above);
      if (violation > worst_violation) {
        worst_violation = violation;
        r.worst_direction = d;
        r.worst_extent = ext;
      }
    }
    r.pass = worst_violation <= 0.0;
    report.pass = report.pass && r.pass;
    report.probes.push_back(r);
  }
  return report;
}

}  // namespace accreta
