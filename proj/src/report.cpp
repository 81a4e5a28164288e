#include "accreta/report.hpp"

#include <cmath>

namespace accreta {

namespace {

// JSON has no infinities; keep them readable as strings.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

json to_json(const Check& c) {
  return json{{"name", c.name},     {"measured", num(c.measured)}, {"bound", num(c.bound)},
              {"slack", num(c.slack)}, {"lower_bound", c.lower_bound}, {"pass", c.pass}};
}

json to_json(const RegularityReport& r) {
  json j;
  const TheoryConstants& k = r.constants;
  j["constants"] = {{"inv_sigma_lower", num(k.inv_sigma_lower)}, {"kappa_bar", num(k.kappa_bar)},
                    {"c1", num(k.c1)},
                    {"R", num(k.R)},
                    {"c3_offset", num(k.c3_offset)},
                    {"mu_T", num(r.lipschitz.holder_mu)}};
  j["checks"] = json::array();
  for (const Check& c : r.checks) j["checks"].push_back(to_json(c));
  j["time_pairs"] = json::array();
  for (const TimePair& p : r.lipschitz.pairs)
    j["time_pairs"].push_back({{"s", p.s},
                               {"t", p.t},
                               {"hausdorff", num(p.hausdorff)},
                               {"bound", num(p.bound)},
                               {"slack", num(p.slack)},
                               {"pass", p.pass},
                               {"measure_difference", num(p.measure_difference)}});
  j["holder_fit"] = {{"c", num(r.lipschitz.holder_c)}, {"mu", num(r.lipschitz.holder_mu)}};
  j["john"] = json::array();
  for (std::size_t i = 0; i < r.john_times.size(); ++i)
    j["john"].push_back({{"t", r.john_times[i]}, {"estimate", num(r.john_estimates[i])}});
  j["box_counting"] = {{"t", r.box_counting_time},
                       {"scales", r.box_counting.scales},
                       {"counts", r.box_counting.counts},
                       {"slope", num(r.box_counting.slope)}};
  j["pass"] = r.pass();
  return j;
}

json to_json(const SliceReport& r) {
  return json{{"t", r.t},
              {"unknowns", r.unknowns},
              {"dropped", r.dropped},
              {"iterations", r.iterations},
              {"residual", num(r.residual)},
              {"energy", num(r.energy)},
              {"integral", num(r.integral)},
              {"poincare", num(r.poincare)}};
}

json to_json(const std::vector<SliceReport>& r) {
  json j = json::array();
  for (const SliceReport& s : r) j.push_back(to_json(s));
  return j;
}

json history_json(const std::vector<IterationRecord>& history, Verdict verdict, double representation_residual,
                  const CouplingConfig& config) {
  json j;
  j["verdict"] = to_string(verdict);
  j["tol"] = config.tol;
  j["theta"] = config.theta;
  j["plain_scheme"] = config.theta == 1.0;
  j["representation_residual"] = num(representation_residual);
  j["iterations"] = json::array();
  for (const IterationRecord& r : history) {
    json h{{"j", r.j},
           {"delta", num(r.delta)},
           {"containment_excess", num(r.containment_excess)},
           {"containment_pass", r.containment_pass},
           {"v_max", num(r.v_max)},
           {"c1", num(r.c1)},
           {"beyond_horizon", r.beyond_horizon},
           {"max_slice_residual", num(r.max_slice_residual)},
           {"cg_iterations", r.cg_iterations}};
    h["hausdorff"] = json::array();
    for (const HausdorffDelta& d : r.hausdorff)
      h["hausdorff"].push_back({{"t", d.t}, {"distance", num(d.distance)}, {"bound", num(d.bound)}, {"pass", d.pass}});
    j["iterations"].push_back(std::move(h));
  }
  return j;
}

json elliptic_summary(const TimeField& u, double cg_tol) {
  json j = json::array();
  for (std::size_t m = 0; m < u.slices.size(); ++m) {
    const ScalarField& s = u.slices[m];
    const double e = dirichlet_energy(s), i = integral(s);
    const double gap = std::abs(e - i);
    j.push_back({{"t", u.times[m]},
                 {"energy", e},
                 {"integral", i},
                 {"energy_identity_gap", gap},
                 {"energy_identity_pass", gap <= 10.0 * cg_tol * i},
                 {"poincare", num(poincare_ratio(s, u.grid.spacing()))}});
  }
  return j;
}

json convolution_summary(const TimeField& u, const ActivationTrace& ku, const KernelPair& kp) {
  const SpatialStencil st = make_spatial_stencil(kp.phi, u.grid);
  const double sup_l2 = max_slice_l2(u);
  const double lip = measured_time_lipschitz(ku);
  const double lip_bound = time_lipschitz_bound(kp, st, sup_l2);
  double ku_max = 0.0;
  for (const auto& v : ku.values) ku_max = std::max(ku_max, v.cwiseAbs().maxCoeff());
  const double ubound = uniform_bound(kp, st, sup_l2, u.dt());
  return json{{"time_lipschitz", lip},    {"time_lipschitz_bound", lip_bound}, {"time_lipschitz_pass", lip <= lip_bound},
              {"sup_ku", ku_max},        {"uniform_bound", ubound},            {"uniform_pass", ku_max <= ubound},
              {"phi_l2", st.l2_norm},    {"sup_u_l2", sup_l2}};
}

}  // namespace accreta
