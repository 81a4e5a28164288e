#include "accreta/config.hpp"

#include <cstdio>
#include <cstdlib>

#include "accreta/error.hpp"

namespace accreta {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

Point read_point(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError(std::string(what) + " needs " + std::to_string(dim) + " coordinates");
  Point p = Point::Zero();
  for (int a = 0; a < dim; ++a) p[a] = j[static_cast<std::size_t>(a)].get<double>();
  return p;
}

using Pred = std::function<bool(const Point&)>;

// Primitives are open (strict comparison at node positions) unless "closed" is set;
// a tolerance of 1e-9 h decides nodes lying on the declared boundary.
Pred shape_predicate(const Grid& grid, const json& s, const fs::path& base_dir) {
  const std::string type = s.at("type").get<std::string>();
  const int dim = grid.dim();
  const double eps = (s.value("closed", false) ? 1.0 : -1.0) * 1e-9 * grid.spacing();
  if (type == "all") return [](const Point&) { return true; };
  if (type == "box") {
    const Point lo = read_point(s.at("min"), dim, "box min"), hi = read_point(s.at("max"), dim, "box max");
    return [=](const Point& p) {
      for (int a = 0; a < dim; ++a)
        if (!(p[a] > lo[a] - eps && p[a] < hi[a] + eps)) return false;
      return true;
    };
  }
  if (type == "ball") {
    const Point c = read_point(s.at("center"), dim, "ball center");
    const double r = s.at("radius").get<double>();
    if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
    return [=](const Point& p) { return (p - c).norm() < r + eps; };
  }
  if (type == "halfspace") {
    const Point n = read_point(s.at("normal"), dim, "halfspace normal");
    const double off = s.at("offset").get<double>();
    return [=](const Point& p) { return n.dot(p) < off + eps; };
  }
  if (type == "union" || type == "intersection") {
    std::vector<Pred> parts;
    for (const auto& c : s.at("of")) parts.push_back(shape_predicate(grid, c, base_dir));
    if (parts.empty()) throw ValidationError(type + " needs at least one shape");
    const bool any = type == "union";
    return [parts, any](const Point& p) {
      for (const auto& f : parts)
        if (f(p) == any) return any;
      return !any;
    };
  }
  if (type == "difference") {
    Pred a = shape_predicate(grid, s.at("a"), base_dir), b = shape_predicate(grid, s.at("b"), base_dir);
    return [a, b](const Point& p) { return a(p) && !b(p); };
  }
  if (type == "mask_file") {
    fs::path path = s.at("path").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    const Mask m = read_mask(path, grid);
    return [m](const Point& p) { return m.contains(m.grid().nearest_node(p)); };
  }
  throw ValidationError("unknown shape type '" + type + "'");
}

UProfile parse_profile(const json& j, std::vector<double>& probe_u) {
  if (j.is_number()) return UProfile::constant(j.get<double>());
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return UProfile::constant(j.at("value").get<double>());
  if (type == "affine") {
    const double lo = j.value("u_min", 0.0), hi = j.value("u_max", 1.0);
    probe_u.insert(probe_u.end(), {lo, hi, 0.5 * (lo + hi)});
    return UProfile::affine(j.at("g0").get<double>(), j.at("g1").get<double>(), lo, hi);
  }
  if (type == "table") {
    auto u = j.at("u").get<std::vector<double>>();
    probe_u.insert(probe_u.end(), u.begin(), u.end());
    return UProfile::table(std::move(u), j.at("values").get<std::vector<double>>());
  }
  throw ValidationError("unknown profile type '" + type + "'");
}

}  // namespace

Mask shape_mask(const Grid& grid, const json& shape, const fs::path& base_dir) {
  const std::string type = shape.at("type").get<std::string>();
  if (type == "mask_file") {
    fs::path path = shape.at("path").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    Mask m = read_mask(path, grid);
    if (m.empty()) throw ValidationError("empty set");
    return m;
  }
  return build_mask_from_predicate(grid, shape_predicate(grid, shape, base_dir));
}

RunConfig parse_config(const json& input, const fs::path& base_dir) {
  if (input.contains("config") && input.contains("config_hash")) {
    fs::path base = input.value("base_dir", base_dir.string());
    return parse_config(input.at("config"), base);
  }
  RunConfig c;
  c.source = input;
  c.base_dir = base_dir;
  try {
    c.grid = grid_from_json(input.at("grid"));
    const json& d = input.at("domain");
    c.domain.omega = shape_mask(c.grid, d.at("omega"), base_dir);
    c.domain.v0 = shape_mask(c.grid, d.at("v0"), base_dir);
    if (d.contains("gamma")) {
      const Mask sel = d.at("gamma").is_null() ? Mask(c.grid) : shape_mask(c.grid, d.at("gamma"), base_dir);
      for (NodeId n : boundary_nodes(c.domain.omega))
        if (sel.contains(n)) c.domain.gamma.push_back(n);
    }
    c.domain.x0 = c.grid.nearest_node(read_point(d.at("x0"), c.grid.dim(), "x0"));
    c.domain.L = d.value("L", 1.0);
    c.domain.kappa0 = d.value("kappa0", 1.0);
    c.omega_inside_window = d.value("omega_inside_window", false);

    const json& h = input.at("hamiltonian");
    const std::string type = h.at("type").get<std::string>();
    const double lo = h.at("sigma_lower").get<double>(), hi = h.at("sigma_upper").get<double>();
    c.probe_u = {-1.0, 0.0, 1.0};
    if (type == "eikonal") {
      c.model = make_eikonal(parse_profile(h.at("gamma"), c.probe_u), lo, hi);
    } else if (type == "ellipsoidal") {
      std::vector<UProfile> axes;
      for (const auto& a : h.at("axes")) axes.push_back(parse_profile(a, c.probe_u));
      if (static_cast<int>(axes.size()) != c.grid.dim()) throw ValidationError("ellipsoidal needs one axis per dimension");
      c.model = make_ellipsoidal(std::move(axes), lo, hi);
    } else {
      throw ValidationError("unknown hamiltonian type '" + type + "' (custom models are available through the library)");
    }
    c.direction_samples = h.value("direction_samples", 0);

    const json& k = input.at("kernels");
    const json& kt = k.at("time");
    if (kt.at("type") == "exponential") c.kernels.k = TimeKernel::exponential(kt.at("lambda").get<double>());
    else if (kt.at("type") == "table")
      c.kernels.k = TimeKernel::table(kt.at("s").get<std::vector<double>>(), kt.at("k").get<std::vector<double>>());
    else throw ValidationError("unknown time kernel type");
    const json& ks = k.at("space");
    if (ks.at("type") == "gaussian") c.kernels.phi = SpatialKernel::gaussian(ks.at("width").get<double>(), ks.value("radius", 0.0));
    else if (ks.at("type") == "radial_table")
      c.kernels.phi = SpatialKernel::radial_table(ks.at("r").get<std::vector<double>>(), ks.at("phi").get<std::vector<double>>());
    else throw ValidationError("unknown spatial kernel type");

    const json cp = input.value("coupling", json::object());
    CouplingConfig& cc = c.coupling;
    cc.T = cp.value("T", cc.T);
    cc.M = cp.value("M", cc.M);
    cc.R = cp.value("R", cc.R);
    cc.tol = cp.value("tol", cc.tol);
    cc.max_iter = cp.value("max_iter", cc.max_iter);
    cc.theta = cp.value("theta", cc.theta);
    cc.stencil_radius = cp.value("stencil_radius", cc.stencil_radius);
    cc.cg_tol = cp.value("cg_tol", cc.cg_tol);
    cc.threads = effective_threads(cp.value("threads", cc.threads));
    const std::string policy = cp.value("past_horizon", std::string("error"));
    if (policy == "hold") cc.past_horizon = HorizonPolicy::hold;
    else if (policy != "error") throw ValidationError("past_horizon must be 'error' or 'hold'");

    const json dg = input.value("diagnostics", json::object());
    c.diagnostics.curve_samples = dg.value("curve_samples", c.diagnostics.curve_samples);
    c.diagnostics.john_samples = dg.value("john_samples", c.diagnostics.john_samples);
    c.diagnostics.T = cc.T;
    c.diagnostics.M = cc.M;
    c.diagnostics.R = window_radius(c.grid, cc);
    c.output = input.value("output", c.output);
    c.seed = input.value("seed", 0LL);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& file) {
  return parse_config(read_json(file), fs::absolute(file).parent_path());
}

std::vector<Issue> validate(const RunConfig& c) {
  std::vector<Issue> out = c.domain.validate();
  for (Issue& i : c.coupling.validate()) out.push_back(std::move(i));

  // Declared sigma bounds against the measured support radii on a subsample of omega.
  std::vector<ProbePoint> probes;
  const auto members = c.domain.omega.members();
  const std::size_t stride = std::max<std::size_t>(1, members.size() / 64);
  for (std::size_t k = 0; k < members.size(); k += stride)
    for (double u : c.probe_u) probes.push_back({c.grid.position(members[k]), u});
  const BoundsReport br = verify_bounds(c.model, probes, c.grid.dim());
  if (!br.pass) {
    for (const ProbeResult& p : br.probes)
      if (!p.pass) {
        out.push_back({"sigma-ball-sandwich", "support radius " + std::to_string(p.worst_extent) + " at u = " +
                                                  std::to_string(p.probe.u) + " lies outside [sigma_lower, sigma_upper] = [" +
                                                  std::to_string(c.model.sigma_lower) + ", " +
                                                  std::to_string(c.model.sigma_upper) + "]"});
        break;
      }
  }

  const TimeKernel& k = c.kernels.k;
  if (!(k.l1_norm() < std::numeric_limits<double>::infinity()) || k(0.0) < 0.0)
    out.push_back({"kernel-integrability", "time kernel must be nonnegative with finite integral"});
  if (k.horizon() < c.coupling.T)
    out.push_back({"kernel-integrability", "time kernel table is shorter than the time horizon T"});
  const double phi_int = c.kernels.phi.integral(c.grid.dim());
  if (!(phi_int > 0.0) || !std::isfinite(phi_int))
    out.push_back({"kernel-integrability", "spatial kernel must have a positive finite integral"});
  if (c.kernels.phi.radius() < c.grid.spacing())
    out.push_back({"kernel-integrability", "spatial kernel support is narrower than one grid spacing"});
  return out;
}

std::vector<Issue> warnings(const RunConfig& c) {
  if (c.omega_inside_window || !c.domain.validate().empty()) return {};
  return window_warnings(c.domain, c.model.sigma_lower, c.model.sigma_upper, c.coupling);
}

int effective_threads(int configured) {
  if (const char* env = std::getenv("ACCRETA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  return configured;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json manifest(const RunConfig& c, const std::string& command, const json& timings, const json& extra) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["version"] = kVersion;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  m["command"] = command;
  m["config_hash"] = config_hash(c.source);
  m["base_dir"] = c.base_dir.string();
  m["threads"] = c.coupling.threads;
  m["timings"] = timings;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  m["config"] = c.source;
  return m;
}

}  // namespace accreta
