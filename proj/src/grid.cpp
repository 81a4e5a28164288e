#include "accreta/grid.hpp"

#include <algorithm>
#include <deque>

namespace accreta {

Grid::Grid(int dim, const Point& origin, double spacing, const Index3& shape)
    : dim_(dim), origin_(origin), spacing_(spacing), shape_(shape) {
  if (dim != 2 && dim != 3) throw ValidationError("grid dimension must be 2 or 3");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("grid spacing must be positive");
  for (int a = 0; a < dim; ++a)
    if (shape[a] < 3) throw ValidationError("grid shape entries must be >= 3");
  if (dim == 2) {
    shape_[2] = 1;
    origin_[2] = 0.0;
  }
}

NodeId Grid::nearest_node(const Point& p) const {
  const Eigen::Vector3d c = lattice_coords(p);
  Index3 idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    idx[a] = std::clamp(static_cast<int>(std::lround(c[a])), 0, shape_[a] - 1);
  return node(idx);
}

bool Grid::on_frame(NodeId n) const {
  const Index3 idx = index(n);
  for (int a = 0; a < dim_; ++a)
    if (idx[a] == 0 || idx[a] == shape_[a] - 1) return true;
  return false;
}

Mask::Mask(const Grid& grid) : grid_(grid), bits_(static_cast<std::size_t>(grid.size()), 0) {}

Mask::Mask(const Grid& grid, std::vector<std::uint8_t> membership) : grid_(grid), bits_(std::move(membership)) {
  if (static_cast<NodeId>(bits_.size()) != grid_.size()) throw Error("mask size does not match grid");
  refresh();
}

void Mask::refresh() {
  count_ = 0;
  NodeId first = -1;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) {
      bits_[i] = 1;
      ++count_;
      if (first < 0) first = static_cast<NodeId>(i);
    }
  }
  connected_ = false;
  if (count_ == 0) return;
  std::vector<std::uint8_t> seen(bits_.size(), 0);
  std::deque<NodeId> queue{first};
  seen[static_cast<std::size_t>(first)] = 1;
  NodeId reached = 0;
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    ++reached;
    grid_.for_each_axis_neighbor(n, [&](NodeId nb) {
      const auto k = static_cast<std::size_t>(nb);
      if (bits_[k] && !seen[k]) {
        seen[k] = 1;
        queue.push_back(nb);
      }
    });
  }
  connected_ = reached == count_;
}

std::vector<NodeId> Mask::members() const {
  std::vector<NodeId> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(static_cast<NodeId>(i));
  return out;
}

namespace {

template <typename Op>
Mask combine(const Mask& a, const Mask& b, Op op) {
  if (a.grid() != b.grid()) throw Error("masks live on different grids");
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = op(a.bits()[i], b.bits()[i]) ? 1 : 0;
  return Mask(a.grid(), std::move(bits));
}

}  // namespace

Mask Mask::operator|(const Mask& other) const {
  return combine(*this, other, [](auto x, auto y) { return x || y; });
}
Mask Mask::operator&(const Mask& other) const {
  return combine(*this, other, [](auto x, auto y) { return x && y; });
}
Mask Mask::operator-(const Mask& other) const {
  return combine(*this, other, [](auto x, auto y) { return x && !y; });
}

bool Mask::subset_of(const Mask& other) const {
  if (grid_ != other.grid_) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

Mask build_mask_from_predicate(const Grid& grid, const Predicate& predicate) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(grid.size()));
  for (NodeId n = 0; n < grid.size(); ++n) bits[static_cast<std::size_t>(n)] = predicate(grid.position(n)) ? 1 : 0;
  Mask m(grid, std::move(bits));
  if (m.empty()) throw ValidationError("empty set");
  return m;
}

Mask sublevel(const ScalarField& v, double t) {
  const Grid& g = v.grid();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.size()), 0);
  for (NodeId n = 0; n < g.size(); ++n)
    if (v.has(n) && v[n] < t) bits[static_cast<std::size_t>(n)] = 1;
  return Mask(g, std::move(bits));
}

std::vector<NodeId> boundary_nodes(const Mask& m) {
  const Grid& g = m.grid();
  std::vector<NodeId> out;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!m.contains(n)) continue;
    const Index3 idx = g.index(n);
    bool boundary = false;
    for (int a = 0; a < g.dim() && !boundary; ++a) {
      for (int s : {-1, 1}) {
        Index3 nb = idx;
        nb[a] += s;
        if (!m.contains(nb)) {
          boundary = true;
          break;
        }
      }
    }
    if (boundary) out.push_back(n);
  }
  return out;
}

Mask component_containing(const Mask& m, const std::vector<NodeId>& seeds) {
  const Grid& g = m.grid();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.size()), 0);
  std::deque<NodeId> queue;
  for (NodeId s : seeds) {
    if (m.contains(s) && !bits[static_cast<std::size_t>(s)]) {
      bits[static_cast<std::size_t>(s)] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeId n = queue.front();
    queue.pop_front();
    g.for_each_axis_neighbor(n, [&](NodeId nb) {
      const auto k = static_cast<std::size_t>(nb);
      if (m.contains(nb) && !bits[k]) {
        bits[k] = 1;
        queue.push_back(nb);
      }
    });
  }
  return Mask(g, std::move(bits));
}

std::vector<Issue> DomainSpec::validate() const {
  std::vector<Issue> issues;
  auto add = [&](const char* assumption, std::string msg) { issues.push_back({assumption, std::move(msg)}); };
  if (omega.empty()) add("domain-nonempty-connected", "omega is empty");
  if (v0.empty()) add("seed-nonempty-john", "V0 is empty");
  if (omega.grid() != v0.grid()) {
    add("seed-inside-domain", "omega and V0 live on different grids");
    return issues;
  }
  if (!v0.subset_of(omega)) add("seed-inside-domain", "V0 is not contained in omega");
  if (!omega.empty() && !omega.connected()) add("domain-nonempty-connected", "omega is not connected");
  if (!v0.empty() && !v0.connected()) add("seed-nonempty-john", "V0 is not connected (John sets are connected)");
  const Grid& g = omega.grid();
  if (x0 < 0 || x0 >= g.size() || !v0.contains(x0)) add("seed-nonempty-john", "John center x0 is not a V0 node");
  if (!(L >= 1.0) || !std::isfinite(L)) add("geodesic-comparability", "constant L must be finite and >= 1");
  if (!(kappa0 > 0.0 && kappa0 <= 1.0)) add("seed-nonempty-john", "kappa0 must lie in (0,1]");
  if (gamma.empty()) add("dirichlet-on-seed-boundary", "Gamma is empty");
  std::vector<std::uint8_t> on_boundary(static_cast<std::size_t>(g.size()), 0);
  for (NodeId n : boundary_nodes(omega)) on_boundary[static_cast<std::size_t>(n)] = 1;
  for (NodeId n : gamma) {
    if (n < 0 || n >= g.size() || !on_boundary[static_cast<std::size_t>(n)]) {
      add("dirichlet-on-seed-boundary", "Gamma node " + std::to_string(n) + " is not on the boundary of omega");
      continue;
    }
    bool adjacent = v0.contains(n);
    g.for_each_axis_neighbor(n, [&](NodeId nb) { adjacent = adjacent || v0.contains(nb); });
    if (!adjacent) add("dirichlet-on-seed-boundary", "Gamma node " + std::to_string(n) + " is not adjacent to V0");
  }
  return issues;
}

}  // namespace accreta
