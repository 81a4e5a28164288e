#include "accreta/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "accreta/error.hpp"

namespace accreta {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path sidecar(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

fs::path tree_path(const fs::path& csv) {
  return csv.parent_path() / (csv.stem().string() + "_tree.csv");
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  return in;
}

void write_rows(const fs::path& csv, const Grid& g, const std::function<bool(NodeId)>& keep,
                const std::function<double(NodeId)>& value) {
  std::ofstream out = open_out(csv);
  out << (g.dim() == 2 ? "i,j,x,y,value\n" : "i,j,k,x,y,z,value\n");
  std::string line;
  for (NodeId n = 0; n < g.size(); ++n) {
    if (!keep(n)) continue;
    const Index3 idx = g.index(n);
    const Point p = g.position(n);
    line.clear();
    for (int a = 0; a < g.dim(); ++a) line += std::to_string(idx[a]) + ",";
    for (int a = 0; a < g.dim(); ++a) line += fmt(p[a]) + ",";
    line += fmt(value(n));
    line += '\n';
    out << line;
  }
}

void write_sidecar(const fs::path& csv, const Grid& g, const std::string& role, const json& extra = json::object()) {
  json j = grid_to_json(g);
  j["role"] = role;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_json(sidecar(csv), j);
}

// Calls f(node, value) for each data row.
void read_rows(const fs::path& csv, const Grid& g, const std::function<void(NodeId, double)>& f) {
  std::ifstream in = open_in(csv);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty field file " + csv.string());
  const int cols = 2 * g.dim() + 1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != cols)
      throw Error(csv.string() + ":" + std::to_string(row) + ": expected " + std::to_string(cols) + " columns");
    Index3 idx{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) idx[a] = std::stoi(cells[static_cast<std::size_t>(a)]);
    if (!g.contains(idx)) throw Error(csv.string() + ":" + std::to_string(row) + ": index outside the grid");
    f(g.node(idx), std::stod(cells.back()));
  }
}

}  // namespace

json grid_to_json(const Grid& g) {
  json j;
  j["dim"] = g.dim();
  j["origin"] = json::array();
  j["shape"] = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    j["origin"].push_back(g.origin()[a]);
    j["shape"].push_back(g.shape()[a]);
  }
  j["spacing"] = g.spacing();
  return j;
}

Grid grid_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim != 2 && dim != 3) throw ValidationError("grid dim must be 2 or 3");
    const auto& o = j.at("origin");
    const auto& s = j.at("shape");
    if (static_cast<int>(o.size()) != dim || static_cast<int>(s.size()) != dim)
      throw ValidationError("grid origin and shape need dim entries");
    Point origin = Point::Zero();
    Index3 shape{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
      origin[a] = o[static_cast<std::size_t>(a)].get<double>();
      shape[a] = s[static_cast<std::size_t>(a)].get<int>();
    }
    return Grid(dim, origin, j.at("spacing").get<double>(), shape);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed grid: ") + e.what());
  }
}

void write_field(const fs::path& csv, const ScalarField& f, const std::string& role) {
  write_rows(csv, f.grid(), [&](NodeId n) { return f.has(n); }, [&](NodeId n) { return f[n]; });
  write_sidecar(csv, f.grid(), role);
}

void write_dense_field(const fs::path& csv, const Grid& g, const Eigen::VectorXd& values, const std::string& role) {
  write_rows(csv, g, [](NodeId) { return true; }, [&](NodeId n) { return values[n]; });
  write_sidecar(csv, g, role);
}

void write_mask(const fs::path& csv, const Mask& m, const std::string& role) {
  write_rows(csv, m.grid(), [](NodeId) { return true; }, [&](NodeId n) { return m.contains(n) ? 1.0 : 0.0; });
  write_sidecar(csv, m.grid(), role);
}

ScalarField read_field(const fs::path& csv, const Grid& grid) {
  ScalarField f(grid);
  read_rows(csv, grid, [&](NodeId n, double v) { f[n] = v; });
  return f;
}

ScalarField read_field(const fs::path& csv) { return read_field(csv, grid_from_json(read_json(sidecar(csv)))); }

Mask read_mask(const fs::path& csv, const Grid& grid) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(grid.size()), 0);
  read_rows(csv, grid, [&](NodeId n, double v) { bits[static_cast<std::size_t>(n)] = v != 0.0 ? 1 : 0; });
  return Mask(grid, std::move(bits));
}

void write_attachment(const fs::path& csv, const AttachmentField& a) {
  write_rows(csv, a.grid(), [&](NodeId n) { return a.v.has(n); }, [&](NodeId n) { return a.v[n]; });
  write_sidecar(csv, a.grid(), "v", json{{"stencil_radius", a.stencil_radius}});
  std::ofstream out = open_out(tree_path(csv));
  out << "node,predecessor\n";
  for (NodeId n = 0; n < a.grid().size(); ++n)
    if (a.v.has(n)) out << n << ',' << a.predecessor[static_cast<std::size_t>(n)] << '\n';
}

AttachmentField read_attachment(const fs::path& csv) {
  const json meta = read_json(sidecar(csv));
  AttachmentField a;
  a.v = read_field(csv, grid_from_json(meta));
  a.stencil_radius = meta.value("stencil_radius", 2);
  a.predecessor.assign(static_cast<std::size_t>(a.grid().size()), -1);
  std::ifstream in = open_in(tree_path(csv));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const NodeId n = std::stoll(line.substr(0, comma));
    const NodeId p = std::stoll(line.substr(comma + 1));
    if (n < 0 || n >= a.grid().size()) throw Error("tree node outside the grid in " + tree_path(csv).string());
    a.predecessor[static_cast<std::size_t>(n)] = p;
  }
  return a;
}

std::string slice_name(std::size_t m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t_%04zu.csv", m);
  return buf;
}

void write_time_field(const fs::path& dir, const TimeField& u) {
  fs::create_directories(dir);
  for (std::size_t m = 0; m < u.slices.size(); ++m) {
    const ScalarField& s = u.slices[m];
    write_rows(dir / slice_name(m), u.grid, [&](NodeId n) { return s.has(n); }, [&](NodeId n) { return s[n]; });
  }
  json idx = grid_to_json(u.grid);
  idx["role"] = "u";
  idx["times"] = u.times;
  write_json(dir / "index.json", idx);
}

TimeField read_time_field(const fs::path& dir) {
  const json idx = read_json(dir / "index.json");
  TimeField u{grid_from_json(idx), idx.at("times").get<std::vector<double>>(), {}};
  for (std::size_t m = 0; m < u.times.size(); ++m) u.slices.push_back(read_field(dir / slice_name(m), u.grid));
  return u;
}

void write_trace(const fs::path& dir, const ActivationTrace& ku) {
  fs::create_directories(dir);
  for (std::size_t m = 0; m < ku.values.size(); ++m)
    write_rows(dir / slice_name(m), ku.grid, [](NodeId) { return true; }, [&](NodeId n) { return ku.values[m][n]; });
  json idx = grid_to_json(ku.grid);
  idx["role"] = "ku";
  idx["times"] = ku.times;
  write_json(dir / "index.json", idx);
}

ActivationTrace read_trace(const fs::path& dir) {
  const json idx = read_json(dir / "index.json");
  ActivationTrace ku{grid_from_json(idx), idx.at("times").get<std::vector<double>>(), {}};
  for (std::size_t m = 0; m < ku.times.size(); ++m)
    ku.values.push_back(read_field(dir / slice_name(m), ku.grid).extended(0.0));
  return ku;
}

void write_curve_csv(const fs::path& csv, const std::vector<Curve>& curves) {
  std::ofstream out = open_out(csv);
  out << "curve,vertex,node,x,y,z\n";
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (std::size_t k = 0; k < curves[c].vertices.size(); ++k) {
      const Point& p = curves[c].vertices[k];
      out << c << ',' << k << ',' << curves[c].nodes[k] << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2])
          << '\n';
    }
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out = open_out(file);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  std::ifstream in = open_in(file);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + file.string() + ": " + e.what());
  }
}

}  // namespace accreta
