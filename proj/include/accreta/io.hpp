#ifndef ACCRETA_IO_HPP
#define ACCRETA_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "accreta/convolution.hpp"
#include "accreta/elliptic.hpp"
#include "accreta/hj.hpp"

namespace accreta {

namespace fs = std::filesystem;
using json = nlohmann::json;

json grid_to_json(const Grid& g);
Grid grid_from_json(const json& j);

/**
 * Field CSV: header "i,j[,k],x,y[,z],value", one row per supported node in
 * node order, values printed with 17 significant digits. A JSON sidecar with
 * the same stem carries the grid and the role.
 */
void write_field(const fs::path& csv, const ScalarField& f, const std::string& role);
/// Writes every node, absent nodes as `fill`.
void write_dense_field(const fs::path& csv, const Grid& g, const Eigen::VectorXd& values, const std::string& role);
void write_mask(const fs::path& csv, const Mask& m, const std::string& role);
ScalarField read_field(const fs::path& csv);
/// Reads the CSV against a known grid (no sidecar needed).
ScalarField read_field(const fs::path& csv, const Grid& grid);
Mask read_mask(const fs::path& csv, const Grid& grid);

/// Field CSV of v plus "<stem>_tree.csv" with the predecessor of every supported node.
void write_attachment(const fs::path& csv, const AttachmentField& a);
AttachmentField read_attachment(const fs::path& csv);

/// Directory with t_####.csv per sample and index.json (grid, times, role).
void write_time_field(const fs::path& dir, const TimeField& u);
TimeField read_time_field(const fs::path& dir);
void write_trace(const fs::path& dir, const ActivationTrace& ku);
ActivationTrace read_trace(const fs::path& dir);

void write_curve_csv(const fs::path& csv, const std::vector<Curve>& curves);

std::string slice_name(std::size_t m);
void write_json(const fs::path& file, const json& j);
json read_json(const fs::path& file);

}  // namespace accreta

#endif  // ACCRETA_IO_HPP
