#include "spinflat/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "spinflat/errors.hpp"

namespace spinflat {

std::string format17(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw IOError("number formatting failed");
  return std::string(buf, end);
}

std::string mesh_csv(const SurfaceMesh& mesh) {
  const GridDomain& g = mesh.grid;
  std::string out = "j,k,x,y,x0,x1,x2,x3\n";
  out.reserve(g.size() * 110);
  for (std::size_t k = 0; k < g.ny; ++k)
    for (std::size_t j = 0; j < g.nx; ++j) {
      const MinkVec& v = mesh.F(j, k);
      out += std::to_string(j) + ',' + std::to_string(k) + ',' + format17(g.x(j)) + ',' +
             format17(g.y(k));
      for (int c = 0; c < 4; ++c) out += ',' + format17(v[c]);
      out += '\n';
    }
  return out;
}

std::string mesh_obj(const SurfaceMesh& mesh, Projection p) {
  const GridDomain& g = mesh.grid;
  std::string out;
  for (std::size_t k = 0; k < g.ny; ++k)
    for (std::size_t j = 0; j < g.nx; ++j) {
      const MinkVec& v = mesh.F(j, k);
      const std::array<double, 3> q =
          p == Projection::PoincareBall ? poincare_ball(v) : std::array<double, 3>{v.x1, v.x2, v.x3};
      out += "v " + format17(q[0]) + ' ' + format17(q[1]) + ' ' + format17(q[2]) + '\n';
    }
  auto idx = [&](std::size_t j, std::size_t k) { return std::to_string(k * g.nx + j + 1); };
  for (std::size_t k = 0; k + 1 < g.ny; ++k)
    for (std::size_t j = 0; j + 1 < g.nx; ++j) {
      out += "f " + idx(j, k) + ' ' + idx(j + 1, k) + ' ' + idx(j + 1, k + 1) + '\n';
      out += "f " + idx(j, k) + ' ' + idx(j + 1, k + 1) + ' ' + idx(j, k + 1) + '\n';
    }
  return out;
}

nlohmann::ordered_json mesh_json(const SurfaceMesh& mesh) {
  const GridDomain& g = mesh.grid;
  nlohmann::ordered_json j;
  j["grid"] = {{"x", {g.x_min, g.x_max}}, {"y", {g.y_min, g.y_max}}, {"nx", g.nx}, {"ny", g.ny}};
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : mesh.provenance) prov[k] = v;
  j["provenance"] = prov;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const MinkVec& v : mesh.F.data()) nodes.push_back({v.x0, v.x1, v.x2, v.x3});
  j["F"] = std::move(nodes);
  return j;
}

nlohmann::ordered_json mesh_json(const H3Mesh& mesh) {
  nlohmann::ordered_json j = mesh_json(mesh.as_surface());
  nlohmann::ordered_json herm = nlohmann::ordered_json::array();
  for (const Mat2C& F : mesh.F.data())
    herm.push_back({F.a11.real(), F.a12.real(), F.a12.imag(), F.a22.real()});
  j["herm"] = std::move(herm);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IOError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

namespace {

double parse_number(std::string_view s, std::size_t line) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw IOError("mesh CSV line " + std::to_string(line) + ": bad number '" + std::string(s) +
                  "'");
  return v;
}

}  // namespace

SurfaceMesh parse_mesh_csv(const std::string& text) {
  std::istringstream in(text);
  std::string row;
  std::size_t line = 0;
  if (!std::getline(in, row)) throw IOError("mesh CSV is empty");
  ++line;
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (row != "j,k,x,y,x0,x1,x2,x3") throw IOError("mesh CSV header must be j,k,x,y,x0,x1,x2,x3");

  struct Node {
    double x, y;
    MinkVec F;
  };
  std::map<std::pair<std::size_t, std::size_t>, Node> nodes;
  std::size_t nx = 0, ny = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(row);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 8)
      throw IOError("mesh CSV line " + std::to_string(line) + ": expected 8 columns");
    const double jd = parse_number(cells[0], line), kd = parse_number(cells[1], line);
    if (jd < 0 || kd < 0 || jd != std::floor(jd) || kd != std::floor(kd))
      throw IOError("mesh CSV line " + std::to_string(line) + ": bad node index");
    const auto j = static_cast<std::size_t>(jd), k = static_cast<std::size_t>(kd);
    Node n{parse_number(cells[2], line), parse_number(cells[3], line), {}};
    for (int c = 0; c < 4; ++c) n.F[c] = parse_number(cells[4 + c], line);
    if (!nodes.emplace(std::pair{j, k}, n).second)
      throw IOError("mesh CSV line " + std::to_string(line) + ": duplicate node");
    nx = std::max(nx, j + 1);
    ny = std::max(ny, k + 1);
  }
  if (nodes.size() != nx * ny) throw IOError("mesh CSV does not cover a full grid");

  SurfaceMesh mesh;
  const Node& lo = nodes.at({0, 0});
  const Node& hi = nodes.at({nx - 1, ny - 1});
  try {
    mesh.grid = GridDomain(lo.x, hi.x, lo.y, hi.y, nx, ny);
  } catch (const InvalidGrid& e) {
    throw IOError(std::string("mesh CSV grid: ") + e.what());
  }
  mesh.F = GridField<MinkVec>(mesh.grid);
  const double tol = 1e-9 * std::max({1.0, std::abs(lo.x), std::abs(hi.x), std::abs(lo.y),
                                      std::abs(hi.y)});
  for (const auto& [jk, n] : nodes) {
    const auto [j, k] = jk;
    if (std::abs(n.x - mesh.grid.x(j)) > tol || std::abs(n.y - mesh.grid.y(k)) > tol)
      throw IOError("mesh CSV node (" + std::to_string(j) + ", " + std::to_string(k) +
                    ") is off the uniform grid");
    mesh.F(j, k) = n.F;
  }
  mesh.provenance.emplace_back("source", "csv");
  return mesh;
}

}  // namespace spinflat
