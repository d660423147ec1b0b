#pragma once

// Mesh files. All numbers are written locale-independently with 17
// significant digits (CSV, OBJ) or as shortest round-trip decimals (JSON),
// so identical meshes give byte-identical files.
//
// CSV: header "j,k,x,y,x0,x1,x2,x3", then one row per node, j fastest.
// OBJ: "v a b c" per node (j fastest), then two "f" triangles per grid cell
//      with 1-based indices, counter-clockwise in (x, y).

#include <array>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "spinflat/hyperbolic.hpp"
#include "spinflat/mesh.hpp"

namespace spinflat {

enum class Projection {
  DropX0,        // (x1, x2, x3)
  PoincareBall,  // (x1, x2, x3) / (1 + x0)
};

// Shortest text with 17 significant digits, "C" locale.
std::string format17(double v);

std::string mesh_csv(const SurfaceMesh& mesh);
std::string mesh_obj(const SurfaceMesh& mesh, Projection p);
nlohmann::ordered_json mesh_json(const SurfaceMesh& mesh);
// Adds the Herm(2) entries [Re a11, Re a12, Im a12, Re a22] per node.
nlohmann::ordered_json mesh_json(const H3Mesh& mesh);

// Throws IOError.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Parses the CSV layout above; the grid is recovered from the (j, k, x, y)
// columns and must be uniform. Throws IOError on malformed input.
SurfaceMesh parse_mesh_csv(const std::string& text);

}  // namespace spinflat
