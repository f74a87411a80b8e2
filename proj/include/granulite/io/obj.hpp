#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include "granulite/geometry/types.hpp"

namespace granulite::io {

// Wavefront OBJ import: `v` and `f` records only. Face corners may carry
// texture/normal references (a/b/c), which are ignored; negative indices count
// back from the last vertex; polygons are fan-triangulated.
inline TriMesh read_obj(std::istream& is) {
  TriMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::string tag;
    if (!(in >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(in >> p.x() >> p.y() >> p.z())) throw ParseError("vertex needs 3 coordinates", line_no);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> idx;
      std::string corner;
      while (in >> corner) {
        long long v = 0;
        try {
          v = std::stoll(corner.substr(0, corner.find('/')));
        } catch (const std::exception&) {
          throw ParseError("malformed face corner '" + corner + "'", line_no);
        }
        const auto n = static_cast<long long>(mesh.vertices.size());
        if (v < 0) v += n + 1;
        if (v < 1 || v > n) throw ParseError("face references a missing vertex", line_no);
        idx.push_back(static_cast<std::uint32_t>(v - 1));
      }
      if (idx.size() < 3) throw ParseError("face needs at least 3 corners", line_no);
      for (std::size_t q = 1; q + 1 < idx.size(); ++q) mesh.faces.push_back({idx[0], idx[q], idx[q + 1]});
    }
  }
  return mesh;
}

inline TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_obj(is);
}

}  // namespace granulite::io
