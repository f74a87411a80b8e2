#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include "granulite/sfm/camera.hpp"

namespace granulite::sfm {

// Plain-text scene:
//   CAM i p00 p01 p02 p03 p10 ... p23   (row-major 3x4 projection matrix)
//   PT j x y z
//   OBS i j u v
// '#' starts a comment. Ids must be dense and listed in order. Values are written
// with 17 significant digits so a write/read cycle is exact.
struct SceneFile {
  SceneEstimate scene;
  std::vector<Observation> observations;
};

inline void write_scene(std::ostream& os, const SceneEstimate& scene, const std::vector<Observation>& obs) {
  std::ostringstream out;
  out.precision(17);
  out << "# granulite scene: " << scene.cameras.size() << " cameras, " << scene.points.size() << " points, " << obs.size()
      << " observations\n";
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    out << "CAM " << i;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) out << ' ' << scene.cameras[i].P(r, c);
    out << '\n';
  }
  for (std::size_t j = 0; j < scene.points.size(); ++j) {
    const Vec3& p = scene.points[j];
    out << "PT " << j << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  for (const auto& o : obs) out << "OBS " << o.camera << ' ' << o.point << ' ' << o.pixel.x() << ' ' << o.pixel.y() << '\n';
  os << out.str();
}

inline SceneFile read_scene(std::istream& is) {
  SceneFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::string tag;
    if (!(in >> tag)) continue;
    std::size_t id = 0;
    if (tag == "CAM") {
      CameraView cam;
      if (!(in >> id)) throw ParseError("CAM record needs an id", line_no);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
          if (!(in >> cam.P(r, c))) throw ParseError("CAM record needs 12 matrix entries", line_no);
      if (id != file.scene.cameras.size()) throw ParseError("camera ids must be consecutive from 0", line_no);
      file.scene.cameras.push_back(cam);
    } else if (tag == "PT") {
      Vec3 p;
      if (!(in >> id >> p.x() >> p.y() >> p.z())) throw ParseError("PT record needs an id and 3 coordinates", line_no);
      if (id != file.scene.points.size()) throw ParseError("point ids must be consecutive from 0", line_no);
      file.scene.points.push_back(p);
    } else if (tag == "OBS") {
      Observation o;
      if (!(in >> o.camera >> o.point >> o.pixel.x() >> o.pixel.y()))
        throw ParseError("OBS record needs camera, point, u, v", line_no);
      file.observations.push_back(o);
    } else {
      throw ParseError("unknown record '" + tag + "'", line_no);
    }
    std::string extra;
    if (in >> extra) throw ParseError("trailing data '" + extra + "'", line_no);
  }
  check_observations(file.scene, file.observations);
  return file;
}

inline void write_scene(const std::filesystem::path& path, const SceneEstimate& scene, const std::vector<Observation>& obs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_scene(os, scene, obs);
  if (!os) throw IoError("failed writing " + path.string());
}

inline SceneFile read_scene(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_scene(is);
}

}  // namespace granulite::sfm
