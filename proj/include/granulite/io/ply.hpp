#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "granulite/seg/labels_io.hpp"

namespace granulite::io {

enum class PlyFormat { Ascii, BinaryLittleEndian };

// Contents of a PLY file: vertex attributes as a point cloud, plus triangles
// and per-face colors when a face element is present.
struct PlyData {
  PointCloud cloud;
  std::vector<Face> faces;
  std::vector<Rgb> face_colors;
  bool has_face_element = false;
  std::vector<std::string> warnings;

  TriMesh mesh() const { return TriMesh{cloud.positions, faces}; }
};

namespace detail {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline PlyType parse_type(const std::string& name, std::size_t line) {
  static const std::map<std::string, PlyType> types = {
      {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},  {"uint8", PlyType::UInt8},
      {"short", PlyType::Int16},   {"int16", PlyType::Int16},     {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},
      {"int", PlyType::Int32},     {"int32", PlyType::Int32},     {"uint", PlyType::UInt32},  {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64}, {"float64", PlyType::Float64}};
  const auto it = types.find(name);
  if (it == types.end()) throw ParseError("unknown PLY type '" + name + "'", line);
  return it->second;
}

inline std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float64;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Reads scalars either as whitespace-separated text or little-endian binary.
class PlyReader {
 public:
  PlyReader(std::istream& is, PlyFormat format, std::size_t header_lines, std::size_t header_bytes)
      : is_(is), format_(format), line_(header_lines), offset_(header_bytes) {}

  void begin_record() {
    if (format_ != PlyFormat::Ascii) return;
    std::string text;
    do {
      if (!std::getline(is_, text)) throw ParseError("unexpected end of file", line_ + 1);
      ++line_;
    } while (text.find_first_not_of(" \t\r") == std::string::npos);
    record_.clear();
    record_.str(text);
  }

  void end_record() {
    if (format_ != PlyFormat::Ascii) return;
    std::string extra;
    if (record_ >> extra) throw ParseError("too many values in record", line_);
  }

  double read(PlyType t) {
    if (format_ == PlyFormat::Ascii) {
      double v;
      if (!(record_ >> v)) throw ParseError("missing or malformed value", line_);
      return v;
    }
    unsigned char buf[8];
    const std::size_t n = type_size(t);
    if (!is_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n)))
      throw ParseError("unexpected end of binary data", offset_, true);
    offset_ += n;
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + n);
    switch (t) {
      case PlyType::Int8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
      case PlyType::UInt8: return buf[0];
      case PlyType::Int16: return decode<std::int16_t>(buf);
      case PlyType::UInt16: return decode<std::uint16_t>(buf);
      case PlyType::Int32: return decode<std::int32_t>(buf);
      case PlyType::UInt32: return decode<std::uint32_t>(buf);
      case PlyType::Float32: return decode<float>(buf);
      case PlyType::Float64: return decode<double>(buf);
    }
    return 0.0;
  }

  std::size_t location() const { return format_ == PlyFormat::Ascii ? line_ : offset_; }
  bool binary() const { return format_ != PlyFormat::Ascii; }

 private:
  template <typename T>
  static double decode(const unsigned char* buf) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  }

  std::istream& is_;
  PlyFormat format_;
  std::size_t line_;
  std::size_t offset_;
  std::istringstream record_;
};

inline std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

inline void put_le(std::string& out, const void* src, std::size_t n) {
  char buf[8];
  std::memcpy(buf, src, n);
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + n);
  out.append(buf, n);
}

template <typename T>
void put(std::string& out, T v) {
  put_le(out, &v, sizeof(T));
}

}  // namespace detail

inline PlyData read_ply(std::istream& is) {
  using namespace detail;
  PlyData data;
  std::string line;
  std::size_t line_no = 0, header_bytes = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++line_no;
    header_bytes += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line != "ply") throw ParseError("missing 'ply' magic", 1);

  PlyFormat format = PlyFormat::Ascii;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    if (!next_line()) throw ParseError("header is not terminated by end_header", line_no);
    std::istringstream in(line);
    std::string key;
    if (!(in >> key) || key == "comment" || key == "obj_info") continue;
    if (key == "end_header") break;
    if (key == "format") {
      std::string kind, version;
      in >> kind >> version;
      if (kind == "ascii") format = PlyFormat::Ascii;
      else if (kind == "binary_little_endian") format = PlyFormat::BinaryLittleEndian;
      else if (kind == "binary_big_endian") throw UnsupportedFormat("big-endian PLY is not supported");
      else throw ParseError("unknown PLY format '" + kind + "'", line_no);
      if (version != "1.0") throw UnsupportedFormat("PLY version '" + version + "' is not supported");
      have_format = true;
    } else if (key == "element") {
      PlyElement e;
      if (!(in >> e.name >> e.count)) throw ParseError("malformed element line", line_no);
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw ParseError("property before any element", line_no);
      PlyProperty p;
      std::string type;
      if (!(in >> type)) throw ParseError("malformed property line", line_no);
      if (type == "list") {
        std::string count_type, item_type;
        if (!(in >> count_type >> item_type >> p.name)) throw ParseError("malformed list property", line_no);
        p.is_list = true;
        p.count_type = parse_type(count_type, line_no);
        p.type = parse_type(item_type, line_no);
      } else {
        p.type = parse_type(type, line_no);
        if (!(in >> p.name)) throw ParseError("property without a name", line_no);
      }
      elements.back().properties.push_back(p);
    } else {
      throw ParseError("unknown header keyword '" + key + "'", line_no);
    }
  }
  if (!have_format) throw ParseError("header has no format line", line_no);

  PlyReader reader(is, format, line_no, header_bytes);
  bool seen_vertex = false;
  for (const PlyElement& e : elements) {
    if (e.name == "vertex") {
      seen_vertex = true;
      std::map<std::string, int> slot;  // x y z nx ny nz red green blue
      const char* known[] = {"x", "y", "z", "nx", "ny", "nz", "red", "green", "blue"};
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        bool is_known = false;
        for (int q = 0; q < 9; ++q)
          if (p.name == known[q] && !p.is_list) {
            slot[p.name] = q;
            is_known = true;
          }
        if (!is_known) data.warnings.push_back("skipping unknown vertex property '" + p.name + "'");
      }
      auto has = [&](std::initializer_list<const char*> names) {
        for (const char* n : names)
          if (!slot.count(n)) return false;
        return true;
      };
      if (!has({"x", "y", "z"})) throw ParseError("vertex element lacks x, y, z", line_no);
      const bool normals = has({"nx", "ny", "nz"}), colors = has({"red", "green", "blue"});
      data.cloud.positions.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        reader.begin_record();
        double v[9] = {};
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.read(p.count_type));
            for (std::size_t q = 0; q < n; ++q) reader.read(p.type);
            continue;
          }
          const double value = reader.read(p.type);
          if (const auto it = slot.find(p.name); it != slot.end()) v[it->second] = value;
        }
        reader.end_record();
        data.cloud.positions.emplace_back(v[0], v[1], v[2]);
        if (normals) {
          Vec3 n(v[3], v[4], v[5]);
          const double len = n.norm();
          if (!(len > 0.0)) throw ParseError("zero normal on vertex " + std::to_string(i), reader.location(), reader.binary());
          if (std::abs(len - 1.0) > kUnitNormTolerance) {
            if (data.warnings.empty() || data.warnings.back() != "renormalized non-unit vertex normals")
              data.warnings.push_back("renormalized non-unit vertex normals");
            n /= len;
          }
          data.cloud.normals.push_back(n);
        }
        if (colors) data.cloud.colors.push_back({to_byte(v[6]), to_byte(v[7]), to_byte(v[8])});
      }
    } else if (e.name == "face") {
      data.has_face_element = true;
      const PlyProperty* indices = nullptr;
      for (const auto& p : e.properties)
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) indices = &p;
      if (!indices) throw ParseError("face element lacks a vertex_indices list", line_no);
      bool face_colors = true;
      for (const char* c : {"red", "green", "blue"}) {
        bool found = false;
        for (const auto& p : e.properties) found |= p.name == c && !p.is_list;
        face_colors &= found;
      }
      for (const auto& p : e.properties)
        if (&p != indices && !(face_colors && (p.name == "red" || p.name == "green" || p.name == "blue")))
          data.warnings.push_back("skipping unknown face property '" + p.name + "'");
      bool polygon_warned = false;
      for (std::size_t f = 0; f < e.count; ++f) {
        reader.begin_record();
        std::vector<double> idx;
        Rgb rgb;
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const double count = reader.read(p.count_type);
            if (count < 0) throw ParseError("negative list length", reader.location(), reader.binary());
            for (std::size_t q = 0; q < static_cast<std::size_t>(count); ++q) {
              const double v = reader.read(p.type);
              if (&p == indices) idx.push_back(v);
            }
            continue;
          }
          const double value = reader.read(p.type);
          if (p.name == "red") rgb.r = to_byte(value);
          else if (p.name == "green") rgb.g = to_byte(value);
          else if (p.name == "blue") rgb.b = to_byte(value);
        }
        reader.end_record();
        if (idx.size() < 3) throw ParseError("face " + std::to_string(f) + " has fewer than 3 vertices", reader.location(), reader.binary());
        if (idx.size() > 3 && !polygon_warned) {
          data.warnings.push_back("polygons with more than 3 vertices were fan-triangulated");
          polygon_warned = true;
        }
        for (double v : idx)
          if (v < 0 || v >= static_cast<double>(data.cloud.positions.size()) || !seen_vertex)
            throw ParseError("face " + std::to_string(f) + " references a missing vertex", reader.location(), reader.binary());
        for (std::size_t q = 1; q + 1 < idx.size(); ++q) {
          data.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[q]), static_cast<std::uint32_t>(idx[q + 1])});
          if (face_colors) data.face_colors.push_back(rgb);
        }
      }
    } else {
      data.warnings.push_back("skipping unknown element '" + e.name + "'");
      for (std::size_t i = 0; i < e.count; ++i) {
        reader.begin_record();
        for (const auto& p : e.properties) {
          const std::size_t n = p.is_list ? static_cast<std::size_t>(reader.read(p.count_type)) : 1;
          for (std::size_t q = 0; q < n; ++q) reader.read(p.type);
        }
        reader.end_record();
      }
    }
  }
  if (!seen_vertex) throw ParseError("PLY has no vertex element", line_no);
  return data;
}

inline PlyData read_ply(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_ply(is);
}

// Writes vertices (with normals and colors when the cloud has them), and faces
// with optional per-face colors. Binary output stores coordinates as float64 so
// a write/read cycle is exact.
inline void write_ply(std::ostream& os, const PointCloud& cloud, const std::vector<Face>& faces, const std::vector<Rgb>& face_colors,
                      PlyFormat format = PlyFormat::BinaryLittleEndian) {
  using detail::put;
  cloud.check();
  if (!face_colors.empty() && face_colors.size() != faces.size()) throw Error("face colors do not match face count");
  const bool normals = cloud.has_normals(), colors = cloud.has_colors(), write_faces = !faces.empty();
  std::string out = "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "comment generated by granulite\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (normals) out += "property double nx\nproperty double ny\nproperty double nz\n";
  if (colors) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (write_faces) {
    out += "element face " + std::to_string(faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
    if (!face_colors.empty()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out += "end_header\n";
  if (format == PlyFormat::Ascii) {
    std::ostringstream body;
    body.precision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3& p = cloud.positions[i];
      body << p.x() << ' ' << p.y() << ' ' << p.z();
      if (normals) body << ' ' << cloud.normals[i].x() << ' ' << cloud.normals[i].y() << ' ' << cloud.normals[i].z();
      if (colors) body << ' ' << int(cloud.colors[i].r) << ' ' << int(cloud.colors[i].g) << ' ' << int(cloud.colors[i].b);
      body << '\n';
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
      body << "3 " << faces[f][0] << ' ' << faces[f][1] << ' ' << faces[f][2];
      if (!face_colors.empty()) body << ' ' << int(face_colors[f].r) << ' ' << int(face_colors[f].g) << ' ' << int(face_colors[f].b);
      body << '\n';
    }
    out += body.str();
  } else {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int k = 0; k < 3; ++k) put(out, cloud.positions[i][k]);
      if (normals)
        for (int k = 0; k < 3; ++k) put(out, cloud.normals[i][k]);
      if (colors) {
        put(out, cloud.colors[i].r);
        put(out, cloud.colors[i].g);
        put(out, cloud.colors[i].b);
      }
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
      put(out, std::uint8_t{3});
      for (int k = 0; k < 3; ++k) {
        if (faces[f][k] > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
          throw IoError("vertex index too large for PLY int");
        put(out, static_cast<std::int32_t>(faces[f][k]));
      }
      if (!face_colors.empty()) {
        put(out, face_colors[f].r);
        put(out, face_colors[f].g);
        put(out, face_colors[f].b);
      }
    }
  }
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

inline void write_ply(const std::filesystem::path& path, const PointCloud& cloud, const std::vector<Face>& faces = {},
                      const std::vector<Rgb>& face_colors = {}, PlyFormat format = PlyFormat::BinaryLittleEndian) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_ply(os, cloud, faces, face_colors, format);
  if (!os) throw IoError("failed writing " + path.string());
}

inline void write_ply(const std::filesystem::path& path, const TriMesh& mesh, PlyFormat format = PlyFormat::BinaryLittleEndian) {
  PointCloud cloud;
  cloud.positions = mesh.vertices;
  write_ply(path, cloud, mesh.faces, {}, format);
}

inline constexpr std::array<Rgb, 16> kPalette = {{{230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
                                                   {245, 130, 48},  {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
                                                   {210, 245, 60},  {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
                                                   {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {170, 255, 195}}};

inline std::vector<Rgb> label_colors(const seg::SegmentLabels& labels) {
  std::vector<Rgb> colors;
  colors.reserve(labels.face_label.size());
  for (auto l : labels.face_label)
    colors.push_back(l == seg::kBoundary ? Rgb{0, 0, 0} : kPalette[static_cast<std::size_t>(l) % kPalette.size()]);
  return colors;
}

inline std::filesystem::path label_sidecar(const std::filesystem::path& ply_path) {
  auto p = ply_path;
  return p.replace_extension(".labels.txt");
}

// Binary PLY with faces colored by segment (boundary black) and the label file
// next to it.
inline void write_ply_labeled(const TriMesh& mesh, const seg::SegmentLabels& labels, const std::filesystem::path& path) {
  if (labels.face_label.size() != mesh.faces.size()) throw Error("labels do not cover the mesh");
  PointCloud cloud;
  cloud.positions = mesh.vertices;
  write_ply(path, cloud, mesh.faces, label_colors(labels));
  seg::write_labels(label_sidecar(path), labels);
}

}  // namespace granulite::io
