#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "granulite/seg/segment.hpp"

namespace granulite::seg {

// Text format:
//   S <segment_count>
//   <face_id> <segment_id | B>      (one line per face, ascending face id)
inline void write_labels(std::ostream& os, const SegmentLabels& labels) {
  os << "S " << labels.segment_count << '\n';
  for (FaceId f = 0; f < labels.face_label.size(); ++f) {
    os << f << ' ';
    if (labels.face_label[f] == kBoundary)
      os << 'B';
    else
      os << labels.face_label[f];
    os << '\n';
  }
}

inline SegmentLabels read_labels(std::istream& is) {
  SegmentLabels labels;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string tag;
      long long count = -1;
      if (!(ls >> tag >> count) || tag != "S" || count < 0) throw ParseError("expected 'S <segment_count>' header", line_no);
      labels.segment_count = static_cast<std::size_t>(count);
      have_header = true;
      continue;
    }
    long long face = -1;
    std::string value;
    if (!(ls >> face >> value)) throw ParseError("expected '<face_id> <segment_id|B>'", line_no);
    if (face != static_cast<long long>(labels.face_label.size()))
      throw ParseError("face ids must be consecutive from 0", line_no);
    if (value == "B") {
      labels.face_label.push_back(kBoundary);
    } else {
      std::size_t used = 0;
      long long id = -1;
      try {
        id = std::stoll(value, &used);
      } catch (const std::exception&) {
        throw ParseError("bad segment id '" + value + "'", line_no);
      }
      if (used != value.size() || id < 0 || id >= static_cast<long long>(labels.segment_count))
        throw ParseError("segment id '" + value + "' out of range", line_no);
      labels.face_label.push_back(static_cast<std::int32_t>(id));
    }
  }
  if (!have_header) throw ParseError("missing 'S' header", line_no);
  return labels;
}

inline void write_labels(const std::filesystem::path& path, const SegmentLabels& labels) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_labels(os, labels);
  if (!os) throw IoError("failed writing " + path.string());
}

inline SegmentLabels read_labels(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_labels(is);
}

}  // namespace granulite::seg
