#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace granulite {

// Base of every error raised by the library. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class NonManifoldEdge : public Error {
 public:
  NonManifoldEdge(std::size_t a, std::size_t b, std::size_t face_count)
      : Error("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
              ") shared by " + std::to_string(face_count) + " faces"),
        v0(a), v1(b), faces(face_count) {}
  std::size_t v0, v1, faces;
};

class DegenerateFace : public Error {
 public:
  explicit DegenerateFace(std::size_t face)
      : Error("degenerate face " + std::to_string(face)), face_id(face) {}
  std::size_t face_id;
};

class CoincidentCentroids : public Error {
 public:
  CoincidentCentroids(std::size_t a, std::size_t b)
      : Error("faces " + std::to_string(a) + " and " + std::to_string(b) +
              " have coincident centroids") {}
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// sfm
class PointAtInfinity : public Error {
 public:
  PointAtInfinity(std::size_t camera, std::size_t point)
      : Error("point " + std::to_string(point) + " projects to infinity in camera " +
              std::to_string(camera)),
        camera_id(camera), point_id(point) {}
  std::size_t camera_id, point_id;
};

class DegenerateBaseline : public Error {
 public:
  using Error::Error;
};

class InsufficientObservations : public Error {
 public:
  using Error::Error;
};

class SingularNormalEquations : public Error {
 public:
  using Error::Error;
};

// surface reconstruction
class DegenerateNeighborhood : public Error {
 public:
  explicit DegenerateNeighborhood(std::size_t point)
      : Error("rank-deficient neighborhood around point " + std::to_string(point)),
        point_id(point) {}
  std::size_t point_id;
};

class EmptySurface : public Error {
 public:
  EmptySurface() : Error("iso-level is not crossed by the grid") {}
};

// segmentation
class NonUnitInput : public Error {
 public:
  using Error::Error;
};

// morphometrics
class DegenerateSegment : public Error {
 public:
  using Error::Error;
};

class NonPositiveLength : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// io
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t where, bool is_byte_offset = false)
      : Error(what + (is_byte_offset ? " (byte " : " (line ") + std::to_string(where) + ")"),
        location(where), byte_offset(is_byte_offset) {}
  std::size_t location;
  bool byte_offset;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace granulite
