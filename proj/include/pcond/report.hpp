#pragma once

#include <string>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond::io {

struct Warning {
  std::string code;  // machine-readable
  std::string message;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string method;
  std::vector<StageTiming> timings;
  std::size_t mesh_nodes = 0;
  std::size_t mesh_triangles = 0;
  double mesh_max_circumdiameter = 0.0;
  std::vector<Warning> warnings;
  std::vector<std::string> artifacts;  // files written
  std::vector<std::string> notes;
  int exit_code = 0;

  void warn(const std::string& code, const std::string& message);
  std::string to_json() const;
};

/// Writes content to path atomically (write to a sibling temp file, rename).
void write_file_atomic(const std::string& path, const std::string& content);

/// CSV assembly with fixed formatting so identical inputs produce identical
/// bytes.
class Csv {
public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row_values(const std::vector<double>& values);
  const std::string& text() const { return text_; }
  void save(const std::string& path) const { write_file_atomic(path, text_); }

private:
  std::string text_;
  std::size_t width_;
};

std::string format_double(double v);

/// Minimal SVG scene for overlaying domains, inclusions, polygons and points.
class Svg {
public:
  Svg(double world_radius, int pixels = 640);
  void add_shape(const geom::Shape& s, const std::string& stroke, const std::string& fill);
  void add_polygon(const geom::Polygon& poly, const std::string& stroke, const std::string& fill);
  void add_point(Vec2 p, double radius_px, const std::string& fill);
  void add_segment(Vec2 a, Vec2 b, const std::string& stroke);
  std::string finish() const;
  void save(const std::string& path) const { write_file_atomic(path, finish()); }

private:
  double to_px(double x) const;
  double tx(double x) const;
  double ty(double y) const;
  double R_;
  int px_;
  std::string body_;
};

}  // namespace pcond::io
