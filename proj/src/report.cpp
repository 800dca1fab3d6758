#include "pcond/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pcond/errors.hpp"

namespace pcond::io {

void RunReport::warn(const std::string& code, const std::string& message) {
  warnings.push_back({code, message});
  if (exit_code == 0) exit_code = 2;
}

namespace {
std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}
}  // namespace

std::string RunReport::to_json() const {
  std::string s = "{\n  \"method\": \"" + json_escape(method) + "\",\n";
  s += "  \"mesh\": {\"nodes\": " + std::to_string(mesh_nodes) +
       ", \"triangles\": " + std::to_string(mesh_triangles) +
       ", \"max_circumdiameter\": " + format_double(mesh_max_circumdiameter) + "},\n";
  s += "  \"timings\": [";
  for (std::size_t i = 0; i < timings.size(); ++i) {
    if (i) s += ", ";
    s += "{\"stage\": \"" + json_escape(timings[i].stage) +
         "\", \"seconds\": " + format_double(timings[i].seconds) + "}";
  }
  s += "],\n  \"warnings\": [";
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    if (i) s += ", ";
    s += "{\"code\": \"" + json_escape(warnings[i].code) + "\", \"message\": \"" +
         json_escape(warnings[i].message) + "\"}";
  }
  s += "],\n  \"artifacts\": [";
  for (std::size_t i = 0; i < artifacts.size(); ++i) {
    if (i) s += ", ";
    s += "\"" + json_escape(artifacts[i]) + "\"";
  }
  s += "],\n  \"notes\": [";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (i) s += ", ";
    s += "\"" + json_escape(notes[i]) + "\"";
  }
  s += "],\n  \"exit_code\": " + std::to_string(exit_code) + "\n}\n";
  return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCode::IoError, "cannot rename " + tmp + " to " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::IoError, "csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void Csv::row_values(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

Svg::Svg(double world_radius, int pixels) : R_(world_radius * 1.05), px_(pixels) {}

double Svg::to_px(double x) const { return x / (2 * R_) * px_; }
double Svg::tx(double x) const { return (x + R_) / (2 * R_) * px_; }
double Svg::ty(double y) const { return (R_ - y) / (2 * R_) * px_; }

void Svg::add_shape(const geom::Shape& s, const std::string& stroke, const std::string& fill) {
  if (const auto* c = std::get_if<geom::Circle>(&s)) {
    body_ += "<circle cx=\"" + format_double(tx(c->center.x)) + "\" cy=\"" +
             format_double(ty(c->center.y)) + "\" r=\"" + format_double(to_px(c->radius)) +
             "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\" stroke-width=\"1.5\"/>\n";
    return;
  }
  add_polygon(std::get<geom::Polygon>(s), stroke, fill);
}

void Svg::add_polygon(const geom::Polygon& poly, const std::string& stroke,
                      const std::string& fill) {
  if (poly.vertices.empty()) return;
  body_ += "<polygon points=\"";
  for (Vec2 v : poly.vertices)
    body_ += format_double(tx(v.x)) + "," + format_double(ty(v.y)) + " ";
  body_ += "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\" stroke-width=\"1.5\"/>\n";
}

void Svg::add_point(Vec2 p, double radius_px, const std::string& fill) {
  body_ += "<circle cx=\"" + format_double(tx(p.x)) + "\" cy=\"" + format_double(ty(p.y)) +
           "\" r=\"" + format_double(radius_px) + "\" fill=\"" + fill + "\"/>\n";
}

void Svg::add_segment(Vec2 a, Vec2 b, const std::string& stroke) {
  body_ += "<line x1=\"" + format_double(tx(a.x)) + "\" y1=\"" + format_double(ty(a.y)) +
           "\" x2=\"" + format_double(tx(b.x)) + "\" y2=\"" + format_double(ty(b.y)) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
}

std::string Svg::finish() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(px_) +
         "\" height=\"" + std::to_string(px_) + "\" viewBox=\"0 0 " + std::to_string(px_) + " " +
         std::to_string(px_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

}  // namespace pcond::io
