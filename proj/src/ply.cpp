#include "mobman/cloud.hpp"
#include "mobman/error.hpp"
#include "mobman/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace mobman {

namespace {

[[noreturn]] void ply_error(std::size_t line, const std::string& msg) {
  fail(ErrorCode::ParseError, "PLY line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& tok, double& v) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

}  // namespace

PointCloud parse_ply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next() || line != "ply") ply_error(lineno == 0 ? 1 : lineno, "missing 'ply' magic");

  std::size_t count = 0;
  bool have_vertex = false, have_format = false;
  std::vector<std::string> props;
  while (true) {
    if (!next()) ply_error(lineno + 1, "unexpected end of header");
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii")
        ply_error(lineno, "only 'format ascii 1.0' is supported");
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3 || tok[1] != "vertex") ply_error(lineno, "unsupported element '" + line + "'");
      if (have_vertex) ply_error(lineno, "duplicate vertex element");
      double v = 0;
      if (!parse_double(tok[2], v) || v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
        ply_error(lineno, "bad vertex count");
      count = static_cast<std::size_t>(v);
      have_vertex = true;
    } else if (tok[0] == "property") {
      if (!have_vertex) ply_error(lineno, "property before element");
      if (tok.size() != 3) ply_error(lineno, "unsupported property '" + line + "'");
      if (tok[1] != "float" && tok[1] != "double" && tok[1] != "float32" && tok[1] != "float64")
        ply_error(lineno, "unsupported property type '" + tok[1] + "'");
      static const std::array<const char*, 6> known{"x", "y", "z", "nx", "ny", "nz"};
      if (std::find(known.begin(), known.end(), tok[2]) == known.end())
        ply_error(lineno, "unknown property '" + tok[2] + "'");
      if (std::find(props.begin(), props.end(), tok[2]) != props.end())
        ply_error(lineno, "duplicate property '" + tok[2] + "'");
      props.push_back(tok[2]);
    } else {
      ply_error(lineno, "unexpected header line '" + line + "'");
    }
  }
  if (!have_format) ply_error(lineno, "missing format line");
  if (!have_vertex) ply_error(lineno, "missing vertex element");

  auto slot = [&](const char* name) -> int {
    auto it = std::find(props.begin(), props.end(), name);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  };
  const std::array<int, 3> xyz{slot("x"), slot("y"), slot("z")};
  const std::array<int, 3> nxyz{slot("nx"), slot("ny"), slot("nz")};
  if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) ply_error(lineno, "x, y and z properties are required");
  const int normal_props = (nxyz[0] >= 0) + (nxyz[1] >= 0) + (nxyz[2] >= 0);
  if (normal_props != 0 && normal_props != 3) ply_error(lineno, "normals need nx, ny and nz");

  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!next()) ply_error(lineno + 1, "expected " + std::to_string(count) + " vertices");
    const auto tok = split_ws(line);
    if (tok.size() != props.size()) ply_error(lineno, "wrong number of values");
    std::vector<double> vals(tok.size());
    for (std::size_t j = 0; j < tok.size(); ++j)
      if (!parse_double(tok[j], vals[j]) || !std::isfinite(vals[j]))
        ply_error(lineno, "bad number '" + tok[j] + "'");
    cloud.points.emplace_back(vals[xyz[0]], vals[xyz[1]], vals[xyz[2]]);
    if (normal_props == 3) {
      Point3 n(vals[nxyz[0]], vals[nxyz[1]], vals[nxyz[2]]);
      if (std::abs(n.norm() - 1.0) > 1e-6) ply_error(lineno, "normal is not unit length");
      cloud.normals.push_back(n);
    }
  }
  while (next()) {
    if (!split_ws(line).empty()) ply_error(lineno, "trailing data after vertices");
  }
  return cloud;
}

PointCloud read_ply(const std::string& path) {
  return parse_ply(read_text_file(path));
}

std::string format_ply(const PointCloud& cloud) {
  std::string out;
  out += "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_normals()) out += "property float nx\nproperty float ny\nproperty float nz\n";
  out += "end_header\n";
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    int len = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", p.x(), p.y(), p.z());
    out.append(buf, static_cast<std::size_t>(len));
    if (cloud.has_normals()) {
      const Point3& n = cloud.normals[i];
      len = std::snprintf(buf, sizeof buf, " %.17g %.17g %.17g", n.x(), n.y(), n.z());
      out.append(buf, static_cast<std::size_t>(len));
    }
    out += '\n';
  }
  return out;
}

void write_ply(const PointCloud& cloud, const std::string& path) {
  write_text_file(path, format_ply(cloud));
}

}  // namespace mobman
