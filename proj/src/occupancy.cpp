#include "mobman/dwa.hpp"
#include "mobman/error.hpp"
#include "mobman/io.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace mobman {

void OccupancyGrid::validate() const {
  if (width < 1 || height < 1) fail(ErrorCode::InvalidArgument, "grid needs positive dimensions");
  if (!(resolution > 0.0)) fail(ErrorCode::InvalidArgument, "grid resolution must be positive");
  if (cells.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    fail(ErrorCode::InvalidArgument, "grid cell count does not match width * height");
}

bool OccupancyGrid::contains(const Vec2& p) const {
  const Vec2 d = p - origin;
  return d.x() >= 0.0 && d.y() >= 0.0 && d.x() <= width * resolution && d.y() <= height * resolution;
}

OccupancyGrid OccupancyGrid::empty(int width, int height, double resolution, Vec2 origin) {
  OccupancyGrid g;
  g.width = width;
  g.height = height;
  g.resolution = resolution;
  g.origin = origin;
  g.cells.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Cell::Free);
  g.validate();
  return g;
}

OccupancyGrid parse_pgm(const std::string& pgm, double resolution, Vec2 origin) {
  // strip comments, then read whitespace separated tokens
  std::string clean;
  clean.reserve(pgm.size());
  bool comment = false;
  for (char ch : pgm) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    clean += comment ? ' ' : ch;
  }
  std::istringstream in(clean);
  std::string magic;
  in >> magic;
  if (magic != "P2") fail(ErrorCode::ParseError, "grid image must be a text PGM (P2)");
  long w = 0, h = 0, maxval = 0;
  if (!(in >> w >> h >> maxval) || w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    fail(ErrorCode::ParseError, "bad PGM header");

  OccupancyGrid g;
  g.width = static_cast<int>(w);
  g.height = static_cast<int>(h);
  g.resolution = resolution;
  g.origin = origin;
  g.cells.resize(static_cast<std::size_t>(w * h));
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      long v = 0;
      if (!(in >> v) || v < 0 || v > maxval)
        fail(ErrorCode::ParseError, "bad PGM pixel at row " + std::to_string(r) + ", col " + std::to_string(c));
      const double s = 255.0 * static_cast<double>(v) / static_cast<double>(maxval);
      const Cell cell = s < 64.0 ? Cell::Occupied : (s > 191.0 ? Cell::Free : Cell::Unknown);
      g.at(static_cast<int>(c), static_cast<int>(h - 1 - r)) = cell;
    }
  }
  g.validate();
  return g;
}

OccupancyGrid read_grid(const std::string& pgm_path, const std::string& meta_json_path) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(meta_json_path));
    const double res = meta.at("resolution").get<double>();
    const auto& o = meta.at("origin");
    return parse_pgm(read_text_file(pgm_path), res, Vec2(o.at(0).get<double>(), o.at(1).get<double>()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("grid metadata: ") + e.what());
  }
}

std::string format_pgm(const OccupancyGrid& grid) {
  std::ostringstream out;
  out << "P2\n" << grid.width << " " << grid.height << "\n255\n";
  for (int r = grid.height - 1; r >= 0; --r) {
    for (int c = 0; c < grid.width; ++c) {
      const Cell cell = grid.at(c, r);
      out << (cell == Cell::Free ? 255 : cell == Cell::Occupied ? 0 : 128) << (c + 1 < grid.width ? " " : "");
    }
    out << "\n";
  }
  return out.str();
}

std::string format_grid_meta(const OccupancyGrid& grid) {
  nlohmann::json j = {{"resolution", grid.resolution}, {"origin", {grid.origin.x(), grid.origin.y()}}};
  return j.dump(2) + "\n";
}

ObstacleField::ObstacleField(const OccupancyGrid& grid) : grid_(&grid) {
  grid.validate();
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c)
      if (grid.at(c, r) != Cell::Free) {
        const Vec2 p = grid.cell_center(c, r);
        centers_.emplace_back(p.x(), p.y(), 0.0);
      }
  tree_ = std::make_unique<KdTree>(centers_);
}

double ObstacleField::distance(const Vec2& p) const {
  if (centers_.empty()) return grid_->diagonal();
  return std::sqrt(tree_->nearest_one(Point3(p.x(), p.y(), 0.0)).second);
}

}  // namespace mobman
