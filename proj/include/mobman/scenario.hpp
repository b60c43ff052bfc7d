#pragma once

#include "mobman/cloud.hpp"
#include "mobman/dwa.hpp"
#include "mobman/tracking.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mobman {

// Deterministic sampling helpers (independent of the standard library's
// distribution implementations).
double uniform01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
double gaussian(std::mt19937_64& rng, double sigma);

// ---------------------------------------------------------------------------
// Workstation clouds

enum class Shape { Box, Cylinder };

struct SceneObject {
  Shape shape = Shape::Box;
  Eigen::Vector3d dims{0.08, 0.03, 0.03};  // box: length, width, height; cylinder: radius, height, unused
  Vec2 position = Vec2::Zero();            // on the table surface
  double yaw = 0.0;
  std::string label = "object";
  double height() const { return shape == Shape::Box ? dims.z() : dims.y(); }
};

struct WorkstationScenario {
  Vec2 table_center{0.4, 0.0};
  double table_width = 0.8;  // along y
  double table_depth = 0.4;  // along x
  double table_height = -0.05;
  std::vector<SceneObject> objects;
  double density = 10000.0;  // samples per m^2
  double noise_sigma = 0.0;
  std::size_t outlier_count = 0;
  std::uint64_t seed = 0;
  void validate() const;
};

struct WorkstationTruth {
  Plane plane;               // table plane, no inliers
  std::vector<int> labels;   // -1 table, -2 outlier, k object index
  std::vector<std::size_t> object_counts;
};

struct WorkstationSample {
  PointCloud cloud;
  WorkstationTruth truth;
};

WorkstationSample gen_workstation(const WorkstationScenario& s);

/// Random scene with 2..4 separated objects, used by the acceptance suite
/// and `gen` without a scenario file.
WorkstationScenario random_workstation(std::uint64_t seed, double noise_sigma, double outlier_fraction);

/// Surface samples of one object standing on a plane at height z0
/// (top and sides, no bottom).
std::vector<Point3> sample_object_surface(const SceneObject& obj, double z0, double density, std::mt19937_64& rng);

WorkstationScenario workstation_from_json(const std::string& text);
std::string workstation_to_json(const WorkstationScenario& s);
std::string truth_to_json(const WorkstationTruth& t);

// ---------------------------------------------------------------------------
// Rotating table streams

struct RttObject {
  std::string label;
  double angle0 = 0.0;
};

struct RttScenario {
  Vec2 table_center{0.6, 0.0};
  double table_radius = 0.25;
  double table_height = 0.0;
  double omega = 0.3;
  std::vector<RttObject> objects;
  double rate = 15.0;
  double duration = 60.0;
  double noise_m = 0.0;
  double noise_px = 0.0;
  double dropout = 0.0;
  double ppm = 500.0;          // pixels per meter
  double object_size = 0.08;   // m, box side in the image
  Vec2 image_center{320.0, 240.0};
  double gate = 0.05;          // 3D association gate, m
  std::uint64_t seed = 0;
  void validate() const;
  std::size_t frames() const;
};

struct RttPoint {
  double t = 0.0;
  int gt_id = 0;
  Point3 p = Point3::Zero();
};

struct RttStream {
  std::vector<std::vector<RttPoint>> points;          // per frame
  std::vector<std::vector<Detection2D>> detections;   // per frame
  std::vector<RttPoint> truth;                        // noiseless, every object, every frame
};

RttStream gen_rtt_stream(const RttScenario& s);

RttScenario rtt_from_json(const std::string& text);
std::string rtt_to_json(const RttScenario& s);

// ---------------------------------------------------------------------------
// Occupancy maps

struct MapScenario {
  double width = 8.0, height = 8.0;  // m
  double resolution = 0.1;
  double density = 0.1;   // occupied fraction of cells
  int block = 3;          // obstacle blocks are block x block cells
  std::vector<Vec2> keep_clear;
  double clear_radius = 0.6;
  std::uint64_t seed = 0;
};

/// Blocks dropped uniformly until the occupied fraction reaches density,
/// never within clear_radius of a keep_clear point.
OccupancyGrid random_map(const MapScenario& s);

}  // namespace mobman
