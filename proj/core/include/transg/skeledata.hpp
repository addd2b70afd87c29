#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace transg::skeledata {

using Edge = std::pair<std::size_t, std::size_t>;
using Point3 = std::array<double, 3>;

// Joint layout of a skeleton: node count, undirected bone list and, for the
// built-in layouts, a rest pose in meters (y up).
struct Topology {
  std::string name;
  std::size_t joints = 0;
  std::vector<Edge> edges;
  std::size_t root = 0;
  std::vector<Point3> rest_pose;  // empty when unknown
};

// Kinect v1 (J=20), Kinect v2 (J=25) and a coarse body-part graph (J=11).
Topology builtin_topology(const std::string& name);
std::vector<std::string> builtin_topology_names();

// Throws ConfigError on out-of-range joints, self-loops or duplicate edges.
void validate_edges(std::size_t joints, const std::vector<Edge>& edges);

struct SkeletonSequence {
  std::size_t frames = 0;
  std::size_t joints = 0;
  std::vector<double> coords;  // frames x joints x 3, meters
  int identity = -1;           // -1 = unlabeled
  std::string source_id;

  double at(std::size_t t, std::size_t j, std::size_t axis) const {
    return coords[(t * joints + j) * 3 + axis];
  }
};

enum class Split { train, probe, gallery };
const char* split_name(Split s);
Split parse_split(const std::string& name);

struct DatasetManifest {
  std::string name;
  std::size_t joints = 0;
  std::size_t frames = 0;
  std::vector<Edge> edges;
  std::optional<std::size_t> root_joint = 0;
  std::vector<std::string> train_files;
  std::vector<std::string> probe_files;
  std::vector<std::string> gallery_files;
  // Directory relative file names resolve against.
  std::filesystem::path base_dir;

  const std::vector<std::string>& files(Split s) const;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<SkeletonSequence> train;
  std::vector<SkeletonSequence> probe;
  std::vector<SkeletonSequence> gallery;
  std::size_t dropped_short_recordings = 0;

  const std::vector<SkeletonSequence>& split(Split s) const;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Cuts one recording (T frames) into floor(T / f) consecutive windows of f
// frames with stride f. Trailing frames that do not fill a window are dropped.
std::vector<SkeletonSequence> window_recording(const SkeletonSequence& recording,
                                               std::size_t f);

// Subtracts the root joint's position from every joint, frame by frame.
void root_center(SkeletonSequence& seq, std::size_t root);

// Parses a JSON Lines file of recordings. Malformed lines raise ParseError
// with "<file>:<line>"; a joint count other than `joints` raises SchemaError.
std::vector<SkeletonSequence> read_recordings(const std::filesystem::path& path,
                                              std::size_t joints);
void write_recordings(const std::filesystem::path& path,
                      const std::vector<SkeletonSequence>& recordings);

// Loads every split of a manifest, windows recordings to length f and applies
// root centering. Throws SchemaError("no sequences ...") when nothing loads.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Windows and centers already-loaded recordings the same way load_dataset does.
void prepare_split(std::vector<SkeletonSequence>& out,
                   const std::vector<SkeletonSequence>& recordings,
                   const DatasetManifest& manifest, std::size_t& dropped);

// Checks a dataset is usable for probe/gallery evaluation: both splits
// nonempty and sharing at least one identity.
void validate_for_evaluation(const Dataset& dataset);

}  // namespace transg::skeledata
