#include "transg/skeledata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "transg/error.hpp"

namespace transg::skeledata {

using nlohmann::json;

namespace {

Topology kinect20() {
  Topology t;
  t.name = "kinect20";
  t.joints = 20;
  t.root = 0;
  t.edges = {{0, 1},  {1, 2},   {2, 3},   {2, 4},   {4, 5},   {5, 6},   {6, 7},
             {2, 8},  {8, 9},   {9, 10},  {10, 11}, {0, 12},  {12, 13}, {13, 14},
             {14, 15}, {0, 16}, {16, 17}, {17, 18}, {18, 19}};
  t.rest_pose = {
      {0.00, 0.00, 0.00},   {0.00, 0.20, 0.00},   {0.00, 0.45, 0.00},   {0.00, 0.65, 0.02},
      {-0.18, 0.42, 0.00},  {-0.22, 0.15, 0.00},  {-0.24, -0.08, 0.02}, {-0.25, -0.16, 0.03},
      {0.18, 0.42, 0.00},   {0.22, 0.15, 0.00},   {0.24, -0.08, 0.02},  {0.25, -0.16, 0.03},
      {-0.10, -0.05, 0.00}, {-0.11, -0.48, 0.01}, {-0.11, -0.88, 0.00}, {-0.11, -0.92, 0.10},
      {0.10, -0.05, 0.00},  {0.11, -0.48, 0.01},  {0.11, -0.88, 0.00},  {0.11, -0.92, 0.10}};
  return t;
}

Topology kinect25() {
  Topology t;
  t.name = "kinect25";
  t.joints = 25;
  t.root = 0;
  t.edges = {{0, 1},   {1, 20},  {20, 2},  {2, 3},   {20, 4},  {4, 5},   {5, 6},   {6, 7},
             {7, 21},  {6, 22},  {20, 8},  {8, 9},   {9, 10},  {10, 11}, {11, 23}, {10, 24},
             {0, 12},  {12, 13}, {13, 14}, {14, 15}, {0, 16},  {16, 17}, {17, 18}, {18, 19}};
  t.rest_pose = {
      {0.00, 0.00, 0.00},   {0.00, 0.25, 0.00},   {0.00, 0.52, 0.00},   {0.00, 0.66, 0.02},
      {-0.18, 0.42, 0.00},  {-0.22, 0.15, 0.00},  {-0.24, -0.08, 0.02}, {-0.25, -0.16, 0.03},
      {0.18, 0.42, 0.00},   {0.22, 0.15, 0.00},   {0.24, -0.08, 0.02},  {0.25, -0.16, 0.03},
      {-0.10, -0.05, 0.00}, {-0.11, -0.48, 0.01}, {-0.11, -0.88, 0.00}, {-0.11, -0.92, 0.10},
      {0.10, -0.05, 0.00},  {0.11, -0.48, 0.01},  {0.11, -0.88, 0.00},  {0.11, -0.92, 0.10},
      {0.00, 0.45, 0.00},   {-0.26, -0.24, 0.03}, {-0.22, -0.14, 0.05}, {0.26, -0.24, 0.03},
      {0.22, -0.14, 0.05}};
  return t;
}

Topology coarse11() {
  Topology t;
  t.name = "coarse11";
  t.joints = 11;
  t.root = 0;
  t.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {1, 5}, {5, 6}, {0, 7}, {7, 8}, {0, 9}, {9, 10}};
  t.rest_pose = {{0.00, 0.00, 0.00},   {0.00, 0.42, 0.00},   {0.00, 0.65, 0.02},
                 {-0.22, 0.15, 0.00},  {-0.25, -0.16, 0.03}, {0.22, 0.15, 0.00},
                 {0.25, -0.16, 0.03},  {-0.11, -0.48, 0.01}, {-0.11, -0.92, 0.05},
                 {0.11, -0.48, 0.01},  {0.11, -0.92, 0.05}};
  return t;
}

std::vector<Edge> parse_edges(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ParseError("manifest: each edge must be [i, j]");
    edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return edges;
}

}  // namespace

Topology builtin_topology(const std::string& name) {
  if (name == "kinect20") return kinect20();
  if (name == "kinect25") return kinect25();
  if (name == "coarse11") return coarse11();
  throw ConfigError("unknown skeleton graph '" + name + "' (known: kinect20, kinect25, coarse11)");
}

std::vector<std::string> builtin_topology_names() { return {"kinect20", "kinect25", "coarse11"}; }

void validate_edges(std::size_t joints, const std::vector<Edge>& edges) {
  std::set<Edge> seen;
  for (auto [a, b] : edges) {
    if (a >= joints || b >= joints) {
      throw ConfigError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") references a joint outside [0, " + std::to_string(joints) + ")");
    }
    if (a == b) throw ConfigError("self-loop on joint " + std::to_string(a));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
      throw ConfigError("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
}

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::probe: return "probe";
    case Split::gallery: return "gallery";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "probe") return Split::probe;
  if (name == "gallery") return Split::gallery;
  throw ConfigError("unknown split '" + name + "' (expected train, probe or gallery)");
}

const std::vector<std::string>& DatasetManifest::files(Split s) const {
  switch (s) {
    case Split::train: return train_files;
    case Split::probe: return probe_files;
    case Split::gallery: return gallery_files;
  }
  return train_files;
}

const std::vector<SkeletonSequence>& Dataset::split(Split s) const {
  switch (s) {
    case Split::train: return train;
    case Split::probe: return probe;
    case Split::gallery: return gallery;
  }
  return train;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.name = j.value("name", std::string{});
    m.joints = j.at("J").get<std::size_t>();
    m.frames = j.at("f").get<std::size_t>();
    m.edges = parse_edges(j.at("edges"));
    if (j.contains("root_joint") && j["root_joint"].is_null()) {
      m.root_joint.reset();
    } else {
      m.root_joint = j.value("root_joint", std::size_t{0});
    }
    const auto& files = j.at("files");
    for (auto& [key, value] : files.items()) {
      auto list = value.get<std::vector<std::string>>();
      switch (parse_split(key)) {
        case Split::train: m.train_files = std::move(list); break;
        case Split::probe: m.probe_files = std::move(list); break;
        case Split::gallery: m.gallery_files = std::move(list); break;
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  if (m.joints == 0) throw SchemaError("manifest: J must be positive");
  if (m.frames == 0) throw SchemaError("manifest: f must be positive");
  if (m.root_joint && *m.root_joint >= m.joints) {
    throw SchemaError("manifest: root_joint " + std::to_string(*m.root_joint) +
                      " outside [0, J)");
  }
  validate_edges(m.joints, m.edges);
  m.base_dir = path.parent_path();
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  json edges = json::array();
  for (auto [a, b] : m.edges) edges.push_back({a, b});
  json j = {{"name", m.name},
            {"J", m.joints},
            {"f", m.frames},
            {"edges", edges},
            {"root_joint", m.root_joint ? json(*m.root_joint) : json(nullptr)},
            {"files",
             {{"train", m.train_files}, {"probe", m.probe_files}, {"gallery", m.gallery_files}}}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<SkeletonSequence> window_recording(const SkeletonSequence& rec, std::size_t f) {
  std::vector<SkeletonSequence> out;
  if (f == 0) throw ConfigError("window length f must be positive");
  const std::size_t per_frame = rec.joints * 3;
  for (std::size_t w = 0; (w + 1) * f <= rec.frames; ++w) {
    SkeletonSequence s;
    s.frames = f;
    s.joints = rec.joints;
    s.identity = rec.identity;
    s.source_id = rec.source_id + "#" + std::to_string(w);
    auto first = rec.coords.begin() + static_cast<long>(w * f * per_frame);
    s.coords.assign(first, first + static_cast<long>(f * per_frame));
    out.push_back(std::move(s));
  }
  return out;
}

void root_center(SkeletonSequence& seq, std::size_t root) {
  if (root >= seq.joints) throw SchemaError("root joint outside the skeleton");
  for (std::size_t t = 0; t < seq.frames; ++t) {
    double* frame = seq.coords.data() + t * seq.joints * 3;
    const Point3 r{frame[root * 3], frame[root * 3 + 1], frame[root * 3 + 2]};
    for (std::size_t j = 0; j < seq.joints; ++j)
      for (std::size_t a = 0; a < 3; ++a) frame[j * 3 + a] -= r[a];
  }
}

std::vector<SkeletonSequence> read_recordings(const std::filesystem::path& path,
                                              std::size_t joints) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sequence file " + path.string());
  std::vector<SkeletonSequence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    SkeletonSequence rec;
    try {
      const json j = json::parse(line);
      rec.identity = j.at("id").get<int>();
      const auto& frames = j.at("frames");
      if (!frames.is_array() || frames.empty()) throw ParseError(where + ": empty 'frames'");
      rec.frames = frames.size();
      rec.joints = frames[0].size();
      if (rec.joints != joints) {
        throw SchemaError(where + ": record has J=" + std::to_string(rec.joints) +
                          " but the manifest declares J=" + std::to_string(joints));
      }
      rec.coords.reserve(rec.frames * joints * 3);
      for (const auto& frame : frames) {
        if (frame.size() != joints) {
          throw SchemaError(where + ": frame with " + std::to_string(frame.size()) +
                            " joints, expected " + std::to_string(joints));
        }
        for (const auto& p : frame) {
          if (!p.is_array() || p.size() != 3) throw ParseError(where + ": joint is not [x, y, z]");
          for (const auto& c : p) {
            const double v = c.get<double>();
            if (!std::isfinite(v)) throw ParseError(where + ": non-finite coordinate");
            rec.coords.push_back(v);
          }
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    rec.source_id = path.filename().string() + ":" + std::to_string(line_no);
    out.push_back(std::move(rec));
  }
  return out;
}

void write_recordings(const std::filesystem::path& path,
                      const std::vector<SkeletonSequence>& recordings) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write sequence file " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : recordings) {
    out << "{\"id\":" << r.identity << ",\"frames\":[";
    for (std::size_t t = 0; t < r.frames; ++t) {
      out << (t ? ",[" : "[");
      for (std::size_t j = 0; j < r.joints; ++j) {
        out << (j ? ",[" : "[") << r.at(t, j, 0) << ',' << r.at(t, j, 1) << ',' << r.at(t, j, 2)
            << ']';
      }
      out << ']';
    }
    out << "]}\n";
  }
}

void prepare_split(std::vector<SkeletonSequence>& out,
                   const std::vector<SkeletonSequence>& recordings,
                   const DatasetManifest& manifest, std::size_t& dropped) {
  for (const auto& rec : recordings) {
    if (rec.joints != manifest.joints) {
      throw SchemaError("recording " + rec.source_id + " has J=" + std::to_string(rec.joints) +
                        ", manifest declares J=" + std::to_string(manifest.joints));
    }
    if (rec.frames < manifest.frames) {
      ++dropped;
      continue;
    }
    for (auto& w : window_recording(rec, manifest.frames)) {
      if (manifest.root_joint) root_center(w, *manifest.root_joint);
      out.push_back(std::move(w));
    }
  }
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  Dataset ds;
  ds.manifest = read_manifest(manifest_path);
  for (Split s : {Split::train, Split::probe, Split::gallery}) {
    auto& dest = s == Split::train ? ds.train : (s == Split::probe ? ds.probe : ds.gallery);
    for (const auto& file : ds.manifest.files(s)) {
      std::filesystem::path p(file);
      if (p.is_relative()) p = ds.manifest.base_dir / p;
      prepare_split(dest, read_recordings(p, ds.manifest.joints), ds.manifest,
                    ds.dropped_short_recordings);
    }
  }
  if (ds.train.empty() && ds.probe.empty() && ds.gallery.empty()) {
    throw SchemaError("no sequences in dataset '" + ds.manifest.name + "'");
  }
  return ds;
}

void validate_for_evaluation(const Dataset& ds) {
  if (ds.probe.empty() || ds.gallery.empty()) {
    throw SchemaError("evaluation needs nonempty probe and gallery splits");
  }
  std::set<int> gallery_ids;
  for (const auto& s : ds.gallery) gallery_ids.insert(s.identity);
  for (const auto& s : ds.probe)
    if (gallery_ids.count(s.identity)) return;
  throw SchemaError("probe and gallery share no identity; evaluation would be vacuous");
}

}  // namespace transg::skeledata
