#include "transg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "transg/error.hpp"

namespace transg::trainer {

namespace {

constexpr TrainMode kModes[] = {TrainMode::baseline, TrainMode::pc,
                                TrainMode::sgt_ds,   TrainMode::sgt_gpc,
                                TrainMode::sgt_gpc_stpr, TrainMode::unsupervised};

// Reads one optional key into `field`, recording type errors instead of
// throwing so every problem is reported at once.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::vector<std::string>& errors) : j_(j), errors_(errors) {}

  template <typename T>
  void read(const char* key, T& field) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("expected a boolean");
        field = it->template get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
        if (it->is_number_unsigned()) {
          field = static_cast<T>(it->template get<std::uint64_t>());
        } else {
          const auto v = it->template get<std::int64_t>();
          if (v < 0) throw std::invalid_argument("must not be negative");
          field = static_cast<T>(v);
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw std::invalid_argument("expected a number");
        field = it->template get<double>();
      } else {
        if (!it->is_string()) throw std::invalid_argument("expected a string");
        field = it->template get<std::string>();
      }
    } catch (const std::exception& e) {
      errors_.push_back(std::string(key) + ": " + e.what());
    }
  }

  void reject_unknown() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) errors_.push_back("unknown key \"" + it.key() + "\"");
    }
  }

 private:
  const nlohmann::json& j_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_train(Reader& r, TrainConfig& c, std::vector<std::string>& errors) {
  r.read("d", c.model.d);
  r.read("heads", c.model.heads);
  r.read("head_dim", c.model.head_dim);
  r.read("layers", c.model.layers);
  r.read("pe_dim", c.model.pe_dim);
  r.read("use_pe", c.model.use_pe);
  r.read("alpha", c.alpha);
  r.read("beta", c.beta);
  r.read("lambda", c.lambda);
  r.read("tau1", c.tau1);
  r.read("tau2", c.tau2);
  r.read("mask_nodes", c.mask_nodes);
  r.read("mask_frames", c.mask_frames);
  r.read("frames", c.frames);
  r.read("lr", c.lr);
  r.read("batch_size", c.batch_size);
  r.read("epochs", c.epochs);
  r.read("instances_per_id", c.instances_per_id);
  std::string mode = mode_name(c.mode);
  r.read("mode", mode);
  try {
    c.mode = parse_mode(mode);
  } catch (const ConfigError& e) {
    errors.push_back(e.what());
  }
  r.read("seed", c.seed);
  r.read("normalize_contrastive", c.normalize_contrastive);
  r.read("detach_prototypes", c.detach_prototypes);
  r.read("full_prototype_refresh", c.full_prototype_refresh);
  r.read("dbscan_eps", c.dbscan_eps);
  r.read("dbscan_min_pts", c.dbscan_min_pts);
  r.read("eval_every", c.eval_every);
  r.read("eval_batch_size", c.eval_batch_size);
}

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << errors.size() << " configuration error" << (errors.size() == 1 ? "" : "s") << ":";
  for (const auto& e : errors) os << "\n  - " << e;
  throw ConfigError(os.str());
}

}  // namespace

const char* mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::baseline: return "baseline";
    case TrainMode::pc: return "pc";
    case TrainMode::sgt_ds: return "sgt_ds";
    case TrainMode::sgt_gpc: return "sgt_gpc";
    case TrainMode::sgt_gpc_stpr: return "sgt_gpc_stpr";
    case TrainMode::unsupervised: return "unsupervised";
  }
  return "?";
}

TrainMode parse_mode(const std::string& name) {
  for (TrainMode m : kModes)
    if (name == mode_name(m)) return m;
  throw ConfigError("mode: unknown value \"" + name +
                    "\" (expected baseline, pc, sgt_ds, sgt_gpc, sgt_gpc_stpr or unsupervised)");
}

const std::vector<TrainMode>& ablation_modes() {
  static const std::vector<TrainMode> modes{TrainMode::baseline, TrainMode::pc,
                                            TrainMode::sgt_ds, TrainMode::sgt_gpc,
                                            TrainMode::sgt_gpc_stpr};
  return modes;
}

std::vector<std::string> TrainConfig::violations() const {
  std::vector<std::string> v;
  auto positive = [&](const char* name, std::size_t value) {
    if (value == 0) v.push_back(std::string(name) + " must be positive");
  };
  positive("d", model.d);
  positive("heads", model.heads);
  positive("head_dim", model.head_dim);
  positive("layers", model.layers);
  if (model.heads * model.head_dim != model.d) {
    v.push_back("d (" + std::to_string(model.d) + ") must equal heads * head_dim (" +
                std::to_string(model.heads) + " * " + std::to_string(model.head_dim) + ")");
  }
  if (model.use_pe && model.pe_dim == 0) v.push_back("pe_dim must be positive when use_pe is set");
  auto unit = [&](const char* name, double value) {
    if (!(value >= 0.0 && value <= 1.0))
      v.push_back(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
  };
  unit("alpha", alpha);
  unit("beta", beta);
  unit("lambda", lambda);
  if (!(tau1 > 0.0)) v.push_back("tau1 must be positive");
  if (!(tau2 > 0.0)) v.push_back("tau2 must be positive");
  if (frames != 0 && mask_frames >= frames) {
    v.push_back("mask_frames (b) must be smaller than frames (f)");
  }
  if (!(lr > 0.0)) v.push_back("lr must be positive");
  if (batch_size < 2) v.push_back("batch_size must be at least 2");
  positive("instances_per_id", instances_per_id);
  if (mode != TrainMode::unsupervised && batch_size / std::max<std::size_t>(instances_per_id, 1) < 2) {
    v.push_back("batch_size / instances_per_id must allow at least 2 identities per batch");
  }
  if (!(dbscan_eps > 0.0)) v.push_back("dbscan_eps must be positive");
  positive("dbscan_min_pts", dbscan_min_pts);
  positive("eval_batch_size", eval_batch_size);
  if (mode == TrainMode::unsupervised && full_prototype_refresh) {
    v.push_back("full_prototype_refresh is not available in unsupervised mode");
  }
  return v;
}

void TrainConfig::validate() const {
  auto v = violations();
  if (!v.empty()) fail(v);
}

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"d", c.model.d},
      {"heads", c.model.heads},
      {"head_dim", c.model.head_dim},
      {"layers", c.model.layers},
      {"pe_dim", c.model.pe_dim},
      {"use_pe", c.model.use_pe},
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"lambda", c.lambda},
      {"tau1", c.tau1},
      {"tau2", c.tau2},
      {"mask_nodes", c.mask_nodes},
      {"mask_frames", c.mask_frames},
      {"frames", c.frames},
      {"lr", c.lr},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"instances_per_id", c.instances_per_id},
      {"mode", mode_name(c.mode)},
      {"seed", c.seed},
      {"normalize_contrastive", c.normalize_contrastive},
      {"detach_prototypes", c.detach_prototypes},
      {"full_prototype_refresh", c.full_prototype_refresh},
      {"dbscan_eps", c.dbscan_eps},
      {"dbscan_min_pts", c.dbscan_min_pts},
      {"eval_every", c.eval_every},
      {"eval_batch_size", c.eval_batch_size},
  };
}

nlohmann::json to_json(const RunConfig& c) {
  auto j = to_json(c.train);
  j["manifest"] = c.manifest.string();
  j["output_dir"] = c.output_dir.string();
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  std::vector<std::string> errors;
  TrainConfig c;
  Reader r(j, errors);
  read_train(r, c, errors);
  r.reject_unknown();
  for (auto& v : c.violations()) errors.push_back(std::move(v));
  if (!errors.empty()) fail(errors);
  return c;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  std::vector<std::string> errors;
  RunConfig c;
  Reader r(j, errors);
  read_train(r, c.train, errors);
  std::string manifest, output_dir;
  r.read("manifest", manifest);
  r.read("output_dir", output_dir);
  r.reject_unknown();
  c.manifest = manifest;
  c.output_dir = output_dir;
  for (auto& v : c.train.violations()) errors.push_back(std::move(v));
  if (!errors.empty()) fail(errors);
  return c;
}

void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override \"" + o + "\" is not of the form key=value");
    }
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    auto parsed = nlohmann::json::parse(text, nullptr, false);
    j[key] = parsed.is_discarded() ? nlohmann::json(text) : parsed;
  }
}

RunConfig load_run_config(const std::filesystem::path& file,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read config " + file.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(file.string() + ": not valid JSON");
  if (j.is_object()) {
    for (const char* key : {"manifest", "output_dir"}) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) continue;
      std::filesystem::path p = it->get<std::string>();
      if (!p.empty() && p.is_relative()) *it = (file.parent_path() / p).string();
    }
  }
  apply_overrides(j, overrides);
  return run_config_from_json(j);
}

}  // namespace transg::trainer
