#include "transg/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>

#include "transg/error.hpp"

namespace transg::trainer {

namespace {

constexpr const char* kFormat = "transg-checkpoint";

const char* kind_name(TensorKind k) {
  switch (k) {
    case TensorKind::parameter: return "parameter";
    case TensorKind::buffer: return "buffer";
    case TensorKind::adam_m: return "adam_m";
    case TensorKind::adam_v: return "adam_v";
  }
  return "?";
}

TensorKind parse_kind(const std::string& s) {
  for (TensorKind k : {TensorKind::parameter, TensorKind::buffer, TensorKind::adam_m,
                       TensorKind::adam_v})
    if (s == kind_name(k)) return k;
  throw ParseError("unknown tensor kind \"" + s + "\"");
}

nlohmann::json terms_json(const LossTerms& t) {
  return {t.total, t.gpc_seq, t.gpc_ske, t.stpr_st, t.stpr_tr};
}

LossTerms terms_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 5) throw ParseError("epoch_sums must hold 5 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(),
          j[4].get<double>()};
}

void put_f32(std::string& out, double v) {
  const float f = static_cast<float>(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

double get_f32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return static_cast<double>(f);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& c) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json m;
  m["format"] = kFormat;
  m["version"] = kCheckpointVersion;
  m["config"] = to_json(c.config);
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : c.model.edges) edges.push_back({a, b});
  m["model"] = {{"joints", c.model.joints},
                {"frames", c.model.frames},
                {"edges", edges},
                {"class_ids", c.model.class_ids},
                {"encoder", c.model.kind == sgt::EncoderKind::sgt ? "sgt" : "linear"}};
  nlohmann::json tensors = nlohmann::json::array();
  std::string blob;
  for (const auto& t : c.tensors) {
    if (numerics::shape_numel(t.shape) != t.values.size()) {
      throw ContractViolation("tensor " + t.name + " holds " + std::to_string(t.values.size()) +
                              " values for shape " + numerics::shape_str(t.shape));
    }
    tensors.push_back({{"name", t.name}, {"kind", kind_name(t.kind)}, {"shape", t.shape}});
    for (double v : t.values) put_f32(blob, v);
  }
  m["tensors"] = tensors;
  const auto& p = c.progress;
  m["progress"] = {{"epoch", p.epoch},
                   {"step_in_epoch", p.step_in_epoch},
                   {"global_step", p.global_step},
                   {"adam_steps", p.adam_steps},
                   {"epoch_sums", terms_json(p.epoch_sums)},
                   {"epoch_gpc_skips", p.epoch_gpc_skips},
                   {"best_map", p.best_map},
                   {"best_epoch", p.best_epoch}};
  m["rng"] = c.rng_state;
  m["pseudo_labels"] = c.pseudo_labels;

  std::ofstream bin(dir / "params.bin", std::ios::binary | std::ios::trunc);
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!bin) throw IoError("cannot write " + (dir / "params.bin").string());
  std::ofstream man(dir / "manifest.json", std::ios::trunc);
  man << m.dump(2) << '\n';
  if (!man) throw IoError("cannot write " + (dir / "manifest.json").string());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const std::string text = read_file(manifest_path);
  const std::string blob = read_file(dir / "params.bin");
  nlohmann::json m = nlohmann::json::parse(text, nullptr, false);
  if (m.is_discarded() || !m.is_object()) {
    throw ParseError(manifest_path.string() + ": not a valid JSON object");
  }
  if (m.value("format", std::string()) != kFormat) {
    throw ParseError(manifest_path.string() + ": not a checkpoint manifest");
  }
  if (!m.contains("version") || !m["version"].is_number_integer() ||
      m["version"].get<int>() != kCheckpointVersion) {
    throw IncompatibleCheckpoint(manifest_path.string() + ": checkpoint version " +
                                 (m.contains("version") ? m["version"].dump() : "missing") +
                                 ", this build reads version " +
                                 std::to_string(kCheckpointVersion));
  }

  Checkpoint c;
  try {
    c.config = train_config_from_json(m.at("config"));
    const auto& model = m.at("model");
    c.model.joints = model.at("joints").get<std::size_t>();
    c.model.frames = model.at("frames").get<std::size_t>();
    for (const auto& e : model.at("edges"))
      c.model.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    c.model.class_ids = model.at("class_ids").get<std::vector<int>>();
    const auto encoder = model.at("encoder").get<std::string>();
    if (encoder != "sgt" && encoder != "linear") throw ParseError("unknown encoder " + encoder);
    c.model.kind = encoder == "sgt" ? sgt::EncoderKind::sgt : sgt::EncoderKind::linear;

    std::size_t total = 0;
    for (const auto& t : m.at("tensors")) {
      StoredTensor st;
      st.name = t.at("name").get<std::string>();
      st.kind = parse_kind(t.at("kind").get<std::string>());
      st.shape = t.at("shape").get<numerics::Shape>();
      total += numerics::shape_numel(st.shape);
      c.tensors.push_back(std::move(st));
    }
    if (blob.size() != 4 * total) {
      throw ParseError((dir / "params.bin").string() + ": expected " + std::to_string(4 * total) +
                       " bytes, found " + std::to_string(blob.size()) +
                       (blob.size() < 4 * total ? " (truncated)" : ""));
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    for (auto& t : c.tensors) {
      const std::size_t n = numerics::shape_numel(t.shape);
      t.values.resize(n);
      for (std::size_t i = 0; i < n; ++i, bytes += 4) t.values[i] = get_f32(bytes);
    }

    const auto& p = m.at("progress");
    c.progress.epoch = p.at("epoch").get<std::size_t>();
    c.progress.step_in_epoch = p.at("step_in_epoch").get<std::size_t>();
    c.progress.global_step = p.at("global_step").get<long>();
    c.progress.adam_steps = p.at("adam_steps").get<long>();
    c.progress.epoch_sums = terms_from(p.at("epoch_sums"));
    c.progress.epoch_gpc_skips = p.at("epoch_gpc_skips").get<std::size_t>();
    c.progress.best_map = p.at("best_map").get<double>();
    c.progress.best_epoch = p.at("best_epoch").get<std::size_t>();
    c.rng_state = m.at("rng").get<std::string>();
    numerics::SeededRng::deserialize(c.rng_state);
    c.pseudo_labels = m.at("pseudo_labels").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  return c;
}

sgt::EncoderState restore_state(const Checkpoint& c) {
  numerics::SeededRng rng(c.config.seed);
  const std::size_t classes = c.config.mode == TrainMode::sgt_ds ? c.model.class_ids.size() : 0;
  auto state = sgt::EncoderState::create(c.config.model, c.model.joints, c.model.frames, classes,
                                         c.model.kind, rng);
  std::map<std::pair<std::string, TensorKind>, const StoredTensor*> stored;
  for (const auto& t : c.tensors) stored[{t.name, t.kind}] = &t;
  auto find = [&](const std::string& name, TensorKind kind, std::size_t numel) {
    auto it = stored.find({name, kind});
    if (it == stored.end()) {
      throw IncompatibleCheckpoint(std::string(kind_name(kind)) + " " + name +
                                   " is missing from the checkpoint");
    }
    if (it->second->values.size() != numel) {
      throw IncompatibleCheckpoint(name + " has " + std::to_string(it->second->values.size()) +
                                   " values, the network expects " + std::to_string(numel));
    }
    return it->second;
  };
  for (auto& p : state.parameters()) {
    const auto* t = find(p.name, TensorKind::parameter, p.tensor.numel());
    if (t->shape != p.tensor.shape()) {
      throw IncompatibleCheckpoint(p.name + " has shape " + numerics::shape_str(t->shape) +
                                   ", the network expects " +
                                   numerics::shape_str(p.tensor.shape()));
    }
    std::copy(t->values.begin(), t->values.end(), p.tensor.mutable_data().begin());
  }
  for (auto& b : state.buffers()) *b.values = find(b.name, TensorKind::buffer, b.values->size())->values;
  return state;
}

LoadedModel load_model(const std::filesystem::path& dir) {
  const Checkpoint c = load_checkpoint(dir);
  LoadedModel m{c.config, c.model, restore_state(c), {}};
  m.graph = graphpe::build_graph(c.model.joints, c.model.edges);
  if (c.model.kind == sgt::EncoderKind::sgt && c.config.model.use_pe) {
    m.graph = graphpe::compute_pe(std::move(m.graph), c.config.model.pe_dim);
  }
  return m;
}

}  // namespace transg::trainer
