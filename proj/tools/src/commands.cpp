#include "transg_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

#include "transg/checkpoint.hpp"
#include "transg/config.hpp"
#include "transg/error.hpp"
#include "transg/evalrank.hpp"
#include "transg/skeledata.hpp"
#include "transg/synth.hpp"
#include "transg/trainer.hpp"

namespace transg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

struct SynthArgs {
  std::size_t ids = 10;
  std::size_t seqs = 20;
  std::size_t probe = 5;
  std::size_t gallery = 5;
  std::size_t frames = 6;
  std::string graph = "kinect20";
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.ids < 2) {
    throw ConfigError("--ids must be at least 2: re-identification needs two identities");
  }
  if (a.frames == 0) throw ConfigError("--frames must be positive");
  const fs::path dir = a.out;
  if (fs::exists(dir) && !fs::is_empty(dir) && !a.force) {
    throw IoError("output directory " + dir.string() + " is not empty (use --force)");
  }
  ensure_dir(dir);
  const auto topo = skeledata::builtin_topology(a.graph);
  numerics::SeededRng rng(a.seed);
  const auto rec = skeledata::generate_synthetic_recordings(
      a.ids, {a.seqs, a.probe, a.gallery}, a.frames, topo, rng);

  skeledata::DatasetManifest m;
  m.name = "synthetic-" + topo.name;
  m.joints = topo.joints;
  m.frames = a.frames;
  m.edges = topo.edges;
  m.root_joint = topo.root;
  m.train_files = {"train.jsonl"};
  m.probe_files = {"probe.jsonl"};
  m.gallery_files = {"gallery.jsonl"};
  skeledata::write_recordings(dir / "train.jsonl", rec.train);
  skeledata::write_recordings(dir / "probe.jsonl", rec.probe);
  skeledata::write_recordings(dir / "gallery.jsonl", rec.gallery);
  skeledata::write_manifest(dir / "manifest.json", m);
  write_json(dir / "config.json", {{"command", "synth"},
                                   {"ids", a.ids},
                                   {"seqs", a.seqs},
                                   {"probe", a.probe},
                                   {"gallery", a.gallery},
                                   {"frames", a.frames},
                                   {"graph", a.graph},
                                   {"seed", a.seed}});
  out << "wrote " << rec.train.size() << " train, " << rec.probe.size() << " probe and "
      << rec.gallery.size() << " gallery sequences to " << dir.string() << '\n';
  return 0;
}

struct TrainArgs {
  std::string config;
  std::string resume;
  std::vector<std::string> overrides;
  std::string manifest;
  std::string out;
  std::string mode;
  long epochs = -1;
  long seed = -1;
};

std::vector<std::string> collect_overrides(const TrainArgs& a) {
  std::vector<std::string> o = a.overrides;
  if (!a.manifest.empty()) o.push_back("manifest=" + json(a.manifest).dump());
  if (!a.out.empty()) o.push_back("output_dir=" + json(a.out).dump());
  if (!a.mode.empty()) o.push_back("mode=" + json(a.mode).dump());
  if (a.epochs >= 0) o.push_back("epochs=" + std::to_string(a.epochs));
  if (a.seed >= 0) o.push_back("seed=" + std::to_string(a.seed));
  return o;
}

trainer::RunConfig resolve_config(const TrainArgs& a) {
  if (a.config.empty()) {
    json j = json::object();
    trainer::apply_overrides(j, collect_overrides(a));
    return trainer::run_config_from_json(j);
  }
  return trainer::load_run_config(a.config, collect_overrides(a));
}

void print_epoch(std::ostream& out, const trainer::EpochRecord& r, std::size_t total_epochs) {
  out << "epoch " << r.epoch << '/' << total_epochs << std::fixed << std::setprecision(5)
      << "  L=" << r.losses.total << " gpc_seq=" << r.losses.gpc_seq
      << " gpc_ske=" << r.losses.gpc_ske << " st=" << r.losses.stpr_st
      << " tr=" << r.losses.stpr_tr;
  if (r.metrics) {
    out << std::setprecision(2) << "  mAP=" << 100.0 * r.metrics->mean_ap
        << " R1=" << 100.0 * r.metrics->rank1 << " R5=" << 100.0 * r.metrics->rank5
        << " R10=" << 100.0 * r.metrics->rank10;
  }
  out << std::defaultfloat << '\n';
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  auto run = resolve_config(a);
  if (run.manifest.empty()) throw ConfigError("no dataset manifest given (manifest key or --manifest)");
  if (run.output_dir.empty()) throw ConfigError("no output directory given (output_dir key or --out)");
  const auto dataset = skeledata::load_dataset(run.manifest);

  std::optional<trainer::Trainer> t;
  const bool resuming = !a.resume.empty();
  if (resuming) {
    auto ckpt = trainer::load_checkpoint(a.resume);
    ckpt.config.epochs = run.train.epochs;
    t.emplace(ckpt, dataset);
  } else {
    t.emplace(run.train, dataset);
  }
  run.train = t->config();

  const fs::path dir = run.output_dir;
  ensure_dir(dir);
  write_json(dir / "config.json", trainer::to_json(run));
  const fs::path metrics = dir / "metrics.csv";
  const bool append = resuming && fs::exists(metrics);
  {
    std::ofstream log(metrics, append ? std::ios::app : std::ios::trunc);
    if (!log) throw IoError("cannot write " + metrics.string());
    if (!append) log << trainer::metrics_csv_header() << '\n';
  }

  out << "training " << trainer::mode_name(run.train.mode) << " on " << dataset.train.size()
      << " sequences (" << t->batch_size() << " per batch, " << t->steps_per_epoch()
      << " steps per epoch, " << t->state().parameter_count() << " parameters)\n";
  t->train([&](const trainer::EpochRecord& r) {
    std::ofstream log(metrics, std::ios::app);
    log << trainer::metrics_csv_row(r) << '\n';
    print_epoch(out, r, run.train.epochs);
    if (r.gpc_skipped_steps > 0) {
      err << "warning: epoch " << r.epoch << ": " << r.clusters
          << " pseudo-label cluster(s); GPC skipped in " << r.gpc_skipped_steps << " of "
          << r.steps << " steps\n";
    }
    const auto ckpt = t->checkpoint();
    trainer::save_checkpoint(dir / "last", ckpt);
    if (r.metrics && t->progress().best_epoch == r.epoch) {
      trainer::save_checkpoint(dir / "best", ckpt);
    }
  });
  if (run.train.epochs == 0 || !fs::exists(dir / "last")) {
    trainer::save_checkpoint(dir / "last", t->checkpoint());
  }
  out << "checkpoint written to " << (dir / "last").string() << '\n';
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out = ".";
  bool cosine = false;
  std::size_t batch = 64;
};

evalrank::RepMatrix encode_split(trainer::LoadedModel& model,
                                 const std::vector<skeledata::SkeletonSequence>& seqs,
                                 std::size_t batch) {
  if (model.config.mode == trainer::TrainMode::baseline) {
    for (const auto& s : seqs) {
      if (s.joints != model.model.joints || s.frames != model.model.frames) {
        throw SchemaError("sequence " + s.source_id + " does not match the checkpoint's J=" +
                          std::to_string(model.model.joints) + ", f=" +
                          std::to_string(model.model.frames));
      }
    }
    return evalrank::raw_features(seqs);
  }
  return evalrank::embed_split(model.state, model.graph, seqs, batch);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  auto model = trainer::load_model(a.checkpoint);
  const auto dataset = skeledata::load_dataset(a.manifest);
  if (dataset.manifest.joints != model.model.joints) {
    throw SchemaError("dataset has J=" + std::to_string(dataset.manifest.joints) +
                      " but the checkpoint was trained with J=" +
                      std::to_string(model.model.joints));
  }
  skeledata::validate_for_evaluation(dataset);
  const auto probe = encode_split(model, dataset.probe, a.batch);
  const auto gallery = encode_split(model, dataset.gallery, a.batch);
  const auto report =
      evalrank::match(probe, gallery, evalrank::identities(dataset.probe),
                      evalrank::identities(dataset.gallery),
                      a.cosine ? evalrank::Metric::cosine : evalrank::Metric::euclidean);
  const fs::path dir = a.out;
  ensure_dir(dir);
  evalrank::write_report_csv(dir / "report.csv", report);
  evalrank::write_rankings_jsonl(dir / "rankings.jsonl", report);
  write_json(dir / "eval_config.json", {{"command", "eval"},
                                        {"checkpoint", a.checkpoint},
                                        {"manifest", a.manifest},
                                        {"metric", a.cosine ? "cosine" : "euclidean"},
                                        {"train_config", trainer::to_json(model.config)}});
  out << std::fixed << std::setprecision(2) << "probes " << report.evaluated << " (excluded "
      << report.excluded << ")  mAP=" << 100.0 * report.mean_ap
      << " R1=" << 100.0 * report.rank1 << " R5=" << 100.0 * report.rank5
      << " R10=" << 100.0 * report.rank10 << '\n';
  return 0;
}

struct EmbedArgs {
  std::string checkpoint;
  std::string manifest;
  std::string split = "probe";
  std::string out;
  std::size_t batch = 64;
};

int cmd_embed(const EmbedArgs& a, std::ostream& out) {
  auto model = trainer::load_model(a.checkpoint);
  const auto dataset = skeledata::load_dataset(a.manifest);
  const auto split = skeledata::parse_split(a.split);
  const auto& seqs = dataset.split(split);
  const auto reps = encode_split(model, seqs, a.batch);
  std::ofstream csv(a.out);
  if (!csv) throw IoError("cannot write " + a.out);
  csv << "source_id,identity";
  for (std::size_t k = 0; k < reps.cols; ++k) csv << ",s" << k;
  csv << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < reps.rows; ++i) {
    csv << seqs[i].source_id << ',' << seqs[i].identity;
    for (double v : reps.row(i)) csv << ',' << v;
    csv << '\n';
  }
  write_json(a.out + ".config.json", {{"command", "embed"},
                                      {"checkpoint", a.checkpoint},
                                      {"manifest", a.manifest},
                                      {"split", a.split},
                                      {"train_config", trainer::to_json(model.config)}});
  out << "wrote " << reps.rows << " x " << reps.cols << " representations to " << a.out << '\n';
  return 0;
}

int cmd_gradcheck(const TrainArgs& a, double tolerance, std::ostream& out) {
  trainer::TrainConfig config = trainer::tiny_config();
  skeledata::Dataset dataset;
  bool tiny = true;
  if (!a.config.empty() || !a.overrides.empty() || !a.mode.empty()) {
    json j = trainer::to_json(config);
    if (!a.config.empty()) {
      const auto file = trainer::load_run_config(a.config);
      j = trainer::to_json(file);
    }
    trainer::apply_overrides(j, collect_overrides(a));
    const auto run = trainer::run_config_from_json(j);
    config = run.train;
    if (!run.manifest.empty()) {
      dataset = skeledata::load_dataset(run.manifest);
      tiny = false;
    }
  }
  if (tiny) dataset = trainer::tiny_dataset();
  const auto report = trainer::gradcheck(config, dataset, tolerance);
  out << std::left << std::setw(44) << "group" << std::setw(8) << "size" << std::setw(14)
      << "max_rel_err" << "result\n";
  for (const auto& r : report.rows) {
    out << std::setw(44) << r.group << std::setw(8) << r.size << std::setw(14)
        << std::setprecision(3) << std::scientific << r.max_rel_error << std::defaultfloat
        << (r.passed ? "pass" : "FAIL") << '\n';
  }
  out << (report.passed ? "all groups pass" : "gradient check FAILED") << " (loss "
      << std::setprecision(8) << report.loss << ", tolerance " << tolerance << ", "
      << std::setprecision(3) << report.seconds << " s)\n";
  return report.passed ? 0 : 1;
}

int cmd_ablate(const TrainArgs& a, std::ostream& out) {
  const auto run = resolve_config(a);
  if (run.manifest.empty()) throw ConfigError("no dataset manifest given (manifest key or --manifest)");
  const auto dataset = skeledata::load_dataset(run.manifest);
  const fs::path dir = run.output_dir.empty() ? fs::path(".") : run.output_dir;
  ensure_dir(dir);
  write_json(dir / "ablation_config.json", trainer::to_json(run));
  const auto rows = trainer::train_ablation_suite(
      run.train, dataset, [&](const trainer::AblationRow& r) {
        out << std::left << std::setw(14) << trainer::mode_name(r.mode) << std::fixed
            << std::setprecision(2) << " mAP=" << 100.0 * r.metrics.mean_ap
            << " R1=" << 100.0 * r.metrics.rank1 << " (" << r.seconds << " s)"
            << std::defaultfloat << '\n';
      });
  trainer::write_ablation_csv(dir / "ablation.csv", rows);
  out << "wrote " << (dir / "ablation.csv").string() << '\n';
  return 0;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  std::optional<long> step = std::nullopt) {
  json j{{"error", kind}, {"message", message}};
  if (step) j["step"] = *step;
  err << j.dump() << '\n';
}

void add_train_options(CLI::App* cmd, TrainArgs& a, bool config_required) {
  auto* opt = cmd->add_option("--config", a.config, "JSON run configuration");
  if (config_required) opt->required();
  cmd->add_option("--set", a.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--manifest", a.manifest, "dataset manifest (overrides the config)");
  cmd->add_option("--out", a.out, "output directory (overrides the config)");
  cmd->add_option("--mode", a.mode, "training mode (overrides the config)");
  cmd->add_option("--epochs", a.epochs, "epochs (overrides the config)");
  cmd->add_option("--seed", a.seed, "seed (overrides the config)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skeleton graph transformer re-identification toolkit", "transg"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a synthetic skeleton dataset");
  s->add_option("--ids", synth.ids, "identities")->capture_default_str();
  s->add_option("--seqs", synth.seqs, "train sequences per identity")->capture_default_str();
  s->add_option("--probe", synth.probe, "probe sequences per identity")->capture_default_str();
  s->add_option("--gallery", synth.gallery, "gallery sequences per identity")
      ->capture_default_str();
  s->add_option("--frames", synth.frames, "frames per sequence (f)")->capture_default_str();
  s->add_option("--graph", synth.graph, "skeleton layout: kinect20, kinect25 or coarse11")
      ->capture_default_str();
  s->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_flag("--force", synth.force, "write into a non-empty directory");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a model");
  add_train_options(t, train, false);
  t->add_option("--resume", train.resume, "checkpoint directory to resume from");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "rank the gallery for every probe");
  e->add_option("--checkpoint", eval.checkpoint, "checkpoint directory")->required();
  e->add_option("--manifest", eval.manifest, "dataset manifest")->required();
  e->add_option("--out", eval.out, "report directory")->capture_default_str();
  e->add_flag("--cosine", eval.cosine, "rank by cosine distance (diagnostic)");
  e->add_option("--batch", eval.batch, "encoding batch size")->capture_default_str();

  EmbedArgs embed;
  auto* m = app.add_subcommand("embed", "export sequence representations as CSV");
  m->add_option("--checkpoint", embed.checkpoint, "checkpoint directory")->required();
  m->add_option("--manifest", embed.manifest, "dataset manifest")->required();
  m->add_option("--split", embed.split, "train, probe or gallery")->capture_default_str();
  m->add_option("--out", embed.out, "output CSV")->required();
  m->add_option("--batch", embed.batch, "encoding batch size")->capture_default_str();

  TrainArgs grad;
  double tolerance = 1e-4;
  auto* g = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  add_train_options(g, grad, false);
  g->add_option("--tolerance", tolerance, "max relative error")->capture_default_str();

  TrainArgs ablate;
  auto* a = app.add_subcommand("ablate", "train and evaluate every ablation mode");
  add_train_options(a, ablate, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    report_error(err, "usage_error", ex.what());
    return 2;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (t->parsed()) return cmd_train(train, out, err);
    if (e->parsed()) return cmd_eval(eval, out);
    if (m->parsed()) return cmd_embed(embed, out);
    if (g->parsed()) return cmd_gradcheck(grad, tolerance, out);
    if (a->parsed()) return cmd_ablate(ablate, out);
  } catch (const DivergenceError& ex) {
    report_error(err, ex.kind(), ex.what(), ex.step());
    return 2;
  } catch (const Error& ex) {
    report_error(err, ex.kind(), ex.what());
    return 2;
  } catch (const std::exception& ex) {
    report_error(err, "internal_error", ex.what());
    return 3;
  }
  return 2;
}

}  // namespace transg::cli
