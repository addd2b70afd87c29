// Acceptance run: one PASS/FAIL line per criterion. Criterion 5 is a
// diagnostic and never affects the exit status.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "transg/checkpoint.hpp"
#include "transg/dbscan.hpp"
#include "transg/evalrank.hpp"
#include "transg/graphpe.hpp"
#include "transg/numerics/ops.hpp"
#include "transg/numerics/sym_eig.hpp"
#include "transg/objectives.hpp"
#include "transg/sgt.hpp"
#include "transg/synth.hpp"
#include "transg/trainer.hpp"

namespace {

using namespace transg;
using namespace transg::trainer;
using numerics::SeededRng;
using numerics::Tensor;
using Clock = std::chrono::steady_clock;
namespace ops = numerics::ops;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failed checks for one criterion.
struct Checks {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
  std::string summary() const {
    std::string s;
    for (std::size_t i = 0; i < failures.size() && i < 3; ++i) s += (i ? "; " : "") + failures[i];
    if (failures.size() > 3) s += "; +" + std::to_string(failures.size() - 3) + " more";
    return s;
  }
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

skeledata::Dataset desk_dataset(std::uint64_t seed) {
  SeededRng rng(seed);
  return skeledata::generate_synthetic_dataset(10, {20, 5, 5}, 6,
                                               skeledata::builtin_topology("kinect20"), rng);
}

trainer::TrainConfig desk_config() {
  trainer::TrainConfig c;  // defaults: alpha=beta=lambda=0.5, tau 0.07/14, a=10, b=2
  c.model.d = 64;
  c.model.heads = 8;
  c.model.head_dim = 8;
  c.model.layers = 2;
  c.mode = TrainMode::sgt_gpc_stpr;
  c.epochs = 150;
  c.eval_every = 10;
  return c;
}

// ---- 1: gradient fidelity -------------------------------------------------

std::pair<bool, std::string> gradient_fidelity() {
  const auto start = Clock::now();
  const auto report = trainer::gradcheck(trainer::tiny_config(), trainer::tiny_dataset());
  const double elapsed = seconds_since(start);
  double worst = 0;
  std::string worst_group;
  for (const auto& r : report.rows)
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_group = r.group;
    }
  const bool ok = report.passed && worst < 1e-4 && elapsed < 60.0;
  return {ok, std::to_string(report.rows.size()) + " groups, max rel error " + fmt(worst) + " (" +
                  worst_group + "), " + fmt(elapsed) + " s"};
}

// ---- 2: spectral correctness ----------------------------------------------

std::vector<skeledata::Edge> random_connected(std::size_t n, SeededRng& rng) {
  std::vector<skeledata::Edge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(rng.uniform_index(v), v);
  for (int extra = 0; extra < 4; ++extra) {
    const std::size_t a = rng.uniform_index(n), b = rng.uniform_index(n);
    bool dup = a == b;
    for (auto [x, y] : edges) dup = dup || (x == a && y == b) || (x == b && y == a);
    if (!dup) edges.emplace_back(a, b);
  }
  return edges;
}

void check_graph(const graphpe::SkeletonGraphSpec& g, std::size_t k, Checks& c,
                 const std::string& label) {
  const std::size_t n = g.joints;
  const auto eig = numerics::sym_eig(g.laplacian, n);
  double recon = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0;
      for (std::size_t m = 0; m < n; ++m) v += eig.vector(i, m) * eig.values[m] * eig.vector(j, m);
      recon = std::max(recon, std::abs(v - g.laplacian[i * n + j]));
    }
  c.expect(recon < 1e-8, label + " reconstruction error " + fmt(recon));
  for (double l : eig.values)
    c.expect(l >= -1e-8 && l <= 2 + 1e-8, label + " eigenvalue " + fmt(l, 12) + " outside [0, 2]");
  const auto pe = graphpe::compute_pe(g, k);
  double residual = 0;
  for (std::size_t col = 0; col < k; ++col)
    for (std::size_t i = 0; i < n; ++i) {
      double lv = 0;
      for (std::size_t j = 0; j < n; ++j) lv += g.laplacian[i * n + j] * pe.pe[j * k + col];
      residual = std::max(residual, std::abs(lv - pe.pe_eigenvalues[col] * pe.pe[i * k + col]));
    }
  c.expect(residual < 1e-8, label + " eigen-equation residual " + fmt(residual));
}

std::pair<bool, std::string> spectral_correctness() {
  Checks c;
  const auto path = graphpe::build_graph(3, {{0, 1}, {1, 2}});
  const auto eig = numerics::sym_eig(path.laplacian, 3);
  const double expected[3] = {0, 1, 2};
  for (int i = 0; i < 3; ++i)
    c.expect(std::abs(eig.values[i] - expected[i]) < 1e-8,
             "path eigenvalue " + std::to_string(i) + " = " + fmt(eig.values[i], 12));
  check_graph(path, 2, c, "path3");
  SeededRng rng(2024);
  std::size_t largest = 0;
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 5 + rng.uniform_index(21);  // 5..25
    largest = std::max(largest, n);
    const auto g = graphpe::build_graph(n, random_connected(n, rng));
    check_graph(g, std::min<std::size_t>(8, n - 1), c, "random J=" + std::to_string(n));
  }
  return {c.ok(), c.ok() ? "path {0,1,2} and 5 random graphs (J up to " + std::to_string(largest) +
                               ") within 1e-8"
                         : c.summary()};
}

// ---- 3: structural invariants ---------------------------------------------

Tensor random_tensor(numerics::Shape shape, SeededRng& rng) {
  std::vector<double> v(numerics::shape_numel(shape));
  for (double& x : v) x = rng.normal();
  return Tensor::from(std::move(shape), std::move(v));
}

graphpe::SkeletonGraphSpec chain(std::size_t j) {
  std::vector<skeledata::Edge> e;
  for (std::size_t i = 1; i < j; ++i) e.emplace_back(i - 1, i);
  return graphpe::build_graph(j, e);
}

void attention_rows(Checks& c) {
  SeededRng rng(1);
  sgt::SgtConfig cfg;
  cfg.d = 16;
  cfg.heads = 4;
  cfg.head_dim = 4;
  cfg.pe_dim = 3;
  auto s = sgt::EncoderState::create(cfg, 20, 3, 0, sgt::EncoderKind::sgt, rng);
  const auto g = graphpe::compute_pe(graphpe::build_graph(20, skeledata::builtin_topology("kinect20").edges), 3);
  const Tensor h = sgt::embed_nodes(random_tensor({2, 3, 20, 3}, rng), g, s);
  Tensor att;
  sgt::fr_layer(h, 0, s, sgt::Mode::train, &att);
  double worst = 0;
  for (std::size_t row = 0; row < att.numel() / 20; ++row) {
    double sum = 0;
    for (std::size_t j = 0; j < 20; ++j) sum += att.data()[row * 20 + j];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  c.expect(worst < 1e-9, "attention row sum off by " + fmt(worst));
}

void permutation_equivariance(Checks& c) {
  SeededRng rng(2);
  sgt::SgtConfig cfg;
  cfg.d = 8;
  cfg.heads = 2;
  cfg.head_dim = 4;
  cfg.use_pe = false;
  const std::size_t J = 6, f = 2;
  auto s = sgt::EncoderState::create(cfg, J, f, 0, sgt::EncoderKind::sgt, rng);
  const auto g = chain(J);
  {
    numerics::NoGradGuard guard;
    for (int i = 0; i < 3; ++i) sgt::encode(random_tensor({4, f, J, 3}, rng), g, s, sgt::Mode::train);
  }
  std::vector<std::size_t> perm(J);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  const Tensor x = random_tensor({2, f, J, 3}, rng);
  std::vector<double> px(x.numel());
  for (std::size_t bt = 0; bt < 2 * f; ++bt)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t a = 0; a < 3; ++a) px[(bt * J + j) * 3 + a] = x.data()[(bt * J + perm[j]) * 3 + a];
  std::vector<std::size_t> inverse(J);
  for (std::size_t j = 0; j < J; ++j) inverse[perm[j]] = j;
  std::vector<skeledata::Edge> pe;
  for (auto [a, b] : g.edges) pe.emplace_back(inverse[a], inverse[b]);
  numerics::NoGradGuard guard;
  const auto r = sgt::encode(x, g, s, sgt::Mode::infer);
  const auto pr = sgt::encode(Tensor::from(x.shape(), px), graphpe::build_graph(J, pe), s, sgt::Mode::infer);
  double worst = 0;
  for (std::size_t bt = 0; bt < 2 * f; ++bt)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t o = 0; o < 8; ++o)
        worst = std::max(worst, std::abs(pr.node_reps.data()[(bt * J + j) * 8 + o] -
                                         r.node_reps.data()[(bt * J + perm[j]) * 8 + o]));
  c.expect(worst < 1e-9, "permutation equivariance error " + fmt(worst));
}

void masked_insensitivity(Checks& c) {
  SeededRng rng(3);
  const auto plan = objectives::MaskPlan::sample(4, 6, 20, 10, 2, rng);
  const Tensor h = random_tensor({4, 6, 20, 8}, rng);
  std::vector<double> pn(h.data().begin(), h.data().end()), pt = pn;
  for (std::size_t bt = 0; bt < 24; ++bt)
    for (std::size_t j = 0; j < 20; ++j)
      for (std::size_t o = 0; o < 8; ++o) {
        if (plan.node_keep[bt * 20 + j] == 0.0) pn[(bt * 20 + j) * 8 + o] = 1e3 * rng.normal();
        if (plan.trajectory_keep[bt] == 0.0) pt[(bt * 20 + j) * 8 + o] = 1e3 * rng.normal();
      }
  const Tensor s0 = objectives::structure_prompt(h, plan);
  const Tensor s1 = objectives::structure_prompt(Tensor::from(h.shape(), pn), plan);
  const Tensor t0 = objectives::trajectory_prompt(h, plan);
  const Tensor t1 = objectives::trajectory_prompt(Tensor::from(h.shape(), pt), plan);
  c.expect(std::equal(s0.data().begin(), s0.data().end(), s1.data().begin()),
           "structure prompt depends on masked nodes");
  c.expect(std::equal(t0.data().begin(), t0.data().end(), t1.data().begin()),
           "trajectory prompt depends on masked frames");
}

void gpc_uniform(Checks& c) {
  // Reps orthogonal to every prototype give equal similarities.
  for (std::size_t classes : {2u, 3u, 5u}) {
    const std::size_t d = classes + 1;
    std::vector<double> protos(classes * d, 0.0), reps(2 * d, 0.0);
    for (std::size_t k = 0; k < classes; ++k) protos[k * d + k] = 1.0 + k;
    reps[classes] = 1.0;
    reps[d + classes] = -3.0;
    objectives::PrototypeSet set;
    for (std::size_t k = 0; k < classes; ++k) {
      set.class_ids.push_back(int(k));
      set.counts.push_back(1);
    }
    set.prototypes = Tensor::from({classes, d}, protos);
    const double loss =
        objectives::gpc_seq_loss(Tensor::from({2, d}, reps), std::vector<int>{0, 1}, set, 0.07).item();
    c.expect(std::abs(loss - std::log(double(classes))) < 1e-9,
             "GPC uniform loss " + fmt(loss, 12) + " vs ln " + std::to_string(classes));
  }
}

void stpr_zero(Checks& c) {
  SeededRng rng(4);
  numerics::Mlp head = numerics::Mlp::create(4, 8, 9, rng);
  for (double& w : head.output.weight.mutable_data()) w = 0.0;
  auto bias = head.output.bias.mutable_data();
  for (std::size_t i = 0; i < 9; ++i) bias[i] = 0.1 * double(i) - 0.3;
  // J=3, f=2: every frame's structure prediction is the bias laid out as J x 3.
  const auto plan = objectives::MaskPlan::sample(2, 2, 3, 1, 1, rng);
  std::vector<double> gt;
  for (int rep = 0; rep < 4; ++rep) gt.insert(gt.end(), bias.begin(), bias.end());
  const Tensor truth = Tensor::from({2, 2, 3, 3}, gt);
  const double loss =
      objectives::stpr_structure(random_tensor({2, 2, 3, 4}, rng), plan, head, truth).item();
  c.expect(loss == 0.0, "STPR at perfect reconstruction = " + fmt(loss));
}

void ranking_oracle(Checks& c) {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t np = 1 + rng.uniform_index(50), ng = 1 + rng.uniform_index(200);
    const std::size_t d = 1 + rng.uniform_index(8), ids = 2 + rng.uniform_index(10);
    evalrank::RepMatrix p{np, d, std::vector<double>(np * d)}, g{ng, d, std::vector<double>(ng * d)};
    for (double& v : p.values) v = rng.normal();
    for (double& v : g.values) v = rng.normal();
    std::vector<int> pid(np), gid(ng);
    for (int& v : pid) v = int(rng.uniform_index(ids));
    for (int& v : gid) v = int(rng.uniform_index(ids));
    const auto report = evalrank::match(p, g, pid, gid);
    c.expect(report.rank1 <= report.rank5 && report.rank5 <= report.rank10,
             "rank order violated in trial " + std::to_string(trial));
    double r1 = 0, r5 = 0, r10 = 0, map = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < np; ++i) {
      if (std::find(gid.begin(), gid.end(), pid[i]) == gid.end()) continue;
      ++n;
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t j = 0; j < ng; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += std::pow(p.values[i * d + k] - g.values[j * d + k], 2);
        order.emplace_back(std::sqrt(s), j);
      }
      std::sort(order.begin(), order.end());
      std::size_t first = 0, hits = 0;
      double ap = 0;
      for (std::size_t r = 0; r < ng; ++r)
        if (gid[order[r].second] == pid[i]) {
          first = first ? first : r + 1;
          ap += double(++hits) / double(r + 1);
        }
      map += ap / double(hits);
      r1 += first <= 1;
      r5 += first <= 5;
      r10 += first <= 10;
    }
    const double dn = double(std::max<std::size_t>(n, 1));
    const double err = std::max({std::abs(report.rank1 - r1 / dn), std::abs(report.rank5 - r5 / dn),
                                 std::abs(report.rank10 - r10 / dn), std::abs(report.mean_ap - map / dn)});
    c.expect(err < 1e-12, "ranking differs from oracle in trial " + std::to_string(trial));
  }
}

std::pair<bool, std::string> structural_invariants() {
  Checks c;
  attention_rows(c);
  permutation_equivariance(c);
  masked_insensitivity(c);
  gpc_uniform(c);
  stpr_zero(c);
  ranking_oracle(c);
  return {c.ok(), c.ok() ? "attention, equivariance, masking, ln C, STPR zero, rank order, "
                           "oracle on 20 instances"
                         : c.summary()};
}

// ---- 4: desk-scale end-to-end ---------------------------------------------

std::pair<bool, std::string> desk_scale() {
  const auto start = Clock::now();
  const auto ds = desk_dataset(1);
  trainer::Trainer t(desk_config(), ds);
  const auto log = t.train();
  const double elapsed = seconds_since(start);
  if (log.empty() || !log.back().metrics) return {false, "no final evaluation"};
  const auto m = *log.back().metrics;
  const bool ok = m.rank1 >= 0.90 && m.mean_ap >= 0.60 && elapsed < 600.0;
  return {ok, std::to_string(log.size()) + " epochs: R1 " + fmt(100 * m.rank1) + "%, mAP " +
                  fmt(100 * m.mean_ap) + "%, " + fmt(elapsed) + " s"};
}

// ---- 5: ablation direction (diagnostic) -----------------------------------

constexpr std::size_t kAblationEpochs = 150;

std::pair<bool, std::string> ablation_direction() {
  int holds = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto cfg = desk_config();
    cfg.epochs = kAblationEpochs;
    cfg.seed = seed;
    const auto rows = trainer::train_ablation_suite(cfg, desk_dataset(seed));
    auto r1 = [&](TrainMode mode) {
      for (const auto& r : rows)
        if (r.mode == mode) return r.metrics.rank1;
      return -1.0;
    };
    const bool order = r1(TrainMode::sgt_gpc_stpr) >= r1(TrainMode::sgt_gpc) &&
                       r1(TrainMode::sgt_gpc) >= r1(TrainMode::pc) &&
                       r1(TrainMode::pc) >= r1(TrainMode::baseline);
    holds += order;
    detail += (detail.empty() ? "" : " | ") + std::string("seed ") + std::to_string(seed) + ":";
    for (const auto& r : rows) detail += " " + std::string(mode_name(r.mode)) + "=" + fmt(100 * r.metrics.rank1);
  }
  return {holds >= 2, "ordering held in " + std::to_string(holds) + "/3 seeds (" +
                          std::to_string(kAblationEpochs) + " epochs, R1 %) " + detail};
}

// ---- 6: determinism and resume --------------------------------------------

trainer::TrainConfig small_desk_config() {
  auto c = desk_config();
  c.model.d = 16;
  c.model.heads = 2;
  c.model.head_dim = 8;
  c.eval_every = 0;
  return c;
}

std::pair<bool, std::string> determinism_and_resume() {
  Checks c;
  const auto ds = desk_dataset(4);
  const auto cfg = small_desk_config();
  trainer::Trainer a(cfg, ds), b(cfg, ds);
  std::vector<double> la, lb;
  for (int i = 0; i < 10; ++i) {
    la.push_back(a.step().losses.total);
    lb.push_back(b.step().losses.total);
  }
  c.expect(la == lb, "10-step loss logs differ between identical runs");

  const auto dir = std::filesystem::temp_directory_path() / "transg_acceptance_resume";
  std::filesystem::remove_all(dir);
  trainer::Trainer first(cfg, ds);
  for (int i = 0; i < 5; ++i) first.step();
  trainer::save_checkpoint(dir, first.checkpoint());
  trainer::Trainer resumed(trainer::load_checkpoint(dir), ds);
  double worst = 0;
  for (int i = 5; i < 10; ++i) {
    const double got = resumed.step().losses.total;
    worst = std::max(worst, std::abs(got - la[i]) / std::abs(la[i]));
  }
  std::filesystem::remove_all(dir);
  c.expect(worst <= 1e-6, "resume relative error " + fmt(worst));
  return {c.ok(), c.ok() ? "bitwise-identical 10-step logs, resume max rel error " + fmt(worst)
                         : c.summary()};
}

// ---- 7: unsupervised mode -------------------------------------------------

// Core points connected through eps-neighborhoods form clusters (numbered by
// lowest core index); border points take the lowest reachable cluster id.
std::vector<int> reference_dbscan(const std::vector<double>& p, std::size_t n, std::size_t d,
                                  double eps, std::size_t min_pts, std::vector<bool>& core) {
  auto near = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += std::pow(p[a * d + k] - p[b * d + k], 2);
    return std::sqrt(s) <= eps;
  };
  core.assign(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t cnt = 0;
    for (std::size_t b = 0; b < n; ++b) cnt += near(a, b);
    core[a] = cnt >= min_pts;
  }
  std::vector<int> label(n, trainer::kNoise);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || label[s] != trainer::kNoise) continue;
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (core[v] && label[v] == trainer::kNoise && near(u, v)) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t k = 0; k < n; ++k)
      if (core[k] && near(i, k) && (label[i] == trainer::kNoise || label[k] < label[i])) label[i] = label[k];
  }
  return label;
}

std::pair<bool, std::string> unsupervised_mode() {
  Checks c;
  std::size_t clusters_seen = 0;
  for (int fixture = 0; fixture < 10; ++fixture) {
    SeededRng rng(500 + fixture);
    const std::size_t n = 30 + rng.uniform_index(70), d = 2 + rng.uniform_index(3);
    std::vector<double> p(n * d);
    // Mixture of a few blobs and uniform clutter.
    const std::size_t blobs = 2 + rng.uniform_index(3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < d; ++k)
        p[i * d + k] = i % 4 == 3 ? rng.uniform(-5, 5) : 3.0 * double(i % blobs) + 0.3 * rng.normal();
    const double eps = rng.uniform(0.3, 0.9);
    const std::size_t min_pts = 2 + rng.uniform_index(4);
    std::vector<bool> core;
    const auto want = reference_dbscan(p, n, d, eps, min_pts, core);
    const auto got = trainer::dbscan(p, n, d, eps, min_pts);
    // Border points may legitimately join any adjacent cluster; compare
    // cores exactly and border noise status.
    for (std::size_t i = 0; i < n; ++i) {
      const bool same = core[i] ? got[i] == want[i] : (got[i] == trainer::kNoise) == (want[i] == trainer::kNoise);
      c.expect(same, "fixture " + std::to_string(fixture) + " point " + std::to_string(i));
    }
    clusters_seen += std::size_t(*std::max_element(want.begin(), want.end()) + 1);
  }

  auto ds = desk_dataset(5);
  auto cfg = small_desk_config();
  cfg.mode = TrainMode::unsupervised;
  cfg.epochs = 3;
  cfg.batch_size = 32;
  cfg.dbscan_eps = 0.1;  // the default 0.6 merges the untrained encoder's reps into one cluster
  auto permuted = ds;
  SeededRng rng(77);
  for (auto& s : permuted.train) s.identity = int(rng.uniform_index(10));
  trainer::Trainer a(cfg, ds), b(cfg, permuted);
  const auto la = a.train(), lb = b.train();
  bool same = la.size() == lb.size();
  for (std::size_t e = 0; same && e < la.size(); ++e)
    same = la[e].losses.total == lb[e].losses.total && la[e].losses.gpc_seq == lb[e].losses.gpc_seq;
  c.expect(same, "unsupervised loss log depends on ground-truth labels");
  std::size_t gpc_steps = 0;
  for (const auto& r : la) gpc_steps += r.steps - r.gpc_skipped_steps;
  c.expect(gpc_steps > 0, "GPC never ran on pseudo-labels");
  return {c.ok(), c.ok() ? "DBSCAN matches reference on 10 fixtures (" + std::to_string(clusters_seen) +
                               " clusters), label-permuted run identical over " +
                               std::to_string(la.size()) + " epochs (" + std::to_string(gpc_steps) +
                               " GPC steps)"
                         : c.summary()};
}

}  // namespace

// Optional arguments select criteria by number; all run by default.
int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<std::pair<bool, std::string>()> run;
    bool gating;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient fidelity", gradient_fidelity, true},
      {2, "spectral correctness", spectral_correctness, true},
      {3, "structural invariants", structural_invariants, true},
      {4, "desk-scale end-to-end", desk_scale, true},
      {5, "ablation direction (diagnostic)", ablation_direction, false},
      {6, "determinism and resume", determinism_and_resume, true},
      {7, "unsupervised mode", unsupervised_mode, true},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    std::pair<bool, std::string> result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const char* verdict = result.first ? "PASS" : (c.gating ? "FAIL" : "SOFT-FAIL");
    std::cout << "[" << verdict << "] " << c.id << " " << c.name << ": " << result.second << std::endl;
    if (c.gating && !result.first) all = false;
  }
  std::cout << (all ? "acceptance: all gating criteria pass" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}
