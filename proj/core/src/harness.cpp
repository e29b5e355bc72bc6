// Copyright 2026 The amenet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amenet/harness.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include "amenet/records.hpp"
#include "amenet/synth.hpp"
#include "json.hpp"

namespace amenet {

namespace fs = std::filesystem;

namespace {

// Keys that only take effect when set explicitly, because the variant picks
// their defaults.
const std::set<std::string> kVariantFlags = {"interaction", "attention", "y_maps"};

std::uint64_t derive(std::uint64_t seed, const char* stream) { return window_seed(seed, stream); }

void append_run_log(const fs::path& out_dir, const std::string& line) {
  fs::create_directories(out_dir);
  std::ofstream f(out_dir / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  f << stamp << ' ' << line << '\n';
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string file_safe(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    if (c == '/' || c == '\\' || c == ':' || c == ' ' || c == '#') c = '_';
  }
  return s;
}

}  // namespace

KeyValues default_settings() {
  KeyValues kv = to_key_values(make_variant(Variant::kAMENet));
  for (const auto& k : kVariantFlags) kv.erase(k);
  kv.merge(KeyValues{
      {"seed", "0"},
      {"data", ""},
      {"test_data", ""},
      {"test_fraction", "0.2"},
      {"split_mode", "window"},
      {"split_seed", ""},
      {"downsample", "1"},
      {"stride", "1"},
      {"rotate_augment", "0"},
      {"steps", "2000"},
      {"samples", "10"},
      {"checkpoint", ""},
      {"predictions", ""},
      {"predictor", "model"},
      {"strict", "false"},
      {"collision_threshold", "0.1"},
      {"substeps", "1"},
      {"collision_mode", "most_likely"},
      {"collision_on", "predicted"},
      {"rank_mode", "density"},
      {"sigma_floor", "1e-06"},
      {"rho_clamp", "0.999"},
      {"linearity_threshold", "0.1"},
      {"variants", "ENet,OENet,AOENet,MENet,ACVAE,AMENet"},
      {"plot_limit", "20"},
      {"plot_windows", ""},
      {"spec", ""},
  });
  return kv;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing setting '" + key + "'");
  return it->second;
}

bool RunConfig::has(const std::string& key) const {
  auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

int RunConfig::get_int(const std::string& key) const { return parse_int(key, get(key)); }
double RunConfig::get_number(const std::string& key) const { return parse_number(key, get(key)); }
bool RunConfig::get_bool(const std::string& key) const { return parse_bool(key, get(key)); }

std::uint64_t RunConfig::seed() const {
  const std::string& v = get("seed");
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ConfigError("seed must be a non-negative integer, got '" + v + "'");
  }
}

ModelConfig RunConfig::model() const {
  ModelConfig c = model_config_from(values);
  c.obs_len = get_int("obs_len");
  c.pred_len = get_int("pred_len");
  return c;
}

WindowOptions RunConfig::windows() const {
  return {get_int("obs_len"), get_int("pred_len"), get_int("stride")};
}

EvalOptions RunConfig::eval() const {
  EvalOptions o;
  o.collision_threshold = get_number("collision_threshold");
  o.substeps = get_int("substeps");
  const auto& mode = get("collision_mode");
  if (mode == "most_likely") {
    o.collision_mode = CollisionMode::kMostLikely;
  } else if (mode == "per_sample") {
    o.collision_mode = CollisionMode::kPerSample;
  } else {
    throw ConfigError("collision_mode must be most_likely or per_sample");
  }
  const auto& on = get("collision_on");
  if (on == "predicted") {
    o.collision_partner = CollisionPartner::kPredicted;
  } else if (on == "ground_truth") {
    o.collision_partner = CollisionPartner::kGroundTruth;
  } else {
    throw ConfigError("collision_on must be predicted or ground_truth");
  }
  const auto& rm = get("rank_mode");
  if (rm == "density") {
    o.rank.mode = ScoreMode::kDensitySum;
  } else if (rm == "log_density") {
    o.rank.mode = ScoreMode::kLogDensitySum;
  } else {
    throw ConfigError("rank_mode must be density or log_density");
  }
  o.rank.sigma_floor = get_number("sigma_floor");
  o.rank.rho_clamp = get_number("rho_clamp");
  o.linearity_threshold = get_number("linearity_threshold");
  return o;
}

RunConfig resolve_config(const std::string& command, const std::optional<fs::path>& config_file,
                         const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  static const std::set<std::string> kCommands = {"train", "predict", "eval", "ablate", "plot", "synth"};
  if (!kCommands.contains(command)) throw ConfigError("unknown command '" + command + "'");
  RunConfig rc;
  rc.command = command;
  rc.out_dir = out_dir;
  rc.values = default_settings();
  auto set = [&](const std::string& k, const std::string& v) {
    if (!rc.values.contains(k) && !kVariantFlags.contains(k)) {
      throw ConfigError("unknown setting '" + k + "'");
    }
    rc.values[k] = v;
  };
  try {
    if (config_file) {
      if (!fs::exists(*config_file)) throw ConfigError("config file not found: " + config_file->string());
      for (const auto& [k, v] : parse_key_values(read_file(*config_file))) set(k, v);
    }
    for (const auto& o : overrides) {
      auto [k, v] = parse_assignment(o);
      set(k, v);
    }
    if (seed) rc.values["seed"] = std::to_string(*seed);

    rc.seed();
    const ModelConfig mc = rc.model();
    mc.validate();
    rc.eval();
    const int horizon = rc.get_int("pred_len");
    if (std::find(std::begin(kSupportedHorizons), std::end(kSupportedHorizons), horizon) ==
        std::end(kSupportedHorizons)) {
      throw ConfigError("pred_len must be one of 12, 16, 20, 24, 28, 32; got " + std::to_string(horizon));
    }
    if (rc.get_int("stride") < 1) throw ConfigError("stride must be >= 1");
    if (rc.get_int("downsample") < 1) throw ConfigError("downsample must be >= 1");
    if (rc.get_int("samples") < 1) throw ConfigError("samples must be >= 1");
    if (rc.get_int("steps") < 0) throw ConfigError("steps must be >= 0");
    if (rc.get_int("rotate_augment") < 0) throw ConfigError("rotate_augment must be >= 0");
    const double tf = rc.get_number("test_fraction");
    if (!(tf >= 0.0 && tf <= 1.0)) throw ConfigError("test_fraction must lie in [0, 1]");
    const auto& sm = rc.get("split_mode");
    if (sm != "window" && sm != "scene") throw ConfigError("split_mode must be window or scene");
    const auto& pr = rc.get("predictor");
    if (pr != "model" && pr != "oracle" && pr != "constant") {
      throw ConfigError("predictor must be model, oracle or constant");
    }
    rc.get_bool("strict");
    for (const auto& v : split_list(rc.get("variants"))) parse_variant(v);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  auto require_paths = [&](const std::string& key) {
    if (!rc.has(key)) throw ConfigError(command + " needs '" + key + "'");
    for (const auto& p : split_list(rc.get(key))) {
      if (!fs::exists(p)) throw ConfigError(key + ": no such file: " + p);
    }
  };
  auto optional_paths = [&](const std::string& key) {
    if (rc.has(key)) require_paths(key);
  };
  if (command == "train" || command == "ablate") {
    require_paths("data");
    optional_paths("test_data");
  } else if (command == "predict") {
    require_paths("data");
    optional_paths("test_data");
    require_paths("checkpoint");
  } else if (command == "eval") {
    require_paths("data");
    optional_paths("test_data");
    const auto& pr = rc.get("predictor");
    if (pr == "model") {
      if (rc.has("predictions")) {
        require_paths("predictions");
      } else {
        require_paths("checkpoint");
      }
    }
  } else if (command == "plot") {
    require_paths("data");
    require_paths("predictions");
  } else if (command == "synth") {
    require_paths("spec");
  }
  return rc;
}

Scene load_scene(const fs::path& path) {
  if (path.extension() == ".spec") {
    Scene s = synth_scene(load_synth_spec(path)).scene;
    s.name = path.stem().string();
    return s;
  }
  Scene s = load_table(path);
  s.name = path.stem().string();
  return s;
}

namespace {

std::vector<Window> windows_from(const RunConfig& cfg, const std::string& key) {
  std::vector<Window> out;
  std::set<std::string> names;
  for (const auto& p : split_list(cfg.get(key))) {
    Scene s = load_scene(p);
    if (!names.insert(s.name).second) {
      throw ConfigError("two datasets share the scene name '" + s.name + "'");
    }
    const int factor = cfg.get_int("downsample");
    if (factor > 1) s = downsample(s, factor);
    auto w = make_windows(s, cfg.windows());
    out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return out;
}

std::uint64_t split_seed(const RunConfig& cfg) {
  if (!cfg.has("split_seed")) return derive(cfg.seed(), "split");
  RunConfig tmp;
  tmp.values["seed"] = cfg.get("split_seed");
  return tmp.seed();
}

}  // namespace

Dataset load_dataset(const RunConfig& cfg) {
  Dataset d;
  std::vector<Window> all = windows_from(cfg, "data");
  if (cfg.has("test_data")) {
    d.train = std::move(all);
    d.test = windows_from(cfg, "test_data");
  } else {
    const SplitMode mode = cfg.get("split_mode") == "scene" ? SplitMode::kScene : SplitMode::kWindow;
    Split s = split_windows(all, cfg.get_number("test_fraction"), split_seed(cfg), mode);
    d.train = std::move(s.train);
    d.test = std::move(s.test);
  }
  const int copies = cfg.get_int("rotate_augment");
  if (copies > 0) {
    std::mt19937_64 rng(derive(cfg.seed(), "augment"));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const std::size_t base = d.train.size();
    for (int k = 1; k <= copies; ++k) {
      for (std::size_t i = 0; i < base; ++i) {
        Window w = rotate_window(d.train[i], angle(rng));
        w.id += "#rot" + std::to_string(k);
        d.train.push_back(std::move(w));
      }
    }
  }
  return d;
}

namespace {

std::vector<WindowFeatures> train_features(std::span<const Window> ws, const ModelConfig& mc,
                                           MapCache& cache) {
  std::vector<WindowFeatures> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(training_features(w, mc, &cache));
  return out;
}

std::vector<PredictionSet> predict_all(const Amenet& model, std::span<const Window> ws, int n,
                                       std::uint64_t seed, MapCache& cache) {
  std::vector<PredictionSet> out;
  out.reserve(ws.size());
  for (const auto& w : ws) {
    out.push_back(sample_predictions(model, observed_features(w.observed(), model.config(), &cache), n,
                                     seed));
  }
  return out;
}

std::map<std::string, PredictionSet> by_window(std::vector<PredictionSet> sets) {
  std::map<std::string, PredictionSet> m;
  for (auto& s : sets) {
    std::string id = s.window;
    m.emplace(std::move(id), std::move(s));
  }
  return m;
}

/// Predictors that need no model: the ground truth, or standing still at
/// the last observed position.
std::map<std::string, PredictionSet> reference_predictions(std::span<const Window> ws, bool oracle,
                                                           int n) {
  std::map<std::string, PredictionSet> m;
  for (const auto& w : ws) {
    PredictionSet p;
    p.window = w.id;
    p.scene = w.scene;
    p.target = w.target;
    p.start_frame = w.start_frame;
    const std::vector<Vec2> path =
        oracle ? w.fut : std::vector<Vec2>(w.fut.size(), w.obs.back());
    for (int s = 0; s < n; ++s) {
      p.samples.push_back(path);
      p.z.emplace_back();
    }
    m.emplace(w.id, std::move(p));
  }
  return m;
}

void check_model_matches(const RunConfig& cfg, const Amenet& model) {
  if (model.config().obs_len != cfg.get_int("obs_len") ||
      model.config().pred_len != cfg.get_int("pred_len")) {
    throw ConfigError("checkpoint was trained for obs_len=" + std::to_string(model.config().obs_len) +
                      ", pred_len=" + std::to_string(model.config().pred_len) +
                      "; the run asks for different window lengths");
  }
}

struct TrainedModel {
  std::unique_ptr<Amenet> model;
  TrainResult result;
};

TrainedModel fit(const ModelConfig& mc, std::span<const Window> train, const RunConfig& cfg,
                 MapCache& cache, std::ostream& log) {
  if (train.empty()) throw ConfigError("no training windows (dataset too short for the window length?)");
  const auto features = train_features(train, mc, cache);
  TrainedModel t{std::make_unique<Amenet>(mc, derive(cfg.seed(), "init")), {}};
  TrainOptions opts;
  opts.steps = cfg.get_int("steps");
  opts.seed = derive(cfg.seed(), "train");
  const long every = std::max(1, opts.steps / 10);
  opts.on_step = [&](long step, double loss) {
    if (step % every == 0) log << "  step " << step << " loss " << loss << '\n';
    return true;
  };
  t.result = amenet::train(*t.model, features, opts);
  return t;
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(cfg);
  const ModelConfig mc = cfg.model();
  MapCache cache(mc.map);
  log << "training " << to_string(mc.variant) << " on " << d.train.size() << " windows\n";
  TrainedModel t = fit(mc, d.train, cfg, cache, log);
  save_checkpoint(*t.model, cfg.out_dir / "checkpoint.json");
  write_file(cfg.out_dir / "loss_history.csv", format_loss_history(t.result.history));
  write_file(cfg.out_dir / "epoch_history.csv", format_loss_history(t.result.epochs));

  const auto features = train_features(d.train, mc, cache);
  nlohmann::ordered_json j;
  j["variant"] = to_string(mc.variant);
  j["train_windows"] = d.train.size();
  j["test_windows"] = d.test.size();
  j["steps"] = t.result.history.size();
  if (!t.result.history.empty()) {
    j["final_loss"] = t.result.history.back().loss;
    j["final_mse"] = t.result.history.back().mse;
    j["final_kl"] = t.result.history.back().kl;
  }
  j["train_ade_prior_mean"] = prior_mean_ade(*t.model, features);
  write_file(cfg.out_dir / "train_summary.json", j.dump(2) + "\n");
  log << "training ADE (z = 0): " << j["train_ade_prior_mean"].get<double>() << " m\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(cfg);
  auto model = load_checkpoint(cfg.get("checkpoint"));
  check_model_matches(cfg, *model);
  MapCache cache(model->config().map);
  const auto sets = predict_all(*model, d.test, cfg.get_int("samples"), derive(cfg.seed(), "sample"), cache);
  write_file(cfg.out_dir / "predictions.jsonl", format_predictions(sets, cfg.eval().rank));
  log << "wrote " << sets.size() << " windows x " << cfg.get_int("samples") << " samples\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(cfg);
  const int n = cfg.get_int("samples");
  std::map<std::string, PredictionSet> preds;
  const auto& predictor = cfg.get("predictor");
  if (predictor != "model") {
    preds = reference_predictions(d.test, predictor == "oracle", n);
  } else if (cfg.has("predictions")) {
    preds = parse_predictions(read_file(cfg.get("predictions")));
  } else {
    auto model = load_checkpoint(cfg.get("checkpoint"));
    check_model_matches(cfg, *model);
    MapCache cache(model->config().map);
    preds = by_window(predict_all(*model, d.test, n, derive(cfg.seed(), "sample"), cache));
  }
  const MetricsReport report = evaluate(d.test, preds, cfg.eval());
  write_file(cfg.out_dir / "metrics.json", format_report(report));
  log << "evaluated " << report.overall.window_count << " windows: ADE " << report.overall.ade_most_likely
      << " / FDE " << report.overall.fde_most_likely << " (most likely), ADE "
      << report.overall.ade_top10 << " / FDE " << report.overall.fde_top10 << " (top@" << n << ")\n";
  if (!report.missing.empty()) {
    log << report.missing.size() << " test windows have no predictions\n";
    if (cfg.get_bool("strict")) {
      throw StrictEvalError(std::to_string(report.missing.size()) +
                            " windows missing predictions (first: " + report.missing.front() + ")");
    }
  }
  return kExitOk;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::string out =
      "| variant | windows | ADE most-likely | FDE most-likely | ADE top@10 | FDE top@10 | collisions |\n"
      "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + to_string(r.variant) + " | ";
    if (!r.ok) {
      out += "failed: " + r.error + " | | | | | |\n";
      continue;
    }
    const Aggregate& a = r.metrics;
    out += std::to_string(a.window_count) + " | " + fixed4(a.ade_most_likely) + " | " +
           fixed4(a.fde_most_likely) + " | " + fixed4(a.ade_top10) + " | " + fixed4(a.fde_top10) +
           " | " + std::to_string(a.collision_count) + " |\n";
  }
  return out;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& log) {
  const Dataset d = load_dataset(cfg);
  if (d.test.empty()) throw ConfigError("ablation needs test windows");
  const ModelConfig base = cfg.model();
  // One cache for all variants: map-using variants read the very same grids.
  MapCache cache(base.map);
  std::vector<AblationRow> rows;
  std::string csv = "variant,ok,windows,ade_most_likely,fde_most_likely,ade_top10,fde_top10,collisions\n";
  bool all_ok = true;
  for (const auto& name : split_list(cfg.get("variants"))) {
    AblationRow row;
    row.variant = parse_variant(name);
    ModelConfig mc = base;
    apply_model_key(mc, "variant", name);
    log << "variant " << name << '\n';
    try {
      TrainedModel t = fit(mc, d.train, cfg, cache, log);
      const fs::path dir = cfg.out_dir / name;
      write_file(dir / "loss_history.csv", format_loss_history(t.result.history));
      const auto sets = predict_all(*t.model, d.test, cfg.get_int("samples"),
                                    derive(cfg.seed(), "sample"), cache);
      const MetricsReport report = evaluate(d.test, by_window(sets), cfg.eval());
      write_file(dir / "metrics.json", format_report(report));
      row.metrics = report.overall;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      all_ok = false;
      log << "variant " << name << " failed: " << e.what() << '\n';
    }
    const Aggregate& a = row.metrics;
    csv += name + ',' + (row.ok ? "true" : "false") + ',' + std::to_string(a.window_count) + ',' +
           format_number(a.ade_most_likely) + ',' + format_number(a.fde_most_likely) + ',' +
           format_number(a.ade_top10) + ',' + format_number(a.fde_top10) + ',' +
           std::to_string(a.collision_count) + '\n';
    rows.push_back(std::move(row));
  }
  const std::string table = format_ablation_table(rows);
  write_file(cfg.out_dir / "ablation.md", table);
  write_file(cfg.out_dir / "ablation.csv", csv);
  log << table;
  return all_ok ? kExitOk : kExitRuntime;
}

int cmd_plot(const RunConfig& cfg, std::ostream& log) {
  const auto preds = parse_predictions(read_file(cfg.get("predictions")));
  if (preds.empty()) {
    log << "warning: no predictions to plot\n";
    return kExitOk;
  }
  std::map<std::string, Window> windows;
  for (auto& w : windows_from(cfg, "data")) {
    std::string id = w.id;
    windows.emplace(std::move(id), std::move(w));
  }
  std::vector<std::string> chosen;
  if (cfg.has("plot_windows")) {
    chosen = split_list(cfg.get("plot_windows"));
  } else {
    const auto limit = static_cast<std::size_t>(std::max(0, cfg.get_int("plot_limit")));
    for (const auto& [id, set] : preds) {
      if (chosen.size() >= limit) break;
      if (windows.contains(id)) chosen.push_back(id);
    }
  }
  const RankOptions ro = cfg.eval().rank;
  int written = 0;
  for (const auto& id : chosen) {
    auto pw = preds.find(id);
    auto ww = windows.find(id);
    if (pw == preds.end() || ww == windows.end()) {
      log << "warning: window '" << id << "' not found, skipped\n";
      continue;
    }
    const Ranking r = rank(pw->second, ro);
    write_file(cfg.out_dir / (file_safe(id) + ".svg"), render_svg(ww->second, pw->second, r.most_likely));
    ++written;
  }
  log << "wrote " << written << " plots\n";
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& log) {
  const fs::path spec_path = cfg.get("spec");
  const SynthResult r = synth_scene(load_synth_spec(spec_path));
  const std::string stem = spec_path.stem().string();
  write_file(cfg.out_dir / (stem + ".txt"), format_table(r.scene));

  nlohmann::ordered_json j;
  j["scene"] = stem;
  j["kind"] = to_string(load_synth_spec(spec_path).kind);
  nlohmann::ordered_json forks = nlohmann::ordered_json::array();
  auto path_json = [](const std::vector<Vec2>& p) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& v : p) a.push_back({v.x, v.y});
    return a;
  };
  for (const auto& f : r.forks) {
    nlohmann::ordered_json e;
    e["agent"] = f.agent;
    e["took_left"] = f.took_left;
    e["first_frame"] = f.first_frame;
    e["left_future"] = path_json(f.left_future);
    e["right_future"] = path_json(f.right_future);
    forks.push_back(std::move(e));
  }
  j["forks"] = std::move(forks);
  nlohmann::ordered_json crossings = nlohmann::ordered_json::array();
  for (const auto& c : r.crossings) {
    nlohmann::ordered_json e;
    e["a"] = c.a;
    e["b"] = c.b;
    e["crossing_frame"] = c.crossing_frame;
    e["arrival_offset"] = c.arrival_offset;
    e["closest_time"] = c.closest_time;
    e["closest_distance"] = c.closest_distance;
    crossings.push_back(std::move(e));
  }
  j["crossings"] = std::move(crossings);
  write_file(cfg.out_dir / (stem + "_episodes.json"), j.dump(2) + "\n");

  std::size_t rows = 0;
  for (const auto& t : r.scene.trajectories) rows += t.points.size();
  log << "wrote " << rows << " rows for " << r.scene.trajectories.size() << " trajectories\n";
  return kExitOk;
}

int run_command(const RunConfig& cfg, std::ostream& log) {
  try {
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir / "resolved_config.txt",
               "# command=" + cfg.command + "\n" + format_key_values(cfg.values));
    append_run_log(cfg.out_dir, "start " + cfg.command);
    int code = kExitOk;
    if (cfg.command == "train") {
      code = cmd_train(cfg, log);
    } else if (cfg.command == "predict") {
      code = cmd_predict(cfg, log);
    } else if (cfg.command == "eval") {
      code = cmd_eval(cfg, log);
    } else if (cfg.command == "ablate") {
      code = cmd_ablate(cfg, log);
    } else if (cfg.command == "plot") {
      code = cmd_plot(cfg, log);
    } else if (cfg.command == "synth") {
      code = cmd_synth(cfg, log);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    append_run_log(cfg.out_dir, "end " + cfg.command + " exit " + std::to_string(code));
    return code;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StrictEvalError& e) {
    log << "strict evaluation failed: " << e.what() << '\n';
    return kExitStrict;
  } catch (const DivergenceError& e) {
    log << "training diverged: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace amenet
