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

#include "amenet/records.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace amenet {

using nlohmann::ordered_json;

namespace {

std::string interaction_name(InteractionSource s) {
  switch (s) {
    case InteractionSource::kNone: return "none";
    case InteractionSource::kOccupancy: return "occupancy";
    case InteractionSource::kDynamic: return "dynamic";
  }
  return "?";
}

InteractionSource parse_interaction(const std::string& v) {
  if (v == "none") return InteractionSource::kNone;
  if (v == "occupancy") return InteractionSource::kOccupancy;
  if (v == "dynamic") return InteractionSource::kDynamic;
  throw std::invalid_argument("interaction must be none, occupancy or dynamic, got '" + v + "'");
}

}  // namespace

KeyValues to_key_values(const ModelConfig& c) {
  KeyValues kv;
  kv["variant"] = to_string(c.variant);
  kv["interaction"] = interaction_name(c.interaction);
  kv["attention"] = c.attention ? "true" : "false";
  kv["y_maps"] = c.y_maps ? "true" : "false";
  kv["obs_len"] = std::to_string(c.obs_len);
  kv["pred_len"] = std::to_string(c.pred_len);
  kv["z_dim"] = std::to_string(c.z_dim);
  kv["hidden"] = std::to_string(c.hidden);
  kv["fusion_dim"] = std::to_string(c.fusion_dim);
  kv["conv1d_filters"] = std::to_string(c.conv1d_filters);
  kv["conv1d_width"] = std::to_string(c.conv1d_width);
  kv["conv2d_filters"] = std::to_string(c.conv2d_filters);
  kv["conv2d_kernel"] = std::to_string(c.conv2d_kernel);
  kv["pool"] = std::to_string(c.pool);
  kv["d_q"] = std::to_string(c.d_q);
  kv["d_k"] = std::to_string(c.d_k);
  kv["d_v"] = std::to_string(c.d_v);
  kv["heads"] = std::to_string(c.heads);
  kv["beta"] = format_number(c.beta);
  kv["lr"] = format_number(c.lr);
  kv["batch"] = std::to_string(c.batch);
  kv["loss_space"] = to_string(c.loss_space);
  kv["map_extent"] = format_number(c.map.extent_m);
  kv["map_cell"] = format_number(c.map.cell_m);
  kv["position_layer"] = c.map.position_layer == maps::PositionLayer::kBinary ? "binary" : "density";
  return kv;
}

bool apply_model_key(ModelConfig& c, const std::string& k, const std::string& v) {
  if (k == "variant") {
    const ModelConfig fresh = make_variant(v);
    c.variant = fresh.variant;
    c.interaction = fresh.interaction;
    c.attention = fresh.attention;
    c.y_maps = fresh.y_maps;
  } else if (k == "interaction") {
    c.interaction = parse_interaction(v);
  } else if (k == "attention") {
    c.attention = parse_bool(k, v);
  } else if (k == "y_maps") {
    c.y_maps = parse_bool(k, v);
  } else if (k == "obs_len") {
    c.obs_len = parse_int(k, v);
  } else if (k == "pred_len") {
    c.pred_len = parse_int(k, v);
  } else if (k == "z_dim") {
    c.z_dim = parse_int(k, v);
  } else if (k == "hidden") {
    c.hidden = parse_int(k, v);
  } else if (k == "fusion_dim") {
    c.fusion_dim = parse_int(k, v);
  } else if (k == "conv1d_filters") {
    c.conv1d_filters = parse_int(k, v);
  } else if (k == "conv1d_width") {
    c.conv1d_width = parse_int(k, v);
  } else if (k == "conv2d_filters") {
    c.conv2d_filters = parse_int(k, v);
  } else if (k == "conv2d_kernel") {
    c.conv2d_kernel = parse_int(k, v);
  } else if (k == "pool") {
    c.pool = parse_int(k, v);
  } else if (k == "d_q") {
    c.d_q = parse_int(k, v);
  } else if (k == "d_k") {
    c.d_k = parse_int(k, v);
  } else if (k == "d_v") {
    c.d_v = parse_int(k, v);
  } else if (k == "heads") {
    c.heads = parse_int(k, v);
  } else if (k == "beta") {
    c.beta = parse_number(k, v);
  } else if (k == "lr") {
    c.lr = parse_number(k, v);
  } else if (k == "batch") {
    c.batch = parse_int(k, v);
  } else if (k == "loss_space") {
    c.loss_space = parse_loss_space(v);
  } else if (k == "map_extent") {
    c.map.extent_m = parse_number(k, v);
  } else if (k == "map_cell") {
    c.map.cell_m = parse_number(k, v);
  } else if (k == "position_layer") {
    if (v == "binary") {
      c.map.position_layer = maps::PositionLayer::kBinary;
    } else if (v == "density") {
      c.map.position_layer = maps::PositionLayer::kDensity;
    } else {
      throw std::invalid_argument("position_layer must be binary or density, got '" + v + "'");
    }
  } else {
    return false;
  }
  return true;
}

ModelConfig model_config_from(const KeyValues& kv) {
  ModelConfig c = make_variant(Variant::kAMENet);
  if (auto it = kv.find("variant"); it != kv.end()) apply_model_key(c, "variant", it->second);
  for (const auto& [k, v] : kv) {
    if (k != "variant") apply_model_key(c, k, v);
  }
  return c;
}

std::string format_checkpoint(const Amenet& model) {
  ordered_json j;
  j["format"] = "amenet-checkpoint";
  j["version"] = kCheckpointVersion;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : to_key_values(model.config())) cfg[k] = v;
  j["config"] = cfg;
  ordered_json params = ordered_json::array();
  for (const auto& [name, var] : model.params().entries()) {
    const nn::Matrix& m = var.value();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    ordered_json p;
    p["name"] = name;
    p["rows"] = m.rows();
    p["cols"] = m.cols();
    p["data"] = std::move(data);
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

std::unique_ptr<Amenet> parse_checkpoint(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "amenet-checkpoint") {
    throw std::runtime_error("not an amenet checkpoint");
  }
  if (j.value("version", 0) != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + j["version"].dump());
  }
  KeyValues kv;
  for (const auto& [k, v] : j.at("config").items()) kv[k] = v.get<std::string>();
  auto model = std::make_unique<Amenet>(model_config_from(kv), 0);
  nn::ParamStore loaded;
  for (const auto& p : j.at("params")) {
    const auto rows = p.at("rows").get<Eigen::Index>();
    const auto cols = p.at("cols").get<Eigen::Index>();
    const auto data = p.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw std::runtime_error("parameter '" + p.at("name").get<std::string>() +
                               "' has the wrong number of values");
    }
    nn::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    }
    loaded.insert(p.at("name").get<std::string>(), std::move(m));
  }
  if (loaded.size() != model->params().size()) {
    throw std::runtime_error("checkpoint has " + std::to_string(loaded.size()) +
                             " parameters, the configured model " +
                             std::to_string(model->params().size()));
  }
  try {
    model->params().assign(loaded);
  } catch (const std::out_of_range& e) {
    throw std::runtime_error(std::string("checkpoint does not match its config: ") + e.what());
  }
  model->params().check_finite();
  return model;
}

void save_checkpoint(const Amenet& model, const std::filesystem::path& path) {
  write_file(path, format_checkpoint(model));
}

std::unique_ptr<Amenet> load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

std::string format_predictions(std::span<const PredictionSet> sets, const RankOptions& rank_opts) {
  std::string out;
  for (const auto& set : sets) {
    const Ranking r = rank(set, rank_opts);
    for (std::size_t s = 0; s < set.samples.size(); ++s) {
      ordered_json j;
      j["window"] = set.window;
      j["scene"] = set.scene;
      j["target"] = set.target;
      j["start_frame"] = set.start_frame;
      j["sample"] = s;
      ordered_json xy = ordered_json::array();
      for (const auto& p : set.samples[s]) xy.push_back({p.x, p.y});
      j["xy"] = std::move(xy);
      std::vector<double> z;
      if (s < set.z.size()) z.assign(set.z[s].data(), set.z[s].data() + set.z[s].size());
      j["z"] = z;
      j["score"] = r.scored ? ordered_json(r.scores[s]) : ordered_json(nullptr);
      j["most_likely"] = s == r.most_likely;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::map<std::string, PredictionSet> parse_predictions(std::string_view text) {
  std::map<std::string, PredictionSet> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = ordered_json::parse(line);
      const auto id = j.at("window").get<std::string>();
      PredictionSet& set = out[id];
      set.window = id;
      set.scene = j.value("scene", "");
      set.target = j.value("target", AgentId{0});
      set.start_frame = j.value("start_frame", std::int64_t{0});
      const auto sample = j.at("sample").get<std::size_t>();
      if (sample != set.samples.size()) {
        throw std::runtime_error("sample indices of window '" + id + "' are not consecutive");
      }
      std::vector<Vec2> path;
      for (const auto& p : j.at("xy")) path.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      if (!set.samples.empty() && path.size() != set.samples[0].size()) {
        throw std::runtime_error("samples of window '" + id + "' differ in length");
      }
      set.samples.push_back(std::move(path));
      const auto z = j.value("z", std::vector<double>{});
      set.z.push_back(Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad prediction record: ") + e.what(), line_no);
    } catch (const std::runtime_error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

std::string format_loss_history(std::span<const LossRecord> history) {
  std::string out = "step,loss,mse,kl\n";
  for (const auto& r : history) {
    out += std::to_string(r.step) + ',' + format_number(r.loss) + ',' + format_number(r.mse) + ',' +
           format_number(r.kl) + '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace amenet
