// Copyright 2026 Softdec Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "softdec/analysis.h"
#include "softdec/dataset.h"
#include "softdec/decode.h"
#include "softdec/detectors.h"
#include "softdec/graph.h"
#include "softdec/layout.h"
#include "softdec/logging.h"
#include "softdec/pij.h"
#include "softdec/readout.h"
#include "softdec/rng.h"
#include "softdec/sim.h"

namespace {

using nlohmann::json;
using namespace softdec;

struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = json::parse(read_file(path));
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  return j;
}

// Flags beat the config file, which beats defaults.
template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const json& config, const char* key,
       const T& fallback) {
  if (opt != nullptr && opt->count() > 0) return flag_value;
  if (config.contains(key)) {
    try {
      return config.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::runtime_error(std::string("config: invalid value for field '") + key + "'");
    }
  }
  return fallback;
}

CodeLayout load_layout(const std::string& spec) {
  if (spec.empty() || spec == "surface13") return CodeLayout::surface13();
  return CodeLayout::from_json(read_file(spec));
}

NoiseParams load_noise(const std::string& path) {
  if (path.empty()) return NoiseParams::floor_defaults();
  return NoiseParams::from_json(read_file(path));
}

ModelSet load_models(const CodeLayout& layout, const std::string& models_path,
                     double separation) {
  if (!models_path.empty()) {
    return assemble_model_set(layout, models_from_json(read_file(models_path)));
  }
  return synthetic_model_set(layout, separation);
}

void require_iq(const ShotRecord& record, const CodeLayout& layout, bool soft) {
  bool ok = record.ancilla_iq.size() ==
                static_cast<size_t>(layout.num_ancillas()) * record.rounds &&
            record.final_iq.size() == static_cast<size_t>(layout.num_data());
  if (!ok) {
    throw std::runtime_error(soft ? "soft decoding requires IQ data"
                                  : "dataset records lack IQ data");
  }
}

// Runs fn(index) for indices [0, total) on `jobs` workers and hands results
// to sink in index order, independent of the worker count.
void ordered_parallel(int64_t total, int jobs, const std::function<std::string(int64_t)>& fn,
                      const std::function<void(const std::string&)>& sink) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || total < 128) {
    for (int64_t i = 0; i < total; ++i) sink(fn(i));
    return;
  }
  const int64_t chunk = 128;
  const int64_t num_chunks = (total + chunk - 1) / chunk;
  std::vector<std::vector<std::string>> results(num_chunks);
  std::vector<uint8_t> done(num_chunks, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      int64_t c = next.fetch_add(1);
      if (c >= num_chunks) return;
      std::vector<std::string> block;
      for (int64_t i = c * chunk; i < std::min(total, (c + 1) * chunk); ++i) {
        block.push_back(fn(i));
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        results[c] = std::move(block);
        done[c] = 1;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (int64_t c = 0; c < num_chunks; ++c) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return done[c] != 0; });
    std::vector<std::string> block = std::move(results[c]);
    lock.unlock();
    for (const auto& s : block) sink(s);
  }
  for (auto& t : pool) t.join();
}

int logical_parity(const CodeLayout& layout, uint16_t state) {
  int parity = 0;
  for (int q : layout.logical_support) parity ^= (state >> q) & 1;
  return parity;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string input;
  std::string out;
  int states = 2;
  std::string model = "gaussian";
};

int run_calibrate(const CalibrateArgs& args) {
  std::vector<CalibrationSet> sets = load_calibration_json(read_file(args.input));
  if (sets.empty()) throw std::runtime_error("calibration file contains no qubits");
  FitOptions options;
  if (args.model == "histogram") options.backend = FitOptions::Backend::kHistogram;

  std::vector<ReadoutModel> models;
  for (const auto& set : sets) {
    try {
      ReadoutModel model;
      if (args.states == 3) {
        model = fit_three_state(set.per_state[0], set.per_state[1], set.per_state[2], options);
      } else if (args.model == "ampdamp") {
        model = fit_two_state(set.per_state[0], set.per_state[1]);
        model.amp_damp = fit_amplitude_damping(set.per_state[0], set.per_state[1], options);
      } else {
        model = fit_two_state(set.per_state[0], set.per_state[1], options);
      }
      model.qubit_id = set.qubit_id;
      models.push_back(std::move(model));
    } catch (const std::invalid_argument&) {
      throw;  // bad input shapes are schema errors, not fit failures
    } catch (const std::exception& e) {
      throw FitFailure("fit failed for qubit " + set.qubit_id + ": " + e.what());
    }
  }
  write_file(args.out, models_to_json(models));
  log_info("wrote " + std::to_string(models.size()) + " models to " + args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const json& config, const CLI::App* cmd, uint64_t seed,
                 const std::vector<int>& rounds, int shots, std::string out_dir,
                 std::string format, int jobs, const std::string& noise_path,
                 std::string models_path, double separation, double p_leak, double p_seep) {
  if (cmd->get_option("--seed")->count() == 0 && !config.contains("seed")) {
    throw std::runtime_error("config: missing required field 'seed' (mandatory for simulate)");
  }
  SimConfig sim;
  sim.seed = pick(cmd->get_option("--seed"), seed, config, "seed", uint64_t{0});
  sim.rounds = pick(cmd->get_option("--rounds"), rounds, config, "rounds", sim.rounds);
  sim.shots_per_state_round = pick(cmd->get_option("--shots"), shots, config, "shots", 1000);
  sim.noise = load_noise(
      pick(cmd->get_option("--noise"), noise_path, config, "noise_params", std::string{}));
  sim.leakage.p_leak = pick(cmd->get_option("--leak"), p_leak, config, "p_leak", 0.0);
  sim.leakage.p_seep = pick(cmd->get_option("--seep"), p_seep, config, "p_seep", 0.25);
  out_dir = pick(cmd->get_option("--out"), out_dir, config, "out_dir", std::string("."));
  format = pick(cmd->get_option("--format"), format, config, "format", std::string("jsonl"));
  jobs = pick(cmd->get_option("--jobs"), jobs, config, "jobs",
              std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
  models_path =
      pick(cmd->get_option("--models"), models_path, config, "readout_models", std::string{});
  separation = pick(cmd->get_option("--separation"), separation, config, "separation", 4.6527);

  CodeLayout layout = load_layout(config.value("layout", "surface13"));
  ModelSet models = load_models(layout, models_path, separation);

  json echo;
  echo["command"] = "simulate";
  echo["sim"] = json::parse(sim_config_to_json(sim));
  echo["layout_hash"] = layout.hash();
  echo["readout_models"] = models_path.empty() ? "synthetic" : models_path;
  echo["separation"] = separation;

  std::filesystem::create_directories(out_dir);
  bool binary = format == "binary";
  std::string path = out_dir + "/dataset." + (binary ? "bin" : "jsonl");
  generate_dataset(sim, layout, models, path,
                   binary ? DatasetFormat::kBinary : DatasetFormat::kJsonl, jobs, echo.dump());
  log_info("wrote " + path);
  std::cout << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// build-graph

struct BuildGraphArgs {
  int rounds = 4;
  std::string out;
  std::string noise_path;
  std::string source = "floor";
  std::string dataset;
  std::string models_path;
  double separation = 4.6527;
};

int run_build_graph(const BuildGraphArgs& args) {
  CodeLayout layout = CodeLayout::surface13();
  NoiseParams noise = load_noise(args.noise_path);
  DecodingGraph floor = build_noise_floor_graph(layout, noise, args.rounds);
  DecodingGraph graph = floor;
  if (args.source == "pij") {
    if (args.dataset.empty()) throw std::runtime_error("--source pij requires --dataset");
    ModelSet models = load_models(layout, args.models_path, args.separation);
    DefectStats stats(floor);
    DatasetReader reader(args.dataset);
    for (;;) {
      auto record = reader.next(layout);
      if (!record) break;
      if (record->rounds != args.rounds) continue;
      require_iq(*record, layout, false);
      stats.add_shot(harden_shot(models, *record, layout).defects);
    }
    graph = estimate_pij_graph(stats, floor);
  }
  json j = json::parse(graph.to_json());
  json echo;
  echo["command"] = "build-graph";
  echo["rounds"] = args.rounds;
  echo["source"] = args.source;
  echo["noise"] = json::parse(noise.to_json());
  j["config"] = echo;
  j["config_hash"] = fnv1a(echo.dump());
  write_file(args.out, j.dump());
  log_info("wrote " + args.out);
  return 0;
}

// ---------------------------------------------------------------------------
// decode

int run_decode(const json& config, const CLI::App* cmd, const std::string& dataset_path,
               std::string models_path, double separation, std::string mode,
               const std::string& train_path, const std::string& graph_source,
               std::string noise_path, std::string out_dir, int jobs) {
  mode = pick(cmd->get_option("--mode"), mode, config, "decode_mode", std::string("hard"));
  out_dir = pick(cmd->get_option("--out"), out_dir, config, "out_dir", std::string("."));
  jobs = pick(cmd->get_option("--jobs"), jobs, config, "jobs",
              std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
  models_path =
      pick(cmd->get_option("--models"), models_path, config, "readout_models", std::string{});
  separation = pick(cmd->get_option("--separation"), separation, config, "separation", 4.6527);
  noise_path =
      pick(cmd->get_option("--noise"), noise_path, config, "noise_params", std::string{});
  bool soft = mode == "soft";

  CodeLayout layout = load_layout(config.value("layout", "surface13"));
  NoiseParams noise = load_noise(noise_path);
  ModelSet models = load_models(layout, models_path, separation);

  // Shots decode in parallel but the output stays in record order.
  std::vector<ShotRecord> records;
  {
    DatasetReader reader(dataset_path);
    for (;;) {
      auto record = reader.next(layout);
      if (!record) break;
      require_iq(*record, layout, soft);
      records.push_back(std::move(*record));
    }
  }
  if (records.empty()) throw std::runtime_error("dataset contains no shots");

  std::set<int> rounds_seen;
  for (const auto& r : records) rounds_seen.insert(r.rounds);

  // The configured classification probability is a lower bound; the fitted
  // readout models pin the actual assignment error, so raise the floor to it.
  double class_error = 0.0;
  for (const auto& m : models.ancilla) class_error += assignment_error(m);
  for (const auto& m : models.data) class_error += assignment_error(m);
  class_error /= static_cast<double>(models.ancilla.size() + models.data.size());
  NoiseParams graph_noise = noise;
  graph_noise.p_meas_class =
      std::min(std::max(noise.p_meas_class, class_error), 0.5 - 1e-9);

  // Classification statistics and data-derived graphs come from the
  // training split, never from the shots being decoded.
  std::map<int, DecodingGraph> graphs;
  std::map<int, ClassErrorStats> stats;
  for (int r : rounds_seen) graphs.emplace(r, build_noise_floor_graph(layout, graph_noise, r));
  if (soft || graph_source == "pij") {
    if (train_path.empty()) {
      throw std::runtime_error(
          soft ? "soft decoding requires --train for classification statistics"
               : "--graph-source pij requires --train");
    }
    std::map<int, DefectStats> defect_stats;
    for (int r : rounds_seen) defect_stats.emplace(r, DefectStats(graphs.at(r)));
    DatasetReader reader(train_path);
    for (;;) {
      auto record = reader.next(layout);
      if (!record) break;
      if (!rounds_seen.count(record->rounds)) continue;
      require_iq(*record, layout, soft);
      HardenedShot hardened = harden_shot(models, *record, layout);
      defect_stats.at(record->rounds).add_shot(hardened.defects);
      accumulate_class_errors(models, *record, hardened, graphs.at(record->rounds),
                              stats[record->rounds]);
    }
    if (graph_source == "pij") {
      for (int r : rounds_seen) graphs.at(r) = estimate_pij_graph(defect_stats.at(r),
                                                                  graphs.at(r));
    }
  }

  std::map<int, Decoder> decoders;
  std::map<int, SoftReweighter> reweighters;
  for (int r : rounds_seen) {
    decoders.emplace(r, Decoder(graphs.at(r)));
    if (soft) reweighters.emplace(r, SoftReweighter(models, stats.at(r), graphs.at(r)));
  }

  json echo;
  echo["command"] = "decode";
  echo["mode"] = mode;
  echo["graph_source"] = graph_source;
  echo["dataset"] = dataset_path;
  echo["train"] = train_path;
  echo["noise"] = json::parse(noise.to_json());
  uint64_t config_hash = fnv1a(echo.dump());

  std::filesystem::create_directories(out_dir);
  std::string out_path = out_dir + "/results.jsonl";
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  json header;
  header["kind"] = "softdec-results";
  header["config"] = echo;
  header["config_hash"] = config_hash;
  out << header.dump() << "\n";

  auto decode_one = [&](int64_t index) {
    const ShotRecord& record = records[index];
    const Decoder& decoder = decoders.at(record.rounds);
    HardenedShot hardened = harden_shot(models, record, layout);
    DecodeResult result =
        soft ? soft_decode(reweighters.at(record.rounds), record, hardened, decoder)
             : decoder.decode(hardened.defects);
    json line;
    line["shot"] = record.shot_id;
    line["R"] = record.rounds;
    line["state"] = layout.state_to_string(record.initial_state);
    line["z_in"] = logical_parity(layout, record.initial_state);
    line["z_out"] = hardened.z_out;
    line["b"] = result.flip_bit;
    line["y"] = result.confidence;
    line["w"] = result.weight;
    line["w_comp"] = result.weight_complement;
    if (record.truth) line["true_flip"] = record.truth->logical_flip ? 1 : 0;
    return line.dump();
  };
  ordered_parallel(static_cast<int64_t>(records.size()), jobs, decode_one,
                   [&](const std::string& line) { out << line << "\n"; });
  out.close();
  if (out.fail()) throw std::runtime_error("write failed: " + out_path);
  log_info("wrote " + out_path);
  std::cout << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// shared results reader

std::vector<ShotOutcome> read_results(const std::string& path, json* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file");
  json header = json::parse(line);
  if (header.value("kind", "") != "softdec-results") {
    throw std::runtime_error("not a softdec results file (bad header)");
  }
  if (header_out != nullptr) *header_out = header;
  std::vector<ShotOutcome> outcomes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ShotOutcome o;
    o.shot_id = j.at("shot").get<uint64_t>();
    o.rounds = j.at("R").get<int>();
    std::string bits = j.at("state").get<std::string>();
    uint16_t state = 0;
    for (size_t q = 0; q < bits.size(); ++q) {
      if (bits[q] == '1') state |= static_cast<uint16_t>(1u << q);
    }
    o.state = state;
    o.z_in = j.at("z_in").get<int>();
    o.z_out = j.at("z_out").get<int>();
    o.flip_bit = j.at("b").get<int>();
    o.confidence = j.at("y").get<double>();
    outcomes.push_back(o);
  }
  return outcomes;
}

void write_results(const std::string& path, const json& header,
                   const std::vector<ShotOutcome>& outcomes, int state_bits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << header.dump() << "\n";
  for (const auto& o : outcomes) {
    std::string bits(state_bits, '0');
    for (int q = 0; q < state_bits; ++q) {
      if ((o.state >> q) & 1) bits[q] = '1';
    }
    json line;
    line["shot"] = o.shot_id;
    line["R"] = o.rounds;
    line["state"] = bits;
    line["z_in"] = o.z_in;
    line["z_out"] = o.z_out;
    line["b"] = o.flip_bit;
    line["y"] = o.confidence;
    out << line.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string results;
  std::string out_dir = ".";
  bool exclude_early = false;
  int hist_bins = 20;
};

int run_fit(const FitArgs& args) {
  json header;
  std::vector<ShotOutcome> outcomes = read_results(args.results, &header);
  uint64_t config_hash = header.value("config_hash", uint64_t{0});
  std::vector<FidelityPoint> points = fidelity(outcomes);
  LogicalFit fit;
  try {
    fit = fit_logical(points, !args.exclude_early);
  } catch (const std::exception& e) {
    throw FitFailure(e.what());
  }
  std::filesystem::create_directories(args.out_dir);
  write_file(args.out_dir + "/fidelity_vs_R.csv", fidelity_csv(points, config_hash));
  write_file(
      args.out_dir + "/summary.json",
      fit_summary_json(fit, points, header.value("config", json::object()).dump(), config_hash));
  for (const auto& [rounds, bins] : confidence_histogram(outcomes, args.hist_bins)) {
    write_file(args.out_dir + "/confidence_hist_R" + std::to_string(rounds) + ".csv",
               confidence_histogram_csv(bins, config_hash));
  }
  std::cout << "eps_L = " << format_eps_percent(fit.eps, fit.eps_sigma()) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// postselect

struct PostselectArgs {
  std::string results;
  std::string mode = "constant_threshold";
  int64_t budget = -1;
  double threshold = -1.0;
  std::string dataset;
  std::string models_path;
  double separation = 4.6527;
  std::string out_dir = ".";
};

int run_postselect(const PostselectArgs& args) {
  json header;
  std::vector<ShotOutcome> outcomes = read_results(args.results, &header);
  uint64_t config_hash = header.value("config_hash", uint64_t{0});
  std::filesystem::create_directories(args.out_dir);

  ConfidencePostselection selection;
  if (args.mode == "leakage") {
    if (args.dataset.empty()) throw std::runtime_error("--mode leakage requires --dataset");
    CodeLayout layout = CodeLayout::surface13();
    ModelSet models = load_models(layout, args.models_path, args.separation);
    std::map<uint64_t, bool> leaked;
    DatasetReader reader(args.dataset);
    for (;;) {
      auto record = reader.next(layout);
      if (!record) break;
      leaked[record->shot_id] = shot_has_leakage(models, *record);
    }
    std::map<int, std::pair<int64_t, int64_t>> per_round;  // kept, total
    for (const auto& o : outcomes) {
      auto it = leaked.find(o.shot_id);
      bool keep = it != leaked.end() && !it->second;
      per_round[o.rounds].second += 1;
      if (keep) {
        per_round[o.rounds].first += 1;
        selection.kept.push_back(o);
      }
    }
    selection.discarded = static_cast<int64_t>(outcomes.size() - selection.kept.size());
    for (const auto& [rounds, counts] : per_round) {
      selection.thresholds[rounds] = 0.0;
      selection.retained_fraction[rounds] =
          counts.second > 0 ? static_cast<double>(counts.first) / counts.second : 1.0;
    }
    if (selection.kept.empty()) log_warn("leakage post-selection discarded every shot");
  } else {
    PostselectMode mode;
    if (args.mode == "constant_fraction") {
      mode = PostselectMode::kConstantFraction;
    } else if (args.mode == "constant_threshold") {
      mode = PostselectMode::kConstantThreshold;
    } else {
      throw std::runtime_error("--mode must be leakage, constant_fraction, or constant_threshold");
    }
    int64_t budget = args.budget;
    if (budget < 0) {
      if (args.threshold < 0.0) {
        throw std::runtime_error("confidence post-selection needs --budget or --threshold");
      }
      if (mode != PostselectMode::kConstantThreshold) {
        throw std::runtime_error("--threshold applies to constant_threshold mode");
      }
      budget = 0;
      for (const auto& o : outcomes) {
        if (std::abs(o.confidence - 0.5) < args.threshold) ++budget;
      }
    }
    selection = postselect_confidence(outcomes, mode, budget);
  }

  json h = header;
  h["postselect"] = args.mode;
  write_results(args.out_dir + "/results_postselected.jsonl", h, selection.kept, 9);
  write_file(args.out_dir + "/retained_fraction.csv",
             retained_fraction_csv(selection, outcomes, config_hash));
  std::cout << "discarded " << selection.discarded << " of " << outcomes.size() << " runs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-information decoding toolkit for the Surface-13 bit-flip code", "softdec"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON pipeline configuration file");

  CalibrateArgs cal;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Fit readout models to calibration data");
  cal_cmd->add_option("--input", cal.input, "Calibration JSON (qubit -> state -> IQ pairs)")
      ->required();
  cal_cmd->add_option("--out", cal.out, "Output models JSON path")->required();
  cal_cmd->add_option("--states", cal.states, "Number of states to fit (2 or 3)")
      ->check(CLI::IsMember({2, 3}));
  cal_cmd->add_option("--model", cal.model, "Fit backend: gaussian, ampdamp, or histogram")
      ->check(CLI::IsMember({"gaussian", "ampdamp", "histogram"}));

  uint64_t seed = 0;
  std::vector<int> rounds;
  int shots = 1000;
  std::string out_dir = ".";
  std::string format = "jsonl";
  int jobs = 0;
  std::string noise_path, models_path;
  double separation = 4.6527;
  double p_leak = 0.0, p_seep = 0.25;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic shot dataset");
  sim_cmd->add_option("--seed", seed, "RNG seed (mandatory, here or in the config)");
  sim_cmd->add_option("--rounds", rounds, "Round counts, e.g. --rounds 1,2,4,8,16")
      ->delimiter(',');
  sim_cmd->add_option("--shots", shots, "Shots per (state, rounds) cell");
  sim_cmd->add_option("--out", out_dir, "Output directory");
  sim_cmd->add_option("--format", format, "Dataset format: jsonl or binary")
      ->check(CLI::IsMember({"jsonl", "binary"}));
  sim_cmd->add_option("--jobs", jobs, "Worker threads (default: all cores)");
  sim_cmd->add_option("--noise", noise_path, "Noise parameter JSON file");
  sim_cmd->add_option("--models", models_path, "Readout models JSON file");
  sim_cmd->add_option("--separation", separation,
                      "Synthetic readout separation in sigmas (without --models)");
  sim_cmd->add_option("--leak", p_leak, "Leak probability per ancilla measurement");
  sim_cmd->add_option("--seep", p_seep, "Seep-back probability per leaked measurement");

  BuildGraphArgs bg;
  CLI::App* bg_cmd = app.add_subcommand("build-graph", "Build a decoding graph");
  bg_cmd->add_option("--rounds", bg.rounds, "Round count the graph covers")->required();
  bg_cmd->add_option("--out", bg.out, "Output graph JSON path")->required();
  bg_cmd->add_option("--noise", bg.noise_path, "Noise parameter JSON (floor values)");
  bg_cmd->add_option("--source", bg.source, "floor or pij")
      ->check(CLI::IsMember({"floor", "pij"}));
  bg_cmd->add_option("--dataset", bg.dataset, "Shot dataset for pij estimation");
  bg_cmd->add_option("--models", bg.models_path, "Readout models JSON file");
  bg_cmd->add_option("--separation", bg.separation,
                     "Synthetic model separation (without --models)");

  std::string dec_dataset, dec_mode = "hard", dec_train, dec_graph_source = "floor";
  std::string dec_models, dec_noise, dec_out = ".";
  double dec_separation = 4.6527;
  int dec_jobs = 0;
  CLI::App* dec_cmd = app.add_subcommand("decode", "Decode a shot dataset");
  dec_cmd->add_option("--dataset", dec_dataset, "Dataset to decode")->required();
  dec_cmd->add_option("--mode", dec_mode, "hard or soft")->check(CLI::IsMember({"hard", "soft"}));
  dec_cmd->add_option("--train", dec_train,
                      "Training dataset for classification statistics / pij");
  dec_cmd->add_option("--graph-source", dec_graph_source, "floor or pij")
      ->check(CLI::IsMember({"floor", "pij"}));
  dec_cmd->add_option("--models", dec_models, "Readout models JSON file");
  dec_cmd->add_option("--separation", dec_separation,
                      "Synthetic model separation (without --models)");
  dec_cmd->add_option("--noise", dec_noise, "Noise parameter JSON file");
  dec_cmd->add_option("--out", dec_out, "Output directory");
  dec_cmd->add_option("--jobs", dec_jobs, "Worker threads (default: all cores)");

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the logical fidelity decay");
  fit_cmd->add_option("--results", fit_args.results, "Decode results JSONL")->required();
  fit_cmd->add_option("--out", fit_args.out_dir, "Output directory");
  fit_cmd->add_flag("--exclude-early", fit_args.exclude_early, "Drop R = 1, 2 from the fit");
  fit_cmd->add_option("--hist-bins", fit_args.hist_bins, "Confidence histogram bins");

  PostselectArgs ps;
  CLI::App* ps_cmd = app.add_subcommand("postselect", "Discard runs by leakage or confidence");
  ps_cmd->add_option("--results", ps.results, "Decode results JSONL")->required();
  ps_cmd->add_option("--mode", ps.mode, "leakage, constant_fraction, or constant_threshold");
  ps_cmd->add_option("--budget", ps.budget, "Total number of runs to discard");
  ps_cmd->add_option("--threshold", ps.threshold,
                     "Discard runs with |y - 1/2| below this (constant_threshold)");
  ps_cmd->add_option("--dataset", ps.dataset, "Shot dataset (leakage mode)");
  ps_cmd->add_option("--models", ps.models_path, "Readout models JSON file");
  ps_cmd->add_option("--separation", ps.separation,
                     "Synthetic model separation (without --models)");
  ps_cmd->add_option("--out", ps.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    json config = load_config(config_path);
    if (cal_cmd->parsed()) return run_calibrate(cal);
    if (sim_cmd->parsed()) {
      return run_simulate(config, sim_cmd, seed, rounds, shots, out_dir, format, jobs,
                          noise_path, models_path, separation, p_leak, p_seep);
    }
    if (bg_cmd->parsed()) return run_build_graph(bg);
    if (dec_cmd->parsed()) {
      return run_decode(config, dec_cmd, dec_dataset, dec_models, dec_separation, dec_mode,
                        dec_train, dec_graph_source, dec_noise, dec_out, dec_jobs);
    }
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (ps_cmd->parsed()) return run_postselect(ps);
    std::cerr << "softdec: no subcommand selected\n";
    return 1;
  } catch (const FitFailure& e) {
    std::cerr << "softdec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "softdec: " << e.what() << "\n";
    return 1;
  }
}
