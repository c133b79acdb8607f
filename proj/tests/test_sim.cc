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

#include "softdec/sim.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "softdec/dataset.h"
#include "softdec/decode.h"
#include "softdec/detectors.h"
#include "softdec/pij.h"

using namespace softdec;

namespace {

std::string temp_dir() {
  static int counter = 0;
  std::string dir =
      (std::filesystem::temp_directory_path() / ("softdec_sim_" + std::to_string(counter++)))
          .string();
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Near-noiseless readout: 16 sigma separation.
ModelSet sharp_models(const CodeLayout& layout) { return synthetic_model_set(layout, 16.0); }

}  // namespace

TEST_CASE("noiseless graph and sharp readout give zero defects") {
  CodeLayout layout = CodeLayout::surface13();
  NoiseParams off;
  off.p_1q = off.p_2q = off.p_meas_qubit = off.p_meas_class = 0.0;
  off.t1_us = off.t2_us = 1e9;
  DecodingGraph graph = build_noise_floor_graph(layout, off, 4);
  ModelSet models = sharp_models(layout);
  for (uint16_t state : layout.basis_states()) {
    ShotRecord record = sample_shot(graph, layout, models, {}, state, state, 99);
    HardenedShot hardened = harden_shot(models, record, layout);
    for (uint8_t d : hardened.defects) CHECK(d == 0);
    CHECK(hardened.z_out == 0);
    CHECK_FALSE(record.truth->logical_flip);
    // The final bits read back the prepared state.
    for (int q = 0; q < 9; ++q) CHECK(hardened.final_bits[q] == ((state >> q) & 1));
  }
}

TEST_CASE("a certain edge fires its defects every shot") {
  CodeLayout layout = CodeLayout::surface13();
  DecodingGraph graph = build_noise_floor_graph(layout, NoiseParams{}, 3);
  // Make one data edge certain and everything else impossible.
  int target = -1;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    if (graph.edges[e].kind == EdgeKind::kDataQubitError && !graph.edges[e].touches_boundary() &&
        !graph.edges[e].mechanisms.empty()) {
      target = static_cast<int>(e);
      break;
    }
  }
  REQUIRE(target >= 0);
  for (auto& e : graph.edges) {
    for (auto& m : e.mechanisms) m.probability = 0.0;
    e.probability = 1e-9;
  }
  graph.edges[target].mechanisms.resize(1);
  graph.edges[target].mechanisms[0].probability = 1.0;
  graph.edges[target].probability = 0.499;

  ModelSet models = sharp_models(layout);
  for (int i = 0; i < 25; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, {}, 0, i, 7);
    HardenedShot hardened = harden_shot(models, record, layout);
    REQUIRE(record.truth.has_value());
    REQUIRE(record.truth->fired_edges.size() == 1);
    CHECK(record.truth->fired_edges[0] == static_cast<uint32_t>(target));
    CHECK(record.truth->logical_flip == graph.edges[target].logical_flip);
    int fired = 0;
    for (size_t d = 0; d < hardened.defects.size(); ++d) {
      if (hardened.defects[d]) {
        ++fired;
        CHECK((static_cast<int>(d) == graph.edges[target].node_a ||
               static_cast<int>(d) == graph.edges[target].node_b));
      }
    }
    CHECK(fired == 2);
  }
}

TEST_CASE("hardened defect rates match the analytic graph prediction") {
  CodeLayout layout = CodeLayout::surface13();
  NoiseParams params;  // floor defaults
  const int rounds = 4;
  DecodingGraph graph = build_noise_floor_graph(layout, params, rounds);
  // 8-sigma separation: assignment error ~ Phi(-4); the graph must carry the
  // same classification probability for self-consistency.
  ModelSet models = synthetic_model_set(layout, 8.0);
  params.p_meas_class = assignment_error(models.ancilla[0]);
  graph = build_noise_floor_graph(layout, params, rounds);

  std::vector<double> expected = analytic_defect_rates(graph);
  std::vector<int64_t> counts(expected.size(), 0);
  const int n = 100000;
  auto states = layout.basis_states();
  for (int i = 0; i < n; ++i) {
    ShotRecord record =
        sample_shot(graph, layout, models, {}, states[i % states.size()], i, 31, false);
    HardenedShot hardened = harden_shot(models, record, layout);
    for (size_t d = 0; d < counts.size(); ++d) counts[d] += hardened.defects[d];
  }
  for (size_t d = 0; d < counts.size(); ++d) {
    double rate = static_cast<double>(counts[d]) / n;
    double se = std::sqrt(std::max(expected[d] * (1.0 - expected[d]) / n, 1e-12));
    CAPTURE(d);
    CAPTURE(rate);
    CAPTURE(expected[d]);
    CHECK(std::abs(rate - expected[d]) < 3.5 * se + 1e-4);
  }
}

TEST_CASE("empirical pair moments converge to the independent-edge model") {
  CodeLayout layout = CodeLayout::surface13();
  DecodingGraph graph = build_noise_floor_graph(layout, NoiseParams{}, 3);
  ModelSet models = sharp_models(layout);  // suppress classification noise
  // Analytic <d_i d_j> for a bulk edge pair: every edge set splits into
  // {both, i-only, j-only} xor groups.
  DefectStats stats(graph);
  const int n = 120000;
  for (int i = 0; i < n; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, {}, 0, i, 77, false);
    HardenedShot hardened = harden_shot(models, record, layout);
    stats.add_shot(hardened.defects);
  }
  auto expected_pair = [&](int u, int v) {
    double p_both = 0.0, p_i = 0.0, p_j = 0.0;
    for (const auto& e : graph.edges) {
      bool at_u = e.node_a == u || e.node_b == u;
      bool at_v = e.node_a == v || e.node_b == v;
      double p = e.kind == EdgeKind::kClassificationError ? 0.0 : e.probability;
      if (e.kind == EdgeKind::kFinalRoundCombined) {
        // Only the qubit mechanisms fire in this sharp-readout run.
        p = 0.0;
        for (const auto& m : e.mechanisms) p = xor_probability(p, m.probability);
      }
      if (at_u && at_v) {
        p_both = xor_probability(p_both, p);
      } else if (at_u) {
        p_i = xor_probability(p_i, p);
      } else if (at_v) {
        p_j = xor_probability(p_j, p);
      }
    }
    // P(d_u & d_v) over the three independent groups.
    double result = 0.0;
    for (int b : {0, 1}) {
      for (int fi : {0, 1}) {
        for (int fj : {0, 1}) {
          double pr = (b ? p_both : 1 - p_both) * (fi ? p_i : 1 - p_i) * (fj ? p_j : 1 - p_j);
          if ((b ^ fi) && (b ^ fj)) result += pr;
        }
      }
    }
    return result;
  };
  const auto& bulk = stats.bulk_edges();
  for (size_t k = 0; k < bulk.size(); ++k) {
    const Edge& e = graph.edges[bulk[k]];
    double expected = expected_pair(e.node_a, e.node_b);
    double got = stats.pair_mean(static_cast<int>(k));
    double se = std::sqrt(std::max(expected * (1.0 - expected) / n, 1e-12));
    CAPTURE(bulk[k]);
    CHECK(std::abs(got - expected) < 3.5 * se + 1e-4);
  }
}

TEST_CASE("leakage flags appear at the injected rate") {
  CodeLayout layout = CodeLayout::surface13();
  NoiseParams quiet;
  quiet.p_1q = quiet.p_2q = quiet.p_meas_qubit = quiet.p_meas_class = 0.0;
  quiet.t1_us = quiet.t2_us = 1e9;
  const int rounds = 8;
  DecodingGraph graph = build_noise_floor_graph(layout, quiet, rounds);
  ModelSet models = sharp_models(layout);
  LeakageConfig leakage{0.01, 0.5};

  // Reference Markov chain: P(leaked at measurement r).
  std::vector<double> occupancy(rounds + 1, 0.0);
  double not_leaked = 1.0, leaked = 0.0;
  for (int r = 1; r <= rounds; ++r) {
    double enter = not_leaked * leakage.p_leak;
    leaked += enter;
    not_leaked -= enter;
    occupancy[r] = leaked;  // measured while leaked
    double leave = leaked * leakage.p_seep;
    leaked -= leave;
    not_leaked += leave;
  }

  const int n = 60000;
  std::vector<int64_t> counts(rounds + 1, 0);
  int64_t flagged = 0, truth_leaked = 0;
  for (int i = 0; i < n; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, leakage, 0, i, 13);
    for (int a = 0; a < 4; ++a) {
      for (int r = 1; r <= rounds; ++r) {
        int slot = a * rounds + (r - 1);
        bool truth = record.truth->leaked[slot];
        counts[r] += truth ? 1 : 0;
        truth_leaked += truth ? 1 : 0;
        bool flag = leakage_flag(models.ancilla[a], record.ancilla_iq[slot]);
        flagged += flag ? 1 : 0;
        // With 16-sigma clouds the classifier recovers the truth.
        CHECK(flag == truth);
      }
    }
  }
  CHECK(flagged == truth_leaked);
  for (int r = 1; r <= rounds; ++r) {
    double rate = static_cast<double>(counts[r]) / (4.0 * n);
    double se = std::sqrt(occupancy[r] * (1.0 - occupancy[r]) / (4.0 * n));
    CHECK(std::abs(rate - occupancy[r]) < 3.5 * se + 1e-4);
  }
}

TEST_CASE("generate_dataset is deterministic and jobs-independent") {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models = synthetic_model_set(layout, 4.0);
  SimConfig config;
  config.rounds = {1, 2};
  config.shots_per_state_round = 20;
  config.seed = 4242;
  std::string dir = temp_dir();
  generate_dataset(config, layout, models, dir + "/a.jsonl", DatasetFormat::kJsonl, 1, "{}");
  generate_dataset(config, layout, models, dir + "/b.jsonl", DatasetFormat::kJsonl, 4, "{}");
  generate_dataset(config, layout, models, dir + "/a.bin", DatasetFormat::kBinary, 1, "{}");
  generate_dataset(config, layout, models, dir + "/b.bin", DatasetFormat::kBinary, 3, "{}");
  CHECK(slurp(dir + "/a.jsonl") == slurp(dir + "/b.jsonl"));
  CHECK(slurp(dir + "/a.bin") == slurp(dir + "/b.bin"));
  CHECK(slurp(dir + "/a.jsonl") != slurp(dir + "/a.bin"));

  // 16 states x 2 round values x 20 shots.
  DatasetReader reader(dir + "/a.jsonl");
  int64_t count = 0;
  std::set<uint64_t> ids;
  for (;;) {
    auto record = reader.next(layout);
    if (!record) break;
    ids.insert(record->shot_id);
    ++count;
  }
  CHECK(count == 16 * 2 * 20);
  CHECK(ids.size() == static_cast<size_t>(count));
}

TEST_CASE("binary and jsonl records round-trip identically") {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models = synthetic_model_set(layout, 4.0);
  DecodingGraph graph = build_noise_floor_graph(layout, NoiseParams{}, 2);
  ShotRecord record = sample_shot(graph, layout, models, {0.05, 0.3}, 0b000000011, 117, 5);
  ShotRecord via_json = shot_from_json_line(shot_to_json_line(record, layout), layout);
  ShotRecord via_bin = shot_from_binary(shot_to_binary(record), 4, 9);
  for (const ShotRecord* copy : {&via_json, &via_bin}) {
    CHECK(copy->shot_id == record.shot_id);
    CHECK(copy->rounds == record.rounds);
    CHECK(copy->initial_state == record.initial_state);
    REQUIRE(copy->ancilla_iq.size() == record.ancilla_iq.size());
    for (size_t i = 0; i < record.ancilla_iq.size(); ++i) {
      CHECK(copy->ancilla_iq[i].i_volt == record.ancilla_iq[i].i_volt);
      CHECK(copy->ancilla_iq[i].q_volt == record.ancilla_iq[i].q_volt);
    }
    REQUIRE(copy->truth.has_value());
    CHECK(copy->truth->fired_edges == record.truth->fired_edges);
    CHECK(copy->truth->logical_flip == record.truth->logical_flip);
    CHECK(copy->truth->leaked == record.truth->leaked);
  }
}

TEST_CASE("empty dataset still carries a readable header") {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models = synthetic_model_set(layout, 4.0);
  SimConfig config;
  config.rounds = {1};
  config.shots_per_state_round = 0;
  config.seed = 1;
  std::string dir = temp_dir();
  generate_dataset(config, layout, models, dir + "/empty.jsonl", DatasetFormat::kJsonl, 1,
                   R"({"note":"empty"})");
  DatasetReader reader(dir + "/empty.jsonl");
  CHECK(reader.header().num_ancillas == 4);
  CHECK(reader.header().config_json.find("empty") != std::string::npos);
  CHECK_FALSE(reader.next(layout).has_value());
}

TEST_CASE("heralded_split: identity, stratification, partition") {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models = synthetic_model_set(layout, 4.0);
  SimConfig config;
  config.rounds = {1, 2, 4};
  config.shots_per_state_round = 25;
  config.seed = 9;
  std::string dir = temp_dir();
  std::string input = dir + "/in.jsonl";
  generate_dataset(config, layout, models, input, DatasetFormat::kJsonl, 1, "{}");

  // fractions (1, 0, 0): train == input records.
  auto all = heralded_split(input, {1.0, 0.0, 0.0}, 5,
                            {dir + "/t.jsonl", dir + "/v.jsonl", dir + "/s.jsonl"});
  CHECK(all.counts[0] == 16 * 3 * 25);
  CHECK(all.counts[1] == 0);
  CHECK(all.counts[2] == 0);
  {
    // Same record multiset as the input (order within the file is input order).
    DatasetReader a(input), b(dir + "/t.jsonl");
    for (;;) {
      auto ra = a.next_raw();
      auto rb = b.next_raw();
      CHECK(ra.has_value() == rb.has_value());
      if (!ra || !rb) break;
      CHECK(*ra == *rb);
    }
  }

  auto split = heralded_split(input, {0.6, 0.2, 0.2}, 5,
                              {dir + "/t2.jsonl", dir + "/v2.jsonl", dir + "/s2.jsonl"});
  CHECK(split.counts[0] + split.counts[1] + split.counts[2] == 16 * 3 * 25);
  CHECK(split.dropped == 0);

  // Stratification: each (state, R) cell within one record of its target,
  // and the three outputs partition the input.
  std::map<std::pair<uint16_t, int>, std::array<int, 3>> cells;
  std::set<uint64_t> seen;
  const char* files[3] = {"/t2.jsonl", "/v2.jsonl", "/s2.jsonl"};
  for (int k = 0; k < 3; ++k) {
    DatasetReader reader(dir + files[k]);
    for (;;) {
      auto record = reader.next(layout);
      if (!record) break;
      cells[{record->initial_state, record->rounds}][k] += 1;
      CHECK(seen.insert(record->shot_id).second);  // pairwise disjoint
    }
  }
  CHECK(seen.size() == 16u * 3u * 25u);  // union == input
  double targets[3] = {0.6 * 25, 0.2 * 25, 0.2 * 25};
  for (const auto& [key, counts] : cells) {
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(counts[k] - targets[k]) <= 1.0);
    }
  }

  // Deterministic given the seed.
  auto again = heralded_split(input, {0.6, 0.2, 0.2}, 5,
                              {dir + "/t3.jsonl", dir + "/v3.jsonl", dir + "/s3.jsonl"});
  CHECK(slurp(dir + "/t2.jsonl") == slurp(dir + "/t3.jsonl"));
  CHECK(slurp(dir + "/s2.jsonl") == slurp(dir + "/s3.jsonl"));

  CHECK_THROWS(heralded_split(input, {0.8, 0.3, 0.0}, 5,
                              {dir + "/x.jsonl", dir + "/y.jsonl", dir + "/z.jsonl"}));
}

TEST_CASE("decoding beats the trivial decoder and never beats the fired set") {
  // Noiseless-readout limit: with truth retained, the matching explanation
  // can cost at most the fired error set, and hard decoding must do at
  // least as well as always answering b = 0.
  CodeLayout layout = CodeLayout::surface13();
  NoiseParams loud;
  loud.p_2q = 2e-2;
  loud.p_meas_class = 1e-6;
  DecodingGraph graph = build_noise_floor_graph(layout, loud, 4);
  ModelSet models = sharp_models(layout);
  Decoder decoder(graph);
  std::vector<double> weights = graph.base_weights();

  int success = 0, trivial_success = 0, n = 4000;
  for (int i = 0; i < n; ++i) {
    ShotRecord record = sample_shot(graph, layout, models, {}, 0, i, 321);
    HardenedShot hardened = harden_shot(models, record, layout);
    DecodeResult result = decoder.decode(hardened.defects);
    double fired_weight = 0.0;
    for (uint32_t e : record.truth->fired_edges) fired_weight += weights[e];
    CHECK(result.weight <= fired_weight + 1e-9);
    bool flip = record.truth->logical_flip;
    success += (result.flip_bit == (flip ? 1 : 0)) ? 1 : 0;
    trivial_success += flip ? 0 : 1;
  }
  CHECK(success >= trivial_success);
  CHECK(success > n * 0.9);
}
