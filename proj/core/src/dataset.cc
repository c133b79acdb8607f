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

#include "softdec/dataset.h"

#include <json.hpp>

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "softdec/logging.h"

namespace softdec {

namespace {

using nlohmann::json;

constexpr char kBinaryMagic[4] = {'S', 'D', 'S', 'H'};

void append_u32(std::string& out, uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void append_u64(std::string& out, uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void append_doubles(std::string& out, const std::vector<IQSample>& samples) {
  for (const auto& z : samples) {
    char buf[16];
    std::memcpy(buf, &z.i_volt, 8);
    std::memcpy(buf + 8, &z.q_volt, 8);
    out.append(buf, 16);
  }
}

class ByteCursor {
 public:
  explicit ByteCursor(const std::string& bytes) : bytes_(bytes) {}
  uint32_t u32() { return read<uint32_t>(); }
  uint64_t u64() { return read<uint64_t>(); }
  uint16_t u16() { return read<uint16_t>(); }
  uint8_t u8() { return read<uint8_t>(); }
  double f64() { return read<double>(); }

 private:
  template <typename T>
  T read() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::runtime_error("truncated binary record");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  const std::string& bytes_;
  size_t pos_ = 0;
};

json iq_to_json(const std::vector<IQSample>& samples) {
  json arr = json::array();
  for (const auto& z : samples) arr.push_back({z.i_volt, z.q_volt});
  return arr;
}

std::vector<IQSample> iq_from_json(const json& arr) {
  std::vector<IQSample> samples;
  samples.reserve(arr.size());
  for (const auto& pair : arr) {
    samples.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  }
  return samples;
}

}  // namespace

std::string DatasetHeader::to_json() const {
  json j;
  j["format"] = "softdec-shots";
  j["version"] = version;
  j["num_ancillas"] = num_ancillas;
  j["num_data"] = num_data;
  j["layout_hash"] = layout_hash;
  j["config"] = json::parse(config_json);
  j["config_hash"] = config_hash;
  return j.dump();
}

DatasetHeader DatasetHeader::from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.value("format", "") != "softdec-shots") {
    throw std::runtime_error("not a softdec shot dataset (bad header)");
  }
  DatasetHeader h;
  h.version = j.at("version").get<int>();
  h.num_ancillas = j.at("num_ancillas").get<int>();
  h.num_data = j.at("num_data").get<int>();
  h.layout_hash = j.at("layout_hash").get<uint64_t>();
  h.config_json = j.at("config").dump();
  h.config_hash = j.at("config_hash").get<uint64_t>();
  return h;
}

std::string shot_to_json_line(const ShotRecord& record, const CodeLayout& layout) {
  json j;
  j["shot"] = record.shot_id;
  j["R"] = record.rounds;
  j["state"] = layout.state_to_string(record.initial_state);
  j["anc"] = iq_to_json(record.ancilla_iq);
  j["fin"] = iq_to_json(record.final_iq);
  if (record.truth) {
    json t;
    t["edges"] = record.truth->fired_edges;
    t["flip"] = record.truth->logical_flip ? 1 : 0;
    json leaks = json::array();
    for (size_t i = 0; i < record.truth->leaked.size(); ++i) {
      if (record.truth->leaked[i]) leaks.push_back(i);
    }
    t["leak_slots"] = leaks;
    j["truth"] = t;
  }
  return j.dump();
}

ShotRecord shot_from_json_line(const std::string& line, const CodeLayout& layout) {
  json j = json::parse(line);
  ShotRecord record;
  record.shot_id = j.at("shot").get<uint64_t>();
  record.rounds = j.at("R").get<int>();
  record.initial_state = layout.state_from_string(j.at("state").get<std::string>());
  record.ancilla_iq = iq_from_json(j.at("anc"));
  record.final_iq = iq_from_json(j.at("fin"));
  if (j.contains("truth")) {
    ShotTruth truth;
    truth.fired_edges = j["truth"].at("edges").get<std::vector<uint32_t>>();
    truth.logical_flip = j["truth"].at("flip").get<int>() != 0;
    truth.leaked.assign(record.ancilla_iq.size(), 0);
    for (const auto& slot : j["truth"].at("leak_slots")) {
      truth.leaked.at(slot.get<size_t>()) = 1;
    }
    record.truth = std::move(truth);
  }
  return record;
}

std::string shot_to_binary(const ShotRecord& record) {
  std::string payload;
  append_u64(payload, record.shot_id);
  payload.push_back(static_cast<char>(record.rounds & 0xff));
  payload.push_back(static_cast<char>((record.rounds >> 8) & 0xff));
  payload.push_back(static_cast<char>(record.initial_state & 0xff));
  payload.push_back(static_cast<char>((record.initial_state >> 8) & 0xff));
  payload.push_back(record.truth ? 1 : 0);
  append_doubles(payload, record.ancilla_iq);
  append_doubles(payload, record.final_iq);
  if (record.truth) {
    append_u32(payload, static_cast<uint32_t>(record.truth->fired_edges.size()));
    for (uint32_t e : record.truth->fired_edges) append_u32(payload, e);
    payload.push_back(record.truth->logical_flip ? 1 : 0);
    size_t flag_bytes = (record.truth->leaked.size() + 7) / 8;
    std::string flags(flag_bytes, '\0');
    for (size_t i = 0; i < record.truth->leaked.size(); ++i) {
      if (record.truth->leaked[i]) flags[i / 8] |= static_cast<char>(1 << (i % 8));
    }
    payload += flags;
  }
  std::string out;
  append_u32(out, static_cast<uint32_t>(payload.size()));
  out += payload;
  return out;
}

ShotRecord shot_from_binary(const std::string& bytes, int num_ancillas, int num_data) {
  ByteCursor cur(bytes);
  uint32_t length = cur.u32();
  if (bytes.size() != length + 4u) throw std::runtime_error("binary record length mismatch");
  ShotRecord record;
  record.shot_id = cur.u64();
  record.rounds = cur.u16();
  record.initial_state = cur.u16();
  bool has_truth = cur.u8() != 0;
  record.ancilla_iq.resize(static_cast<size_t>(num_ancillas) * record.rounds);
  for (auto& z : record.ancilla_iq) {
    z.i_volt = cur.f64();
    z.q_volt = cur.f64();
  }
  record.final_iq.resize(num_data);
  for (auto& z : record.final_iq) {
    z.i_volt = cur.f64();
    z.q_volt = cur.f64();
  }
  if (has_truth) {
    ShotTruth truth;
    uint32_t n = cur.u32();
    truth.fired_edges.resize(n);
    for (uint32_t i = 0; i < n; ++i) truth.fired_edges[i] = cur.u32();
    truth.logical_flip = cur.u8() != 0;
    size_t slots = record.ancilla_iq.size();
    truth.leaked.assign(slots, 0);
    for (size_t byte = 0; byte < (slots + 7) / 8; ++byte) {
      uint8_t b = cur.u8();
      for (int bit = 0; bit < 8 && byte * 8 + bit < slots; ++bit) {
        truth.leaked[byte * 8 + bit] = (b >> bit) & 1;
      }
    }
    record.truth = std::move(truth);
  }
  return record;
}

DatasetWriter::DatasetWriter(const std::string& path, DatasetFormat format,
                             const DatasetHeader& header, const CodeLayout& layout)
    : DatasetWriter(path, format, header) {
  layout_ = layout;
}

DatasetWriter::DatasetWriter(const std::string& path, DatasetFormat format,
                             const DatasetHeader& header)
    : out_(path, std::ios::binary), format_(format) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  std::string header_json = header.to_json();
  if (format_ == DatasetFormat::kJsonl) {
    out_ << header_json << "\n";
  } else {
    out_.write(kBinaryMagic, 4);
    uint32_t version = 1;
    out_.write(reinterpret_cast<const char*>(&version), 4);
    uint32_t len = static_cast<uint32_t>(header_json.size());
    out_.write(reinterpret_cast<const char*>(&len), 4);
    out_.write(header_json.data(), header_json.size());
  }
}

std::string DatasetWriter::serialize(const ShotRecord& record, DatasetFormat format,
                                     const CodeLayout& layout) {
  return format == DatasetFormat::kJsonl ? shot_to_json_line(record, layout)
                                         : shot_to_binary(record);
}

void DatasetWriter::write(const ShotRecord& record) {
  if (!layout_) throw std::runtime_error("writer opened without a layout");
  write_raw(serialize(record, format_, *layout_));
}

void DatasetWriter::write_raw(const std::string& serialized) {
  if (format_ == DatasetFormat::kJsonl) {
    out_ << serialized << "\n";
  } else {
    out_.write(serialized.data(), serialized.size());
  }
  if (!out_) throw std::runtime_error("dataset write failed");
}

void DatasetWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("dataset close failed");
}

DatasetReader::DatasetReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in_.read(magic, 4);
  if (in_.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0) {
    format_ = DatasetFormat::kBinary;
    uint32_t version = 0, len = 0;
    in_.read(reinterpret_cast<char*>(&version), 4);
    in_.read(reinterpret_cast<char*>(&len), 4);
    std::string header_json(len, '\0');
    in_.read(header_json.data(), len);
    if (!in_) throw std::runtime_error("truncated dataset header");
    header_ = DatasetHeader::from_json(header_json);
  } else {
    format_ = DatasetFormat::kJsonl;
    in_.clear();
    in_.seekg(0);
    std::string line;
    if (!std::getline(in_, line)) throw std::runtime_error("empty dataset file");
    header_ = DatasetHeader::from_json(line);
  }
}

std::optional<std::string> DatasetReader::next_raw() {
  if (format_ == DatasetFormat::kJsonl) {
    std::string line;
    while (std::getline(in_, line)) {
      if (!line.empty()) return line;
    }
    return std::nullopt;
  }
  uint32_t len = 0;
  in_.read(reinterpret_cast<char*>(&len), 4);
  if (in_.gcount() == 0) return std::nullopt;
  if (in_.gcount() != 4) throw std::runtime_error("truncated binary record length");
  std::string payload(4, '\0');
  std::memcpy(payload.data(), &len, 4);
  payload.resize(4 + len);
  in_.read(payload.data() + 4, len);
  if (static_cast<uint32_t>(in_.gcount()) != len) {
    throw std::runtime_error("truncated binary record");
  }
  return payload;
}

std::optional<ShotRecord> DatasetReader::next(const CodeLayout& layout) {
  auto raw = next_raw();
  if (!raw) return std::nullopt;
  if (format_ == DatasetFormat::kJsonl) return shot_from_json_line(*raw, layout);
  return shot_from_binary(*raw, header_.num_ancillas, header_.num_data);
}

void generate_dataset(const SimConfig& config, const CodeLayout& layout, const ModelSet& models,
                      const std::string& path, DatasetFormat format, int jobs,
                      const std::string& config_echo_json) {
  config.noise.validate();
  if (config.shots_per_state_round < 0) throw std::invalid_argument("negative shot count");
  std::vector<uint16_t> states = layout.basis_states();

  struct Cell {
    int rounds;
    uint16_t state;
  };
  std::vector<Cell> schedule;
  for (int r : config.rounds) {
    for (uint16_t s : states) schedule.push_back({r, s});
  }
  std::map<int, DecodingGraph> graphs;
  for (int r : config.rounds) {
    if (!graphs.count(r)) graphs.emplace(r, build_noise_floor_graph(layout, config.noise, r));
  }

  DatasetHeader header;
  header.num_ancillas = layout.num_ancillas();
  header.num_data = layout.num_data();
  header.layout_hash = layout.hash();
  header.config_json = config_echo_json;
  header.config_hash = fnv1a(config_echo_json);
  DatasetWriter writer(path, format, header, layout);

  const int64_t per_cell = config.shots_per_state_round;
  const int64_t total = per_cell * static_cast<int64_t>(schedule.size());
  auto make_record = [&](int64_t index) {
    const Cell& cell = schedule[index / std::max<int64_t>(per_cell, 1)];
    return sample_shot(graphs.at(cell.rounds), layout, models, config.leakage, cell.state,
                       static_cast<uint64_t>(index), config.seed, config.with_truth);
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || total < 256) {
    for (int64_t i = 0; i < total; ++i) writer.write(make_record(i));
  } else {
    const int64_t chunk = 256;
    const int64_t num_chunks = (total + chunk - 1) / chunk;
    std::vector<std::vector<std::string>> results(num_chunks);
    std::vector<uint8_t> done(num_chunks, 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<int64_t> next_chunk{0};
    auto worker = [&]() {
      for (;;) {
        int64_t c = next_chunk.fetch_add(1);
        if (c >= num_chunks) return;
        std::vector<std::string> block;
        for (int64_t i = c * chunk; i < std::min(total, (c + 1) * chunk); ++i) {
          block.push_back(DatasetWriter::serialize(make_record(i), format, layout));
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
      for (const auto& serialized : block) writer.write_raw(serialized);
    }
    for (auto& t : pool) t.join();
  }
  writer.close();
}

SplitResult heralded_split(const std::string& input_path, const std::array<double, 3>& fractions,
                           uint64_t seed, const std::array<std::string, 3>& output_paths) {
  double fraction_sum = fractions[0] + fractions[1] + fractions[2];
  if (fraction_sum > 1.0 + 1e-12) throw std::invalid_argument("split fractions sum above 1");
  for (double f : fractions) {
    if (f < 0.0) throw std::invalid_argument("negative split fraction");
  }

  // Pass 1: group record indices by (state, rounds).
  std::map<std::pair<int, int>, std::vector<int64_t>> cells;
  {
    int64_t index = 0;
    DatasetReader reader(input_path);
    for (;;) {
      auto raw = reader.next_raw();
      if (!raw) break;
      int rounds;
      int state;
      if (reader.format() == DatasetFormat::kJsonl) {
        auto j = nlohmann::json::parse(*raw);
        rounds = j.at("R").get<int>();
        std::string bits = j.at("state").get<std::string>();
        state = 0;
        for (size_t q = 0; q < bits.size(); ++q) {
          if (bits[q] == '1') state |= 1 << q;
        }
      } else {
        ByteCursor cur(raw->substr(4));
        cur.u64();
        rounds = cur.u16();
        state = cur.u16();
      }
      cells[{state, rounds}].push_back(index);
      ++index;
    }
  }

  // Assign output labels per cell.
  std::map<int64_t, int> label;  // record index -> 0/1/2; absent = dropped
  SplitResult result;
  for (auto& [key, indices] : cells) {
    Rng rng(seed, Rng::stream_id("split", (static_cast<uint64_t>(key.first) << 20) ^
                                              static_cast<uint64_t>(key.second)));
    for (size_t i = indices.size(); i > 1; --i) {
      std::swap(indices[i - 1], indices[rng.next_below(i)]);
    }
    int64_t n = static_cast<int64_t>(indices.size());
    std::array<int64_t, 3> counts;
    std::array<double, 3> remainders;
    int64_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
      double target = fractions[k] * n;
      counts[k] = static_cast<int64_t>(target);
      remainders[k] = target - counts[k];
      assigned += counts[k];
    }
    if (fraction_sum >= 1.0 - 1e-12) {
      // Largest-remainder top-up keeps each cell within 1 of its target.
      while (assigned < n) {
        int best = 0;
        for (int k = 1; k < 3; ++k) {
          if (remainders[k] > remainders[best]) best = k;
        }
        counts[best]++;
        remainders[best] = -1.0;
        ++assigned;
      }
    }
    int64_t cursor = 0;
    for (int k = 0; k < 3; ++k) {
      for (int64_t i = 0; i < counts[k]; ++i) label[indices[cursor++]] = k;
      result.counts[k] += counts[k];
    }
    result.dropped += n - cursor;
  }

  // Pass 2: stream records to their outputs in input order.
  DatasetReader reader(input_path);
  std::array<std::unique_ptr<DatasetWriter>, 3> writers;
  for (int k = 0; k < 3; ++k) {
    writers[k] =
        std::make_unique<DatasetWriter>(output_paths[k], reader.format(), reader.header());
  }
  int64_t index = 0;
  for (;;) {
    auto raw = reader.next_raw();
    if (!raw) break;
    auto it = label.find(index);
    if (it != label.end()) writers[it->second]->write_raw(*raw);
    ++index;
  }
  for (auto& w : writers) w->close();
  return result;
}

std::string sim_config_to_json(const SimConfig& config) {
  nlohmann::json j;
  j["noise"] = nlohmann::json::parse(config.noise.to_json());
  j["leakage"] = {{"p_leak", config.leakage.p_leak}, {"p_seep", config.leakage.p_seep}};
  j["rounds"] = config.rounds;
  j["shots_per_state_round"] = config.shots_per_state_round;
  j["seed"] = config.seed;
  j["with_truth"] = config.with_truth;
  return j.dump();
}

SimConfig sim_config_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  SimConfig config;
  if (j.contains("noise")) config.noise = NoiseParams::from_json(j["noise"].dump());
  if (j.contains("leakage")) {
    config.leakage.p_leak = j["leakage"].value("p_leak", 0.0);
    config.leakage.p_seep = j["leakage"].value("p_seep", 0.25);
  }
  config.rounds = j.value("rounds", config.rounds);
  config.shots_per_state_round = j.value("shots_per_state_round", config.shots_per_state_round);
  config.seed = j.value("seed", config.seed);
  config.with_truth = j.value("with_truth", config.with_truth);
  return config;
}

}  // namespace softdec
