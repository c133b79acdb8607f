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

#ifndef SOFTDEC_DATASET_H
#define SOFTDEC_DATASET_H

#include <array>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "softdec/layout.h"
#include "softdec/sim.h"

namespace softdec {

enum class DatasetFormat { kJsonl, kBinary };

/// Header written before any record; both formats carry the same fields.
struct DatasetHeader {
  int version = 1;
  int num_ancillas = 0;
  int num_data = 0;
  uint64_t layout_hash = 0;
  /// Echo of the generating configuration (JSON text) and its hash.
  std::string config_json = "{}";
  uint64_t config_hash = 0;

  std::string to_json() const;
  static DatasetHeader from_json(const std::string& json_text);
};

std::string shot_to_json_line(const ShotRecord& record, const CodeLayout& layout);
ShotRecord shot_from_json_line(const std::string& line, const CodeLayout& layout);

std::string shot_to_binary(const ShotRecord& record);
ShotRecord shot_from_binary(const std::string& bytes, int num_ancillas, int num_data);

/// Ordered sink for shot records.
class DatasetWriter {
 public:
  /// Raw-copy writer (write_raw only).
  DatasetWriter(const std::string& path, DatasetFormat format, const DatasetHeader& header);
  DatasetWriter(const std::string& path, DatasetFormat format, const DatasetHeader& header,
                const CodeLayout& layout);
  void write(const ShotRecord& record);
  /// Writes a pre-serialized record (must match the writer's format).
  void write_raw(const std::string& serialized);
  void close();

  static std::string serialize(const ShotRecord& record, DatasetFormat format,
                               const CodeLayout& layout);

 private:
  std::ofstream out_;
  DatasetFormat format_;
  std::optional<CodeLayout> layout_;
};

/// Streaming reader; sniffs the format from the first bytes.
class DatasetReader {
 public:
  explicit DatasetReader(const std::string& path);
  const DatasetHeader& header() const { return header_; }
  DatasetFormat format() const { return format_; }
  /// Next record, parsed against the given layout.
  std::optional<ShotRecord> next(const CodeLayout& layout);
  /// Next record as raw serialized bytes (no trailing newline for JSONL;
  /// length-prefixed block for binary).
  std::optional<std::string> next_raw();

 private:
  std::ifstream in_;
  DatasetFormat format_ = DatasetFormat::kJsonl;
  DatasetHeader header_;
};

/// Simulates shots for every (initial state, rounds) cell and streams them
/// to `path` in shot-id order. Deterministic for a fixed config, including
/// across different job counts.
void generate_dataset(const SimConfig& config, const CodeLayout& layout, const ModelSet& models,
                      const std::string& path, DatasetFormat format, int jobs,
                      const std::string& config_echo_json);

struct SplitResult {
  std::array<int64_t, 3> counts{0, 0, 0};
  int64_t dropped = 0;
};

/// Stratified split by (initial state, rounds): each cell is shuffled with a
/// per-cell substream of `seed` and divided per `fractions` (train,
/// validation, test), every cell within one record of its target.
SplitResult heralded_split(const std::string& input_path,
                           const std::array<double, 3>& fractions, uint64_t seed,
                           const std::array<std::string, 3>& output_paths);

std::string sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const std::string& json_text);

}  // namespace softdec

#endif
