#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "swarm/engine.hpp"

namespace swarm {

/// Identifies a run inside summaries and archives.
struct RunKey {
  std::string config;  // site preset name, or "custom"
  int site_index = 0;
  AlgorithmKind algorithm = AlgorithmKind::UsingGasAndSound;
  int n_robots = 2;
  Departure departure = Departure::Center;
  std::uint64_t seed = 0;

  friend bool operator==(const RunKey&, const RunKey&) = default;
};

nlohmann::ordered_json pose_to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j);

nlohmann::ordered_json sample_to_json(const Sample& s);
Sample sample_from_json(const nlohmann::json& j);

nlohmann::ordered_json trace_event_to_json(const TraceEvent& e);
TraceEvent trace_event_from_json(const nlohmann::json& j);

/// Summary object: run key, limits and outcome (no samples, no trace).
nlohmann::ordered_json summary_to_json(const RunKey& key, const SimConfig& config, const RunRecord& record);

/// One JSON object per line, each line terminated by '\n'.
std::string samples_to_jsonl(const RunRecord& record);
std::string trace_to_jsonl(const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> trace_from_jsonl(std::string_view text);

/// Archive line for batch output: key plus samples and outcome.
nlohmann::ordered_json archive_entry(const RunKey& key, const SimConfig& config, const RunRecord& record);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace swarm
