#include "swarm/record_io.hpp"

#include <fstream>
#include <sstream>

#include "swarm/errors.hpp"

namespace swarm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<Trigger> parse_trigger(std::string_view s) {
  for (Trigger t : {Trigger::None, Trigger::HittingWall, Trigger::HittingOthers, Trigger::AtOuterCorner}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

FsmState parse_fsm(std::string_view s) {
  if (s == to_string(FsmState::JustStarted)) return FsmState::JustStarted;
  if (s == to_string(FsmState::FollowingWall)) return FsmState::FollowingWall;
  throw ValidationError("unknown fsm state '" + std::string(s) + "'");
}

}  // namespace

ordered_json pose_to_json(const Pose& p) {
  return {{"x", p.cell.x}, {"y", p.cell.y}, {"heading", p.heading.degrees()}};
}

Pose pose_from_json(const json& j) {
  const int deg = j.at("heading").get<int>();
  if (deg < 0 || deg >= 360 || deg % 45 != 0) throw ValidationError("heading must be a multiple of 45 in [0, 360)");
  return {{j.at("x").get<int>(), j.at("y").get<int>()}, Heading::from_degrees_exact(deg)};
}

ordered_json sample_to_json(const Sample& s) {
  ordered_json j;
  j["action_count"] = s.action_count;
  j["total_coverage"] = s.total_coverage;
  j["per_robot_coverage"] = s.per_robot_coverage;
  j["crash_count"] = s.crash_count;
  return j;
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.action_count = j.at("action_count").get<int>();
  s.total_coverage = j.at("total_coverage").get<double>();
  s.per_robot_coverage = j.at("per_robot_coverage").get<std::vector<double>>();
  s.crash_count = j.at("crash_count").get<int>();
  return s;
}

ordered_json trace_event_to_json(const TraceEvent& e) {
  ordered_json j;
  j["tick"] = e.tick;
  j["robot"] = e.robot;
  j["before"] = pose_to_json(e.before);
  j["after"] = pose_to_json(e.after);
  if (e.action.type == Action::Type::Turn) {
    j["action"] = {{"type", "turn"}, {"target", e.action.target}};
  } else {
    j["action"] = {{"type", "go_straight"}};
  }
  j["trigger"] = e.trigger == Trigger::None ? ordered_json(nullptr) : ordered_json(std::string(to_string(e.trigger)));
  j["fsm_before"] = std::string(to_string(e.fsm_before));
  j["fsm_after"] = std::string(to_string(e.fsm_after));
  j["smell"] = e.smell ? ordered_json(*e.smell) : ordered_json(nullptr);
  return j;
}

TraceEvent trace_event_from_json(const json& j) {
  TraceEvent e;
  e.tick = j.at("tick").get<int>();
  e.robot = j.at("robot").get<int>();
  e.before = pose_from_json(j.at("before"));
  e.after = pose_from_json(j.at("after"));
  const auto& a = j.at("action");
  const auto type = a.at("type").get<std::string>();
  if (type == "turn") {
    e.action = Action::turn(a.at("target").get<double>());
  } else if (type == "go_straight") {
    e.action = Action::go_straight();
  } else {
    throw ValidationError("unknown action type '" + type + "'");
  }
  if (!j.at("trigger").is_null()) {
    const auto t = parse_trigger(j.at("trigger").get<std::string>());
    if (!t) throw ValidationError("unknown trigger");
    e.trigger = *t;
  }
  e.fsm_before = parse_fsm(j.at("fsm_before").get<std::string>());
  e.fsm_after = parse_fsm(j.at("fsm_after").get<std::string>());
  if (!j.at("smell").is_null()) e.smell = j.at("smell").get<std::uint32_t>();
  return e;
}

namespace {

void put_key(ordered_json& j, const RunKey& key, const SimConfig& config) {
  j["config"] = key.config;
  j["site_index"] = key.site_index;
  j["algorithm"] = std::string(canonical_name(key.algorithm));
  j["n_robots"] = key.n_robots;
  j["departure"] = std::string(to_string(key.departure));
  j["seed"] = key.seed;
  j["max_actions_per_robot"] = config.max_actions_per_robot;
  j["sample_interval"] = config.sample_interval;
  j["revisit_threshold"] = config.revisit_threshold;
  j["bias"] = config.bias;
}

void put_outcome(ordered_json& j, const RunRecord& record) {
  j["actions_per_robot"] = record.actions_per_robot;
  j["final_coverage"] = record.final_coverage;
  j["terminated_early"] = record.terminated_early;
  j["crash_count"] = record.crash_count;
  j["rooms_total"] = record.rooms_total;
  j["rooms_entered"] = record.rooms_entered;
  ordered_json found = ordered_json::array();
  for (const VictimFind& v : record.victims_found) {
    found.push_back({{"victim", v.victim}, {"action_count", v.action_count}});
  }
  j["victims_found"] = std::move(found);
}

}  // namespace

ordered_json summary_to_json(const RunKey& key, const SimConfig& config, const RunRecord& record) {
  ordered_json j;
  put_key(j, key, config);
  put_outcome(j, record);
  ordered_json poses = ordered_json::array();
  for (const Pose& p : record.initial_poses) poses.push_back(pose_to_json(p));
  j["initial_poses"] = std::move(poses);
  return j;
}

std::string samples_to_jsonl(const RunRecord& record) {
  std::string out;
  for (const Sample& s : record.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const TraceEvent& e : trace) {
    out += trace_event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> trace_from_jsonl(std::string_view text) {
  std::vector<TraceEvent> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ValidationError("trace line " + std::to_string(line_no) + " is not valid JSON");
    try {
      events.push_back(trace_event_from_json(j));
    } catch (const json::exception& e) {
      throw ValidationError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

ordered_json archive_entry(const RunKey& key, const SimConfig& config, const RunRecord& record) {
  ordered_json j;
  put_key(j, key, config);
  put_outcome(j, record);
  ordered_json samples = ordered_json::array();
  for (const Sample& s : record.samples) samples.push_back(sample_to_json(s));
  j["samples"] = std::move(samples);
  ordered_json poses = ordered_json::array();
  for (const Pose& p : record.initial_poses) poses.push_back(pose_to_json(p));
  j["initial_poses"] = std::move(poses);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace swarm
