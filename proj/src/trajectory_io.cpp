#include "tactile/trajectory_io.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "tactile/errors.hpp"

namespace tactile {

using nlohmann::json;

void write_episode_jsonl(std::ostream& out, const Episode& ep, const ObservationLayout& layout) {
  for (int t = 0; t < ep.length(); ++t) {
    const Transition& tr = ep.transitions[static_cast<std::size_t>(t)];
    json line{
        {"episode", ep.id},
        {"t", t},
        {"obs", tr.obs.flatten(layout)},
        {"goal", tr.goal.position},
        {"action", tr.action},
        {"reward", tr.reward},
        {"next_obs", tr.next_obs.flatten(layout)},
        {"achieved_next", tr.achieved_next.position},
        {"force_sum_next", tr.force_sum_next},
    };
    out << line.dump() << '\n';
  }
}

void dump_buffer_jsonl(std::ostream& out, const EpisodeBuffer& buffer, const ObservationLayout& layout) {
  for (const Episode& ep : buffer.episodes()) write_episode_jsonl(out, ep, layout);
}

std::vector<Episode> read_episodes_jsonl(std::istream& in, const ObservationLayout& layout) {
  std::vector<Episode> episodes;
  std::map<std::uint64_t, std::size_t> slot;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto id = j.at("episode").get<std::uint64_t>();
      auto [it, fresh] = slot.try_emplace(id, episodes.size());
      if (fresh) {
        episodes.emplace_back();
        episodes.back().id = id;
      }
      Episode& ep = episodes[it->second];
      if (j.at("t").get<int>() != ep.length()) throw DataError("transitions out of order");
      Transition tr;
      tr.obs = Observation::unflatten(j.at("obs").get<std::vector<double>>(), layout);
      tr.goal.position = j.at("goal").get<std::vector<double>>();
      tr.action = j.at("action").get<std::vector<double>>();
      tr.reward = j.at("reward").get<double>();
      tr.next_obs = Observation::unflatten(j.at("next_obs").get<std::vector<double>>(), layout);
      tr.achieved_next.position = j.at("achieved_next").get<std::vector<double>>();
      if (j.contains("force_sum_next") && !j["force_sum_next"].is_null())
        tr.force_sum_next = j["force_sum_next"].get<double>();
      ep.transitions.push_back(std::move(tr));
    } catch (const json::exception& e) {
      throw DataError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return episodes;
}

}  // namespace tactile
