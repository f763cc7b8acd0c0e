#pragma once

#include <iosfwd>
#include <vector>

#include "tactile/env.hpp"
#include "tactile/replay.hpp"

// JSON-lines trajectory format, one transition per line:
//
//   {"episode":3,"t":0,"obs":[...],"goal":[...],"action":[...],"reward":0.0,
//    "next_obs":[...],"achieved_next":[...],"force_sum_next":0.0}
//
// Observations use the full flat layout (force channels included). Doubles
// are printed with round-trip precision, so reading back is bit-exact.
namespace tactile {

void write_episode_jsonl(std::ostream& out, const Episode& episode, const ObservationLayout& layout);
void dump_buffer_jsonl(std::ostream& out, const EpisodeBuffer& buffer, const ObservationLayout& layout);

// Groups lines by episode id, preserving first-seen order.
std::vector<Episode> read_episodes_jsonl(std::istream& in, const ObservationLayout& layout);

}  // namespace tactile
