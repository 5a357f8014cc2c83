#pragma once

#include <optional>
#include <string>
#include <vector>

#include "galign/model.hpp"

namespace galign {

enum class PromptKind { WhyNeeded, WhichMetric, GapRemaining, MissingField };

struct Prompt {
  std::string subject;  // node id
  PromptKind kind = PromptKind::WhyNeeded;
  std::string question;
  std::optional<Quantity> gap;  // GapRemaining only

  bool operator==(const Prompt&) const = default;
};

// Abstraction questions for under-linked and under-specified elements, ordered
// by node id then kind. Question texts are fixed templates:
//
//   WhyNeeded     Why is '<headline>' needed? Which business objective's scale does it move?
//   WhichMetric   What higher objective does satisfying '<label>' serve, and by how much on whose scale?
//   GapRemaining  names the remaining gap toward an objective and asks what else contributes
//   MissingField  '<label>' has no <field>[, <field>...]; can it be supplied?
//
// A requirement is asked WhyNeeded when it has no decomposition parent and
// neither it nor any descendant has an outgoing contribution. Gaps use face-value incoming amounts.
std::vector<Prompt> generate_prompts(const GoalGraph& graph);

const char* to_string(PromptKind kind);  // "why_needed", ...

}  // namespace galign
