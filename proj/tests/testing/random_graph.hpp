#pragma once

#include <random>

#include "galign/model.hpp"

namespace galign::testing {

struct RandomGraphConfig {
  int min_nodes = 3;
  int max_nodes = 12;  // requirements plus objectives
  int max_incoming = 3;
  bool or_groups = true;
  bool and_links = true;
  bool decompositions = true;  // forest: a requirement has at most one parent
  bool authors = true;
  bool exclusions = true;       // some requirements start excluded
  bool uncapped = false;        // every magnitude >= its face-value incoming sum
  bool tree = false;            // every node has at most one outgoing contribution
  bool absolute_units = true;
  bool canonical_confidence = false;
  bool rich_text = false;       // optional fields and awkward strings, for round trips
};

// Always satisfies every Error-level invariant.
GraphParts random_parts(std::mt19937_64& rng, const RandomGraphConfig& config = {});
GoalGraph random_graph(std::mt19937_64& rng, const RandomGraphConfig& config = {});

}  // namespace galign::testing
