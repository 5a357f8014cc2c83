#include <gtest/gtest.h>

#include "galign/dsl.hpp"
#include "testing/random_graph.hpp"
#include "testing/support.hpp"

using namespace galign;

TEST(RoundTrip, ReferenceModel) {
  auto g = galign::testing::reference_model();
  std::string text = serialize_model(g);
  auto again = parse_model(text);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again.graph->parts(), g.parts());
  EXPECT_EQ(serialize_model(*again.graph), text);
  EXPECT_EQ(serialize_model(g), text);
}

TEST(RoundTrip, RandomGraphs) {
  galign::testing::RandomGraphConfig config;
  config.rich_text = true;
  for (int i = 0; i < 500; ++i) {
    std::mt19937_64 rng(9000 + static_cast<std::uint64_t>(i));
    auto g = galign::testing::random_graph(rng, config);
    std::string text = serialize_model(g);
    auto again = parse_model(text);
    ASSERT_TRUE(again.errors.empty()) << "case " << i << ": "
                                      << format_parse_error("<serialized>", again.errors.front()) << "\n"
                                      << text;
    ASSERT_TRUE(again.ok()) << "case " << i;
    ASSERT_EQ(again.graph->parts(), g.parts()) << "case " << i << "\n" << text;
    ASSERT_EQ(serialize_model(*again.graph), text) << "case " << i;
  }
}

TEST(RoundTrip, SerializationIgnoresInputOrder) {
  for (int i = 0; i < 100; ++i) {
    std::mt19937_64 rng(500 + static_cast<std::uint64_t>(i));
    auto parts = galign::testing::random_parts(rng);
    auto shuffled = parts;
    std::shuffle(shuffled.requirements.begin(), shuffled.requirements.end(), rng);
    std::shuffle(shuffled.decompositions.begin(), shuffled.decompositions.end(), rng);
    std::shuffle(shuffled.traces.begin(), shuffled.traces.end(), rng);
    ASSERT_EQ(serialize_model(galign::testing::rebuild(parts)), serialize_model(galign::testing::rebuild(shuffled)));
  }
}
