#include <gtest/gtest.h>

#include <random>

#include "delphinet/verbal.hpp"

using namespace delphinet;
using verbal::Descriptor;

TEST(ToDescriptor, BoundaryPoints) {
  const std::vector<std::pair<double, Descriptor>> cases = {
      {0.0, Descriptor::NoChance},
      {1e-9, Descriptor::AlmostNoChance},
      {0.05, Descriptor::AlmostNoChance},
      {0.050001, Descriptor::VeryUnlikely},
      {0.20, Descriptor::VeryUnlikely},
      {0.200001, Descriptor::Unlikely},
      {0.45, Descriptor::Unlikely},
      {0.450001, Descriptor::RoughlyEvenChance},
      {0.50, Descriptor::RoughlyEvenChance},
      {0.55, Descriptor::RoughlyEvenChance},
      {0.550001, Descriptor::Likely},
      {0.80, Descriptor::Likely},
      {0.800001, Descriptor::VeryLikely},
      {0.95, Descriptor::VeryLikely},
      {0.950001, Descriptor::AlmostCertain},
      {0.999999, Descriptor::AlmostCertain},
      {1.0, Descriptor::Certain},
  };
  for (const auto& [p, d] : cases) EXPECT_EQ(verbal::to_descriptor(p), d) << p;
}

TEST(ToDescriptor, OutOfRange) {
  EXPECT_THROW(verbal::to_descriptor(-0.01), Error);
  EXPECT_THROW(verbal::to_descriptor(1.01), Error);
  EXPECT_THROW(verbal::to_descriptor(std::nan("")), Error);
}

TEST(Names, ExactTableStrings) {
  std::vector<std::string> names;
  for (auto d : verbal::kAllDescriptors) names.emplace_back(verbal::name(d));
  EXPECT_EQ(names, (std::vector<std::string>{"No Chance", "Almost No Chance", "Very Unlikely", "Unlikely",
                                              "Roughly Even Chance", "Likely", "Very Likely", "Almost Certain",
                                              "Certain"}));
}

TEST(FromDescriptor, MidpointsAndRoundTrip) {
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::Likely), 0.675);
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::NoChance), 0.0);
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::RoughlyEvenChance), 0.5);
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::AlmostNoChance), 0.025);
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::AlmostCertain), 0.975);
  EXPECT_DOUBLE_EQ(verbal::from_descriptor(Descriptor::Certain), 1.0);
  for (auto d : verbal::kAllDescriptors) EXPECT_EQ(verbal::to_descriptor(verbal::from_descriptor(d)), d);
}

TEST(Partition, ExactlyOneBandPerSample) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    double p = unit(rng);
    int matches = 0;
    for (auto d : verbal::kAllDescriptors) matches += verbal::contains(d, p);
    ASSERT_EQ(matches, 1) << p;
    ASSERT_TRUE(verbal::contains(verbal::to_descriptor(p), p));
  }
}

TEST(ParseInput, Percentages) {
  EXPECT_DOUBLE_EQ(verbal::parse_probability_input("32.41", verbal::InputMode::Percentage), 0.3241);
  EXPECT_DOUBLE_EQ(verbal::parse_probability_input(" 50% ", verbal::InputMode::Percentage), 0.5);
  try {
    verbal::parse_probability_input("12x", verbal::InputMode::Percentage);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    ASSERT_EQ(e.detail().size(), 1u);
    EXPECT_EQ(e.detail()[0], "2");
  }
  EXPECT_THROW(verbal::parse_probability_input("120", verbal::InputMode::Percentage), Error);
}

TEST(ParseInput, Descriptors) {
  EXPECT_DOUBLE_EQ(verbal::parse_probability_input("likely", verbal::InputMode::Descriptor), 0.675);
  EXPECT_DOUBLE_EQ(verbal::parse_probability_input("ROUGHLY even chance", verbal::InputMode::Descriptor), 0.5);
  try {
    verbal::parse_probability_input("maybe", verbal::InputMode::Descriptor);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownDescriptor);
  }
}

TEST(Dual, RendersBoth) {
  EXPECT_EQ(verbal::dual(0.0233), "Almost No Chance (2.33%)");
  EXPECT_EQ(verbal::dual(0.3241), "Unlikely (32.41%)");
  EXPECT_EQ(verbal::dual(1.0 - 1e-15), "Certain (100.00%)");
}
