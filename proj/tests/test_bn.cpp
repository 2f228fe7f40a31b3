#include <gtest/gtest.h>

#include <random>

#include "delphinet/bn/json_io.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/bn/xmlbif.hpp"
#include "delphinet/samples.hpp"
#include "support/nets.hpp"

using namespace delphinet;
using bn::VariableKind;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(AddVariable, BooleanDefaultsToTrueFalse) {
  auto net = bn::add_variable({}, {"", "Drug Cheat", VariableKind::Boolean, {}, false, "", ""});
  ASSERT_EQ(net.variables.size(), 1u);
  EXPECT_EQ(net.variables[0].states, (std::vector<std::string>{"True", "False"}));
  EXPECT_EQ(net.variables[0].id, "drug_cheat");
  ASSERT_EQ(net.cpts[0].rows.size(), 1u);
  EXPECT_FALSE(net.cpts[0].rows[0][0].has_value());
}

TEST(AddVariable, StateRules) {
  EXPECT_EQ(code_of([] { bn::add_variable({}, {"", "Risk", VariableKind::Ordered, {"Low"}, false, "", ""}); }),
            ErrorCode::InvalidStates);
  EXPECT_EQ(code_of([] {
              bn::add_variable({}, {"", "B", VariableKind::Boolean, {"True", "False", "Maybe"}, false, "", ""});
            }),
            ErrorCode::InvalidStates);
  EXPECT_EQ(code_of([] { bn::add_variable({}, {"", "C", VariableKind::Binary, {"a", "b", "c"}, false, "", ""}); }),
            ErrorCode::InvalidStates);
  EXPECT_EQ(code_of([] { bn::add_variable({}, {"", "D", VariableKind::Unordered, {"a", "a"}, false, "", ""}); }),
            ErrorCode::InvalidStates);
}

TEST(AddVariable, DuplicateName) {
  auto net = bn::add_variable({}, {"", "X", VariableKind::Boolean, {}, false, "", ""});
  EXPECT_EQ(code_of([&] { bn::add_variable(net, {"", "X", VariableKind::Boolean, {}, false, "", ""}); }),
            ErrorCode::DuplicateName);
}

TEST(AddArrow, TwoCycleReportsPath) {
  auto net = nets::boolean_net({"A", "B"});
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  try {
    bn::add_arrow(net, {"B", "A", ""});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CycleError);
    EXPECT_EQ(e.detail(), (std::vector<std::string>{"A", "B", "A"}));
  }
}

TEST(AddArrow, SelfLoopAndDuplicate) {
  auto net = nets::boolean_net({"A", "B"});
  EXPECT_EQ(code_of([&] { bn::add_arrow(net, {"A", "A", ""}); }), ErrorCode::SelfLoop);
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  EXPECT_EQ(code_of([&] { bn::add_arrow(net, {"A", "B", ""}); }), ErrorCode::DuplicateArrow);
  EXPECT_EQ(code_of([&] { bn::add_arrow(net, {"A", "Z", ""}); }), ErrorCode::UnknownVariable);
}

TEST(AddArrow, RekeysChildByParentStates) {
  auto net = samples::drug_cheat();
  EXPECT_EQ(net.cpt("drug_cheat").rows.size(), 3u);
  EXPECT_EQ(net.cpt("sample_a_result").rows.size(), 4u);
}

TEST(AddArrow, ReplicatesExistingRows) {
  auto net = nets::boolean_net({"A", "B"});
  net = bn::set_cpt_entry(std::move(net), "B", 0, "True", 0.8);
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  ASSERT_EQ(net.cpt("B").rows.size(), 2u);
  for (const auto& row : net.cpt("B").rows) {
    EXPECT_EQ(row[0], 0.8);
    EXPECT_FALSE(row[1].has_value());
  }
}

TEST(AddArrow, RandomSequencesStayAcyclic) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = nets::boolean_net({"a", "b", "c", "d", "e", "f"});
    std::uniform_int_distribution<int> pick(0, 5);
    for (int k = 0; k < 30; ++k) {
      std::string from(1, static_cast<char>('a' + pick(rng))), to(1, static_cast<char>('a' + pick(rng)));
      try {
        net = bn::add_arrow(net, {from, to, ""});
      } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::CycleError || e.code() == ErrorCode::SelfLoop ||
                    e.code() == ErrorCode::DuplicateArrow)
            << e.what();
      }
      ASSERT_TRUE(bn::topological_order(net).has_value());
    }
    EXPECT_TRUE(bn::validate_network(net).ok());
  }
}

TEST(SetCptEntry, Basics) {
  auto net = nets::chain();
  net = bn::set_cpt_entry(std::move(net), "B", {{"A", "True"}}, "False", std::nullopt);
  EXPECT_EQ(net.cpt("B").rows[0][0], 0.8);
  EXPECT_FALSE(net.cpt("B").rows[0][1].has_value());

  auto three = bn::add_variable({}, {"", "T", VariableKind::Unordered, {"x", "y"}, false, "", ""});
  three = bn::set_cpt_entry(std::move(three), "t", 0, "x", 0.7);
  EXPECT_EQ(code_of([&] { bn::set_cpt_entry(three, "t", 0, "y", 0.5); }), ErrorCode::RowOverflow);
  EXPECT_EQ(code_of([&] { bn::set_cpt_entry(three, "t", 0, "y", 1.2); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { bn::set_cpt_entry(three, "t", 0, "z", 0.1); }), ErrorCode::UnknownState);
}

TEST(CompleteCpt, ResidualExamples) {
  auto net = bn::add_variable({}, {"", "R", VariableKind::Unordered, {"a", "b", "c"}, false, "", ""});
  auto done = bn::complete_cpt(net);
  for (auto cell : done.cpts[0].rows[0]) EXPECT_DOUBLE_EQ(*cell, 1.0 / 3.0);

  net = bn::set_cpt_entry(std::move(net), "r", 0, "a", 0.4);
  done = bn::complete_cpt(net);
  EXPECT_DOUBLE_EQ(*done.cpts[0].rows[0][0], 0.4);
  EXPECT_DOUBLE_EQ(*done.cpts[0].rows[0][1], 0.3);
  EXPECT_DOUBLE_EQ(*done.cpts[0].rows[0][2], 0.3);
}

TEST(CompleteCpt, RenormalizesWithinTolerance) {
  auto net = bn::add_variable({}, {"", "S", VariableKind::Binary, {"t", "f"}, false, "", ""});
  net.cpts[0].rows[0] = {0.5, 0.499999};
  auto done = bn::complete_cpt(net);
  EXPECT_NEAR(*done.cpts[0].rows[0][0] + *done.cpts[0].rows[0][1], 1.0, 1e-12);
  net.cpts[0].rows[0] = {0.5, 0.4};
  EXPECT_EQ(code_of([&] { bn::complete_cpt(net); }), ErrorCode::RowSumError);
}

TEST(CompleteCpt, IdempotentAndKeepsSpecifiedCells) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    auto net = bn::add_variable({}, {"", "V", VariableKind::Unordered, {"a", "b", "c", "d"}, false, "", ""});
    double budget = 1.0;
    const auto& states = net.variables[0].states;
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
      const auto& s = states[i];
      if (unit(rng) < 0.5) {
        double p = unit(rng) * budget;
        net = bn::set_cpt_entry(std::move(net), "v", 0, s, p);
        budget -= p;
      }
    }
    auto once = bn::complete_cpt(net);
    auto twice = bn::complete_cpt(once);
    EXPECT_EQ(once, twice);
    for (std::size_t s = 0; s < 4; ++s) {
      if (net.cpts[0].rows[0][s] && std::count(net.cpts[0].rows[0].begin(), net.cpts[0].rows[0].end(),
                                               std::nullopt) > 0) {
        EXPECT_EQ(once.cpts[0].rows[0][s], net.cpts[0].rows[0][s]);
      }
    }
  }
}

TEST(Rekeying, ParentAdditionPreservesMarginalizedDistribution) {
  auto net = nets::boolean_net({"A", "B"});
  net = bn::add_variable(std::move(net), {"C", "C", VariableKind::Unordered, {"x", "y", "z"}, false, "", ""});
  net = bn::set_cpt_row(std::move(net), "C", 0, {0.2, 0.5, 0.3});
  net = bn::add_arrow(std::move(net), {"A", "C", ""});
  net = bn::add_arrow(std::move(net), {"B", "C", ""});
  const auto& rows = net.cpt("C").rows;
  for (std::size_t s = 0; s < 3; ++s) {
    double mean = 0.0;
    for (const auto& r : rows) mean += *r[s] / static_cast<double>(rows.size());
    const std::vector<double> expected{0.2, 0.5, 0.3};
    EXPECT_DOUBLE_EQ(mean, expected[s]);
  }
}

TEST(RemoveVariable, CascadesAndMarginalizes) {
  auto net = nets::chain();
  net = bn::remove_variable(std::move(net), "A");
  ASSERT_EQ(net.variables.size(), 1u);
  EXPECT_TRUE(net.arrows.empty());
  EXPECT_TRUE(net.cpt("B").parents.empty());
  EXPECT_DOUBLE_EQ(*net.cpt("B").rows[0][0], 0.5);
  EXPECT_TRUE(bn::validate_network(net).ok());
}

TEST(RemoveArrow, PartialCellsStayUnspecified) {
  auto net = nets::boolean_net({"A", "B"});
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  net = bn::set_cpt_entry(std::move(net), "B", 0, "True", 0.9);
  net = bn::remove_arrow(std::move(net), "A", "B");
  EXPECT_FALSE(net.cpt("B").rows[0][0].has_value());
  EXPECT_EQ(code_of([&] { bn::remove_arrow(net, "A", "B"); }), ErrorCode::UnknownArrow);
}

TEST(Renames, ByIdKeepStructure) {
  auto net = samples::drug_cheat();
  net = bn::rename_variable(std::move(net), "event", "Sport");
  EXPECT_EQ(net.require("event").name, "Sport");
  EXPECT_TRUE(net.has_arrow("event", "drug_cheat"));
  net = bn::rename_state(std::move(net), "taking_m879", "Yes", "Taking");
  EXPECT_EQ(net.cpt("taking_m879").rows[0][0], 0.02);
  EXPECT_EQ(code_of([&] { bn::rename_variable(net, "event", "Drug Cheat"); }), ErrorCode::DuplicateName);
}

TEST(SetStates, ResetsOwnAndChildCpts) {
  auto net = samples::drug_cheat();
  net = bn::set_states(std::move(net), "event", VariableKind::Unordered, {"Weightlifting", "Running"});
  EXPECT_EQ(net.cpt("drug_cheat").rows.size(), 2u);
  EXPECT_FALSE(net.cpt("drug_cheat").rows[0][0].has_value());
  EXPECT_FALSE(net.cpt("event").rows[0][0].has_value());
  EXPECT_TRUE(bn::validate_network(net).ok());
}

TEST(Validate, DrugCheatHasTopologicalOrder) {
  auto report = bn::validate_network(samples::drug_cheat());
  EXPECT_TRUE(report.ok());
  ASSERT_TRUE(report.topological_order);
  const auto& order = *report.topological_order;
  auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
  EXPECT_LT(pos("event"), pos("drug_cheat"));
  EXPECT_LT(pos("drug_cheat"), pos("sample_a_result"));
}

TEST(Validate, UnspecifiedIsLegalOverflowIsNot) {
  auto net = nets::diamond();
  EXPECT_TRUE(bn::validate_network(net).ok());
  net.cpts[0].rows[0] = {0.7, 0.5};
  auto report = bn::validate_network(net);
  ASSERT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(report.findings[0].code, ErrorCode::RowOverflow);
}

TEST(Validate, ReportsCycleInDocument) {
  auto net = nets::chain();
  net.arrows.push_back({"B", "A", ""});
  net.cpts[0].parents.push_back("B");
  net.cpts[0].rows.push_back(net.cpts[0].rows[0]);
  auto report = bn::validate_network(net);
  ASSERT_FALSE(report.ok());
  EXPECT_FALSE(report.topological_order.has_value());
  EXPECT_TRUE(std::any_of(report.findings.begin(), report.findings.end(),
                          [](const bn::Finding& f) { return f.code == ErrorCode::CycleError; }));
}

TEST(JsonIo, RoundTripPreservesUnspecifiedCells) {
  auto net = samples::drug_cheat();
  net = bn::set_cpt_entry(std::move(net), "taking_m879", 0, "No", std::nullopt);
  net.canvas_labels.push_back({"note", 1.5, 2.5});
  auto doc = bn::to_json(net);
  EXPECT_EQ(doc.at("format"), bn::kNetworkFormat);
  EXPECT_TRUE(doc.at("cpts")[2].at("rows")[0].at("p")[1].is_null());
  EXPECT_EQ(bn::network_from_json(doc), net);
}

TEST(JsonIo, RejectsUnknownParent) {
  auto doc = bn::to_json(nets::chain());
  doc["cpts"][1]["parents"] = {"Z"};
  EXPECT_EQ(code_of([&] { bn::network_from_json(doc); }), ErrorCode::InvalidDocument);
}

TEST(XmlBif, RoundTrip) {
  auto net = bn::complete_cpt(samples::drug_cheat());
  auto text = bn::write_xmlbif(net);
  auto back = bn::read_xmlbif_string(text);
  ASSERT_EQ(back.variables.size(), net.variables.size());
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const auto& v = net.variables[i];
    const auto* w = back.find_by_name(v.name);
    ASSERT_NE(w, nullptr);
    EXPECT_EQ(w->states, v.states);
    const auto& a = net.cpt(v.id);
    const auto& b = back.cpt(w->id);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      for (std::size_t s = 0; s < a.rows[r].size(); ++s) EXPECT_DOUBLE_EQ(*a.rows[r][s], *b.rows[r][s]);
    }
  }
  EXPECT_EQ(back.arrows.size(), net.arrows.size());
  EXPECT_EQ(back.find_by_name("Drug Cheat")->kind, VariableKind::Boolean);
}

TEST(XmlBif, MalformedInput) {
  EXPECT_EQ(code_of([] { bn::read_xmlbif_string("<BIF><NETWORK>"); }), ErrorCode::InvalidDocument);
}
