// Walks through the doping-test example: enters the evidence one item at a
// time and prints the posterior of Drug Cheat with its verbal descriptor.
#include <iostream>

#include "delphinet/inference/elimination.hpp"
#include "delphinet/samples.hpp"
#include "delphinet/verbal.hpp"

int main() {
  using namespace delphinet;
  auto net = samples::drug_cheat();
  inference::Evidence evidence;
  auto show = [&](const std::string& label) {
    double p = inference::posterior(net, evidence, {"Drug Cheat"}).front().at("True");
    std::cout << label << ": P(Drug Cheat = True) = " << verbal::dual(p) << "\n";
  };
  show("no evidence");
  for (const auto& [variable, state] : samples::drug_cheat_evidence()) {
    evidence.set(variable, state);
    show("+ " + variable + " = " + state);
  }
}
