#pragma once

#include <fstream>
#include <sstream>

#include "delphinet/cli.hpp"
#include "support/nets.hpp"
#include "support/service.hpp"

namespace delphinet::fixture {

/// Runs the CLI in-process and captures its streams.
struct CliRun {
  int code = 0;
  std::string out, err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// One (network, evidence) pair pushed through `delphinet infer` and through
/// the group scenario evaluate route. `agree` holds when both accept with the
/// same posteriors (or both reject); `max_diff` is the largest gap seen.
struct ParityOutcome {
  bool agree = false;
  double max_diff = 0.0;
  std::string detail;
};

/// `group` must be a one-analyst group whose analyst (analyst_id(1), logged
/// in as `token`) has reached the network step.
inline ParityOutcome cli_http_parity(std::mt19937_64& rng, Client& client, const std::string& token,
                                     const std::string& group, const std::filesystem::path& dir, int index) {
  nets::RandomNetOptions o;
  o.max_vars = 8;
  o.max_states = 3;
  auto net = nets::random_network(rng, o);
  auto evidence = nets::random_evidence(rng, net, 3);
  const auto doc = bn::to_json(net);

  auto path = dir / ("parity-" + std::to_string(index) + ".json");
  std::ofstream(path) << doc.dump();
  std::vector<std::string> args = {"infer", path.string(), "--format", "json"};
  std::string targets;
  json outputs = json::array();
  for (const auto& v : net.variables) {
    targets += (targets.empty() ? "" : ",") + v.name;
    outputs.push_back(v.id);
  }
  args.insert(args.end(), {"--targets", targets});
  json scen_evidence = json::object();
  for (const auto& [v, s] : evidence.items()) {
    const auto& name = net.require(v).name;
    args.insert(args.end(), {"-e", name + "=" + s});
    scen_evidence[name] = s;
  }
  auto cli_run = run_cli(args);

  const auto base = "/api/groups/" + group;
  ParityOutcome r;
  auto put = client.request("PUT", base + "/steps/5/work", {{"content", {{"network", doc}}}}, token);
  if (put.status != 200) {
    r.detail = "network upload rejected: " + put.raw;
    return r;
  }
  auto created = client.request(
      "POST", base + "/scenarios",
      {{"scenario", {{"name", "parity " + std::to_string(index)}, {"evidence", scen_evidence}, {"outputs", outputs}}}},
      token);
  if (created.status != 201) {
    r.detail = "scenario rejected: " + created.raw;
    return r;
  }
  auto http = client.request("POST", base + "/scenarios/" + created.body.at("id").get<std::string>() + "/evaluate",
                             nullptr, token);

  if (cli_run.code != cli::kOk || http.status != 200) {
    r.agree = cli_run.code == cli::kRejected && http.status == 422;
    r.detail = "cli exit " + std::to_string(cli_run.code) + " / http " + std::to_string(http.status) + " " + http.raw;
    return r;
  }
  const auto a = json::parse(cli_run.out).at("posteriors");
  const auto& b = http.body.at("posteriors");
  if (a.size() != b.size()) {
    r.detail = "different posterior counts";
    return r;
  }
  r.agree = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].at("id") != b[i].at("id") || a[i].at("states") != b[i].at("states") || a[i].at("dual") != b[i].at("dual")) {
      r.agree = false;
      r.detail = "posterior " + std::to_string(i) + " differs in id, states or rendering";
    }
    const auto& pa = a[i].at("probabilities");
    const auto& pb = b[i].at("probabilities");
    for (std::size_t s = 0; s < pa.size() && s < pb.size(); ++s) {
      r.max_diff = std::max(r.max_diff, std::abs(pa[s].get<double>() - pb[s].get<double>()));
    }
  }
  if (r.max_diff > 1e-12) r.agree = false;
  return r;
}

}  // namespace delphinet::fixture
