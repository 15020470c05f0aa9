#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "margame/dynamics.hpp"
#include "margame/report.hpp"

#ifndef MARGAME_CLI
#error "MARGAME_CLI must name the margame executable"
#endif

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with the fixture graph; stderr is discarded unless asked for.
Run cli(const std::string& args, bool with_stderr = false) {
  const std::string cmd = std::string("'") + MARGAME_CLI + "' " + args +
                          (with_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string graph = std::string("--graph '") + MARGAME_FIXTURE + "' ";

void write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

// True hop distances to DB with vm1 reported one hop too close.
const char* misleading_estimates =
    "source,destination,predicted_distance\n"
    "A,DB,4\nvm1,DB,2\nvm2,DB,3\nvm3,DB,3\nvm4,DB,3\n"
    "vm5,DB,2\nvm6,DB,2\nvm7,DB,2\nvm8,DB,1\nvm9,DB,1\n";

}  // namespace

TEST_CASE("validate and paths") {
  auto r = cli(graph + "validate");
  CHECK(r.code == 0);
  CHECK(r.out == "10 nodes, 5 hosts, 18 edges, OK\n");
  r = cli(graph + "paths");
  CHECK(r.code == 0);
  CHECK(r.out.find("SAP: A vm2 vm5 vm9 DB (4 hops)") != std::string::npos);
  r = cli(graph + "--format json paths --objective sum_max");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["best"]["nodes"] == json({"A", "vm1", "vm3", "vm5", "vm7", "vm9", "vm6", "vm8", "DB"}));
  r = cli(graph + "paths --dot");
  CHECK(r.code == 0);
  CHECK(r.out.find("vm9 -> DB") != std::string::npos);
}

TEST_CASE("build-game CSV matches the library and the published tables") {
  const auto r = cli(graph + "--format csv build-game");
  REQUIRE(r.code == 0);
  const auto matrices = margame::parse_payoff_csv(r.out);
  const auto game = margame::build_markov_game(cloud10(), 2, 0.9);
  REQUIRE(matrices.size() == 4);
  for (std::size_t q = 0; q < 4; ++q) CHECK(matrices[q] == game.payoffs[q].attacker_reward);
  CHECK(r.out.find("s3,no-def,Def-h3,Def-h5\nno-att,0,2,2\nE(vm6),9,-7,11\nE(DB),10,12,-8\n") !=
        std::string::npos);

  const auto cheap = cli(graph + "--c-def 0 --format csv build-game");
  REQUIRE(cheap.code == 0);
  CHECK(cheap.out.find("no-att,0,0,0") != std::string::npos);
}

TEST_CASE("--out writes the same bytes as stdout") {
  const std::string file = "cli_out_test.csv";
  const auto direct = cli(graph + "--format csv transitions");
  REQUIRE(cli(graph + "--format csv --out " + file + " transitions").code == 0);
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == direct.out);
  std::remove(file.c_str());
}

TEST_CASE("transitions and solve") {
  auto r = cli(graph + "transitions");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.1867") != std::string::npos);
  r = cli(graph + "transitions --dot");
  CHECK(r.out.rfind("digraph", 0) == 0);
  r = cli(graph + "--format json solve");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["states"][0]["value"].get<double>() == doctest::Approx(19.9659).epsilon(1e-4));
  CHECK(j["states"][4]["value"].get<double>() == 0.0);
  r = cli(graph + "--discount 0 --format json solve");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["iterations"].get<int>() <= 2);
}

TEST_CASE("simulate is seed deterministic") {
  const auto a = cli(graph + "--seed 5 --format json simulate --episodes 3000");
  const auto b = cli(graph + "--seed 5 --format json simulate --episodes 3000 --threads 1");
  const auto c = cli(graph + "--seed 6 --format json simulate --episodes 3000");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const json j = json::parse(a.out);
  CHECK(j["mean_attacker_return"].get<double>() == -j["mean_defender_return"].get<double>());
  CHECK(j["base_seed"] == 5);
}

TEST_CASE("simulate comparison and traces") {
  auto r = cli(graph + "--format csv simulate --episodes 5000 --attacker greedy --compare urs,maxmin");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  CHECK(first.rfind("maxmin,", 0) == 0);
  CHECK(second.rfind("urs,", 0) == 0);

  const std::string trace = "cli_trace_test.jsonl";
  r = cli(graph + "--seed 3 simulate --episodes 2 --trace " + trace);
  REQUIRE(r.code == 0);
  std::ifstream t(trace);
  std::string line;
  std::size_t count = 0;
  while (std::getline(t, line)) {
    const json step = json::parse(line);
    CHECK((step["seed"] == 3 || step["seed"] == 4));
    ++count;
  }
  CHECK(count > 0);
  std::remove(trace.c_str());
}

TEST_CASE("exit codes") {
  CHECK(cli(graph + "validate").code == 0);
  CHECK(cli("validate").code == 2);
  CHECK(cli(graph).code == 2);
  CHECK(cli(graph + "--bogus validate").code == 2);
  CHECK(cli("--graph /nonexistent/g.json validate").code == 2);
  CHECK(cli(graph + "--c-def -1 build-game").code == 2);
  CHECK(cli(graph + "--discount 1 solve").code == 2);
  CHECK(cli(graph + "--format xml validate").code == 2);
  CHECK(cli(graph + "simulate --episodes 0").code == 2);
  CHECK(cli(graph + "simulate --attacker nobody").code == 2);
  CHECK(cli(graph + "paths --objective longest").code == 2);

  const auto slow = cli(graph + "solve --max-iter 3 --tolerance 1e-12", true);
  CHECK(slow.code == 1);
  CHECK(slow.out.find("residual") != std::string::npos);

  write("cli_bad_graph.json", R"({"hosts":["h1"],"entry":"A","target":"T",
      "nodes":[{"id":"T","host":"h1","vuln_count":1,"exploitability":1.5,"impact":1}],
      "edges":[["A","T"]]})");
  CHECK(cli("--graph cli_bad_graph.json validate").code == 1);
  write("cli_unreachable.json", R"({"hosts":["h1"],"entry":"A","target":"T",
      "nodes":[{"id":"T","host":"h1","vuln_count":1,"exploitability":0.5,"impact":1},
               {"id":"U","host":"h1","vuln_count":1,"exploitability":0.5,"impact":1}],
      "edges":[["A","U"]]})");
  const auto unreachable = cli("--graph cli_unreachable.json paths", true);
  CHECK(unreachable.code == 1);
  CHECK(unreachable.out.find("target unreachable from entry") != std::string::npos);
  std::remove("cli_bad_graph.json");
  std::remove("cli_unreachable.json");
}

TEST_CASE("estimator distances steer the attack path") {
  write("cli_estimates.csv", misleading_estimates);
  auto r = cli(graph + "--estimator-distances cli_estimates.csv paths", true);
  CHECK(r.code == 0);
  CHECK(r.out.find("warning") != std::string::npos);
  CHECK(r.out.find("A vm1 vm3 vm5 vm9 DB") != std::string::npos);

  // The game follows the estimated path; stdout stays pure CSV.
  r = cli(graph + "--estimator-distances cli_estimates.csv --format csv build-game");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("s0,no-def,", 0) == 0);
  CHECK(margame::parse_payoff_csv(r.out).size() == 5);

  write("cli_exact.csv", "source,destination,predicted_distance\nA,DB,4\nvm1,DB,4\nvm2,DB,3\n"
                         "vm3,DB,3\nvm4,DB,3\nvm5,DB,2\nvm6,DB,2\nvm7,DB,2\nvm8,DB,1\nvm9,DB,1\n");
  r = cli(graph + "--estimator-distances cli_exact.csv paths", true);
  CHECK(r.code == 0);
  CHECK(r.out.find("warning") == std::string::npos);

  write("cli_bad.csv", "from,to,d\n");
  CHECK(cli(graph + "--estimator-distances cli_bad.csv paths").code != 0);
  CHECK(cli(graph + "--estimator-distances /nonexistent.csv paths").code == 2);
  for (const char* f : {"cli_estimates.csv", "cli_exact.csv", "cli_bad.csv"}) std::remove(f);
}
