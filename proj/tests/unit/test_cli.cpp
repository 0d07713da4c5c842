#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "pcorder/service.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, bool capture_stderr = false) {
  const std::string cmd = std::string(PCORDER_CLI) + " " + args + (capture_stderr ? " 2>&1" : " 2>/dev/null");
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("pcorder_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const std::string kPenguins = std::string(PCORDER_DATA_DIR) + "/penguins.csv";

}  // namespace

TEST_CASE("compute writes the shared document") {
  const auto out = scratch() / "r.json";
  const auto r = run("compute --input " + kPenguins + " --window 0.25 --weights pos_corr=1 --seed 7 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc["dims"].size() == 6);
  CHECK(doc["profiles"].size() == 30);
  CHECK(doc["window_spec"]["window_fraction"] == 0.25);
  CHECK(doc["seed"] == 7);
  CHECK(doc["matrix"]["cells"].size() == 6);
  CHECK(doc["dropped_rows"].get<int>() > 0);
}

TEST_CASE("order on y = x prints both names") {
  std::ostringstream csv;
  csv << "x,y\n";
  for (int i = 0; i < 100; ++i) csv << i * 0.37 << ',' << i * 0.37 << '\n';
  const auto in = write_file(scratch() / "yx.csv", csv.str());
  const auto out = scratch() / "yx.json";
  const auto r = run("order --input " + in.string() + " --mode tsp --weights pos_corr=1 --seed 0 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "x\ny\n");
  const json doc = json::parse(slurp(out));
  CHECK(doc["ordering"]["total_score"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sixteen axes switch to greedy with a warning") {
  std::ostringstream csv;
  for (int d = 0; d < 16; ++d) csv << (d ? "," : "") << "f" << d;
  csv << '\n';
  for (int i = 0; i < 60; ++i) {
    for (int d = 0; d < 16; ++d) csv << (d ? "," : "") << ((i * (d + 3)) % 29);
    csv << '\n';
  }
  const auto in = write_file(scratch() / "wide.csv", csv.str());
  const auto out = scratch() / "wide.json";
  const auto r = run("order --input " + in.string() + " --mode tsp --weights pos_corr=1 --seed 1 --out " + out.string(), true);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("warning") != std::string::npos);
  CHECK(json::parse(slurp(out))["ordering"]["method"] == "greedy");
}

TEST_CASE("byte-identical output across runs") {
  const auto a = scratch() / "a.json";
  const auto b = scratch() / "b.json";
  const std::string args = "order --input " + kPenguins + " --window 0.2 --stride 0.1 --weights pos_skew=1,fan=0.5 --seed 11";
  REQUIRE(run(args + " --out " + a.string()).exit_code == 0);
  REQUIRE(run(args + " --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("exit codes") {
  CHECK(run("").exit_code == 1);
  CHECK(run("compute").exit_code == 1);
  CHECK(run("compute --input " + kPenguins + " --weights bogus=1").exit_code == 1);
  CHECK(run("compute --input " + kPenguins + " --weights pos_corr=0").exit_code == 1);
  CHECK(run("compute --input " + kPenguins + " --window 1.5").exit_code == 1);
  CHECK(run("compute --input /nonexistent.csv").exit_code == 1);

  const auto cat = write_file(scratch() / "cat.csv", "a,b\nx,1\ny,2\nz,3\n");
  const auto r = run("compute --input " + cat.string(), true);
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("error: non_numeric_column") != std::string::npos);
  const auto tiny = write_file(scratch() / "tiny.csv", "a,b\n1,2\n");
  CHECK(run("compute --input " + tiny.string()).exit_code == 2);
}

TEST_CASE("order output equals the service endpoint") {
  const auto out = scratch() / "svc.json";
  REQUIRE(run("order --input " + kPenguins + " --window 0.25 --weights pos_corr=1,clear_grouping=0.5 --seed 3 --out " +
              out.string())
              .exit_code == 0);

  pcorder::service::Service svc;
  pcorder::service::ApiRequest up;
  up.method = "POST";
  up.path = "/datasets";
  up.body = slurp(kPenguins);
  const auto id = svc.handle(up).body["dataset_id"].get<std::string>();
  pcorder::service::ApiRequest req;
  req.method = "POST";
  req.path = "/datasets/" + id + "/order";
  req.query = {{"mode", "tsp"}, {"window", "0.25"}, {"weights", "pos_corr=1,clear_grouping=0.5"}, {"seed", "3"}};
  const auto res = svc.handle(req);
  REQUIRE(res.status == 200);
  CHECK(res.body == json::parse(slurp(out)));
}
