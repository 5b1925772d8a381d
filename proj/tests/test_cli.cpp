#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
  Run r;
  std::string cmd = std::string(GEODD_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const std::string& f) { return std::string(GEODD_TEST_DATA) + "/" + f; }

std::string last_line(const std::string& s) {
  auto t = s.substr(0, s.find_last_not_of('\n') + 1);
  return t.substr(t.find_last_of('\n') + 1);
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("geodd_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("check accepts tangent lengths and rejects a corrupted dependency") {
  auto ok = cli("check " + data("tangent_lengths.txt"));
  CHECK(ok.status == 0);
  CHECK(ok.out.rfind("OK 1 record", 0) == 0);

  std::ifstream in(data("tangent_lengths.txt"));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  auto at = text.find("r53 [013]");
  REQUIRE(at != std::string::npos);
  text.replace(at, 9, "r53 [012]");
  auto dir = scratch("check");
  std::ofstream(dir / "bad.txt") << text;
  auto bad = cli("check " + (dir / "bad.txt").string());
  CHECK(bad.status == 1);
  CHECK(bad.out.rfind("error ReplayFailed([014])", 0) == 0);

  std::ofstream(dir / "empty.txt");
  auto empty = cli("check " + (dir / "empty.txt").string());
  CHECK(empty.status == 1);
  CHECK(empty.out.rfind("error Syntax", 0) == 0);
}

TEST_CASE("solve writes a record and a verdict") {
  auto dir = scratch("solve");
  auto problem = std::string(GEODD_SOURCE_DIR) + "/data/problems/25_tangent_lengths.gex";
  auto r = cli("solve --problem " + problem + " --beam 4 --depth 2 --out " + (dir / "rec.txt").string());
  REQUIRE(r.status == 0);
  auto v = nlohmann::json::parse(last_line(r.out));
  CHECK(v["verdict"] == "solved");
  CHECK(v["aux"] == 1);
  CHECK(cli("check " + (dir / "rec.txt").string()).status == 0);

  auto none = cli("solve --problem " + problem + " --proposer none");
  CHECK(none.status == 2);
  CHECK(nlohmann::json::parse(last_line(none.out))["verdict"] == "unsolved");

  auto bogus = cli("solve --problem " + problem + " --proposer bogus");
  CHECK(bogus.status == 1);
  CHECK(bogus.out.rfind("error Syntax(bogus)", 0) == 0);
}

TEST_CASE("generate writes shards that check") {
  auto dir = scratch("generate");
  auto r = cli("generate --n 6 --max-records 2 --out " + dir.string() + " --seed 3 --threads 2");
  REQUIRE(r.status == 0);
  auto s = nlohmann::json::parse(last_line(r.out));
  CHECK(s["seeds"] == 6);
  CHECK(s["records"].get<int>() > 0);
  CHECK(fs::exists(dir / "manifest.jsonl"));
  CHECK(cli("check " + (dir / "shard-00000.txt").string()).status == 0);
}

TEST_CASE("bench-match and figure-dump") {
  auto dir = scratch("bench");
  std::ofstream(dir / "tri.script") << "a b c = triangle a b c\nd = midpoint d b c\n";
  auto r = cli("bench-match " + dir.string() + " --jsonl " + (dir / "rep.jsonl").string());
  CHECK(r.status == 0);
  CHECK(r.out.find("geometric mean speedup") != std::string::npos);
  std::ifstream in(dir / "rep.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(nlohmann::json::parse(line)["equal"] == true);

  auto d = cli("figure-dump " + data("tangent_lengths.script"));
  CHECK(d.status == 0);
  CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 8);
  CHECK(d.out.rfind("a ", 0) == 0);
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(cli("").status != 0);
  CHECK(cli("frobnicate").status != 0);
  CHECK(cli("--tol 5 check " + data("tangent_lengths.txt")).out.rfind("error BadLiteral", 0) == 0);
}
