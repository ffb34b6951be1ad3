#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gnf/cli.hpp"
#include "json.hpp"

using namespace gnf;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(GNF_FIXTURE_DIR) + "/" + name;
}

bool mentions(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("check reports acceptance per condition") {
  auto ok = run({"check", fixture("mirror.gnf")});
  CHECK(ok.code == 0);
  CHECK(mentions(ok.out, "C1 pass"));
  CHECK(mentions(ok.out, "C5 pass"));
  CHECK(mentions(ok.out, "accepted"));

  auto bad = run({"check", fixture("doubling.gnf")});
  CHECK(bad.code == 1);
  CHECK(mentions(bad.out, "C5 fail"));
  CHECK(mentions(bad.out, "conc(y1,y1)"));
  CHECK(mentions(bad.out, "rejected"));
}

TEST_CASE("check emits machine-readable JSON on request") {
  auto r = run({"check", fixture("doubling.gnf"), "--format", "json"});
  CHECK(r.code == 1);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["system"] == "doubling");
  CHECK(doc["accepted"] == false);
  REQUIRE(doc["conditions"].size() == 5);
  CHECK(doc["conditions"][4]["id"] == "C5");
  CHECK(doc["conditions"][4]["verdict"] == "fail");
  CHECK(doc["conditions"][4]["rule"] == 1);
}

TEST_CASE("check fails cleanly on a missing file") {
  auto r = run({"check", fixture("nosuch.gnf")});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("eval prints the value and the measurement") {
  auto r = run({"eval", fixture("mirror.gnf"), "f1", "<a,<b,c>>"});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "<<c,b>,a>");
  CHECK(mentions(r.out, "measure: size=5 rank=2"));
  CHECK(mentions(r.out, "ok=true"));

  auto atom = run({"eval", fixture("mirror.gnf"), "f1", "a"});
  CHECK(atom.code == 0);
  CHECK(first_line(atom.out) == "a");
}

TEST_CASE("eval reports an undefined value as false, exit zero") {
  auto r = run({"eval", fixture("empty.gnf"), "f1", "<a>"});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "false");
}

TEST_CASE("eval refuses a rejected system unless forced") {
  auto gate = run({"eval", fixture("doubling.gnf"), "f1", "<a>"});
  CHECK(gate.code == 1);
  CHECK(mentions(gate.err, "rejected"));
  CHECK(mentions(gate.err, "--force"));

  auto forced = run({"eval", fixture("doubling.gnf"), "f1", "<a>", "--force"});
  CHECK(forced.code == 0);
  CHECK(first_line(forced.out) == "<a,a>");
}

TEST_CASE("runtime violations surface on stderr with exit 1") {
  auto r = run({"eval", fixture("doubling.gnf"), "f1", "<<<a>>>", "--force"});
  CHECK(r.code == 1);
  CHECK(mentions(r.err, "runtime violation (C5)"));
  CHECK(mentions(r.err, "conc(<a,a,a,a>,<a,a,a,a>)"));
  CHECK(mentions(r.err, "value size 9"));
  CHECK(mentions(r.err, "input-size sum 8"));
}

TEST_CASE("eval --trace prefixes one line per evaluated element") {
  auto r = run({"eval", fixture("mirror.gnf"), "f1", "<a,<b>>", "--trace"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "EVAL f1 <a,<b>> => rule#1");
  std::getline(lines, line);
  CHECK(line == "EVAL f1 a => initial");
  std::getline(lines, line);
  CHECK(line == "EVAL f1 <b> => rule#1");
  std::getline(lines, line);
  CHECK(line == "EVAL f1 b => initial");
  std::getline(lines, line);
  CHECK(line == "<<b>,a>");
}

TEST_CASE("eval rejects malformed input with usage errors") {
  CHECK(run({"eval", fixture("mirror.gnf"), "f1", "<a,?>"}).code == 2);
  CHECK(run({"eval", fixture("mirror.gnf"), "f9", "a"}).code == 2);
  CHECK(run({"eval", fixture("mirror.gnf"), "nonsense", "a"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("iterate reaches and verifies the fixed point") {
  auto r = run({"iterate", fixture("mirror.gnf"), "--atoms", "a", "--max-size",
                "2", "--max-rank", "2", "--verify"});
  CHECK(r.code == 0);
  CHECK(mentions(r.out, "universe: 4 elements"));
  CHECK(mentions(r.out, "stage 0: 1 defined, 0 false, 3 undefined"));
  CHECK(mentions(r.out, "stabilized at stage 3"));
  CHECK(mentions(r.out, "monotone: pass"));
  CHECK(mentions(r.out, "crosscheck: pass"));
}

TEST_CASE("iterate flags an injected fault") {
  auto r = run({"iterate", fixture("mirror.gnf"), "--atoms", "a", "--max-size",
                "2", "--max-rank", "2", "--verify", "--inject-fault-after", "1"});
  CHECK(r.code == 1);
  CHECK(mentions(r.out, "monotone: FAIL"));
}

TEST_CASE("iterate gates on the static checks and validates its options") {
  CHECK(run({"iterate", fixture("doubling.gnf")}).code == 1);
  CHECK(run({"iterate", fixture("mirror.gnf"), "--max-stages", "0"}).code == 2);
  CHECK(run({"iterate", fixture("mirror.gnf"), "--atoms", "z"}).code == 2);
}

TEST_CASE("audit over generated inputs emits a clean JSON report") {
  auto r = run({"audit", fixture("mirror.gnf"), "--gen-max-size", "4"});
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["system"] == "mirror");
  CHECK(doc["violations"].empty());
  CHECK(doc["summary"]["inputs"] == 144);  // exhaustive over {a,b,c} up to size 4
}

TEST_CASE("audit reports runtime violations with exit 1") {
  auto r = run({"audit", fixture("doubling.gnf"), "--force", "--gen-max-size", "4"});
  CHECK(r.code == 1);
  auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["violations"].size() == 1);
  CHECK(doc["violations"][0]["kind"] == "runtime-c5");
  CHECK(doc["violations"][0]["input"] == "<<<a>>>");
}

TEST_CASE("audit reads an input list file, comments included") {
  std::string path = "/tmp/gnf_cli_inputs.txt";
  {
    std::ofstream f(path);
    f << "# inputs under audit\n"
      << "a\n"
      << "<a,b>\n"
      << "\n"
      << "<a,<b,c>>  # trailing note\n";
  }
  auto r = run({"audit", fixture("mirror.gnf"), "--inputs", path});
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["summary"]["inputs"] == 3);
  CHECK(doc["inputs"][2]["w"] == "<a,<b,c>>");
  std::remove(path.c_str());

  {
    std::ofstream f(path);
    f << "a\n<a,?>\n";
  }
  auto bad = run({"audit", fixture("mirror.gnf"), "--inputs", path});
  CHECK(bad.code == 2);
  CHECK(mentions(bad.err, path + ":2"));
  std::remove(path.c_str());
}

TEST_CASE("audit validates its flag combinations and output paths") {
  CHECK(run({"audit", fixture("mirror.gnf")}).code == 2);
  CHECK(run({"audit", fixture("mirror.gnf"), "--inputs", "/tmp/x.txt",
             "--gen-max-size", "3"}).code == 2);
  CHECK(run({"audit", fixture("mirror.gnf"), "--gen-max-size", "3", "--out",
             "/nonexistent-dir/report"}).code == 2);
}

TEST_CASE("audit output is byte-identical across runs") {
  std::vector<std::string> args = {"audit", fixture("mirror.gnf"),
                                   "--gen-max-size", "5", "--fit"};
  auto a = run(args);
  auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}
