#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct cli_result {
  int code;
  std::string out;
  std::string err;
};

cli_result run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"setrw"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = setrw::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

// Temp-dir fixture with the TRS files the CLI tests drive.
struct cli_files {
  fs::path dir;

  cli_files() {
    dir = fs::temp_directory_path() / ("setrw_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write("if.trs", ts::if_trs);
    write("add.trs", ts::add_trs);
    write("nl.trs", ts::nl_trs);
  }
  ~cli_files() { fs::remove_all(dir); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream(dir / name) << content;
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli rewrite: engines agree on the if/not example") {
  cli_files files;
  const std::string term = "if(not(not(true)), false, true)";
  for (const char* engine : {"stack", "reference", "reference-nonlinear", "oracle"}) {
    CAPTURE(engine);
    cli_result r = run_cli({"rewrite", files.path("if.trs"), term, "--engine", engine});
    CHECK(r.code == 0);
    CHECK(first_line(r.out) == "false");
    CHECK(r.out.find("rewrite_steps\t2") != std::string::npos);
  }
}

TEST_CASE("cli rewrite: json report carries the split timings") {
  cli_files files;
  cli_result r = run_cli({"rewrite", files.path("if.trs"), "not(false)", "--json"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["normal_form"] == "true");
  CHECK(j["rewrite_steps"] == 1);
  CHECK(j.contains("construct_ms"));
  CHECK(j.contains("rewrite_ms"));
}

TEST_CASE("cli rewrite: diagnostics and exit codes") {
  cli_files files;
  {
    cli_result r = run_cli({"rewrite", files.path("if.trs"), "if(true,false)"});
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);
  }
  {
    cli_result r = run_cli({"rewrite", files.path("if.trs"), "not(x)"});
    CHECK(r.code == 1);  // ground terms only at the CLI boundary
  }
  {
    cli_result r = run_cli({"rewrite", files.path("nl.trs"), "h(a)", "--engine", "reference"});
    CHECK(r.code == 1);  // the linear reference engine refuses non-linear rules
  }
  {
    cli_result r = run_cli({"rewrite", files.path("missing.trs"), "a"});
    CHECK(r.code == 1);
  }
  {
    cli_result r = run_cli({"rewrite", files.path("if.trs"), "not(not(true))", "--engine",
                            "stack", "--max-steps", "0"});
    CHECK(r.code == 1);
  }
}

TEST_CASE("cli rewrite: trace output") {
  cli_files files;
  cli_result r = run_cli(
      {"rewrite", files.path("if.trs"), "not(not(true))", "--engine", "reference", "--trace"});
  CHECK(r.code == 0);
  CHECK(r.out.find("grow\t") != std::string::npos);
  CHECK(r.out.find("reduce\t") != std::string::npos);
}

TEST_CASE("cli dot: stats obey the transition-cell law and output is stable") {
  cli_files files;
  cli_result stats = run_cli({"dot", files.path("add.trs"), "--stats"});
  REQUIRE(stats.code == 0);
  CHECK(stats.out == "states\tsymbols\trules\ttransition_cells\tbranches\n4\t3\t1\t12\t14\n");

  cli_result a = run_cli({"dot", files.path("if.trs")});
  cli_result b = run_cli({"dot", files.path("if.trs")});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("digraph") == 0);
}

TEST_CASE("cli bench: rows, regression fixtures, failures") {
  cli_files files;
  fs::path suite = files.dir / "suite";
  fs::create_directories(suite);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream(suite / name) << content;
  };
  put("ok.trs", ts::if_trs);
  put("ok.term", "if(not(not(true)), false, true)");
  put("ok.expected", "false");
  put("wrong.trs", ts::if_trs);
  put("wrong.term", "not(true)");
  put("wrong.expected", "true");
  put("loop.trs", "symbols: l:1 a:0\nvars: x\nrules:\nl(x) -> l(x)\n");
  put("loop.term", "l(a)");
  put("orphan.trs", ts::if_trs);  // no .term file

  cli_result r = run_cli({"bench", suite.string(), "--timeout", "0.2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("name\tengine\tsolved\trewrite_steps\tinspections\tms\n") == 0);
  CHECK(r.out.find("ok\tstack\tyes") != std::string::npos);
  CHECK(r.out.find("wrong\tstack\twrong") != std::string::npos);
  CHECK(r.out.find("loop\tstack\tdnf") != std::string::npos);
  CHECK(r.out.find("orphan\tstack\terror") != std::string::npos);
  CHECK(r.out.find("Total failures\t3\n") != std::string::npos);
}

TEST_CASE("cli bench: empty directory gives an empty table") {
  cli_files files;
  fs::path empty = files.dir / "empty";
  fs::create_directories(empty);
  cli_result r = run_cli({"bench", empty.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "name\tengine\tsolved\trewrite_steps\tinspections\tms\nTotal failures\t0\n");
}

TEST_CASE("cli selftest: deterministic and green on a seeded slice") {
  cli_result a = run_cli({"selftest", "--iterations", "25", "--seed", "7"});
  CHECK(a.code == 0);
  cli_result b = run_cli({"selftest", "--iterations", "25", "--seed", "7"});
  CHECK(a.out == b.out);
  CHECK(a.out.find("25 iterations passed") != std::string::npos);
}

TEST_CASE("cli: help exits zero, unknown flags exit one") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"rewrite"}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
}
