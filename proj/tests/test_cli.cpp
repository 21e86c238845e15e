#include "lefschetz/cli.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lefschetz;
using namespace lefschetz::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lefschetz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lefschetz_cli_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

int exit_status(const std::string& command) {
  const int raw = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("lefschetz_cli_" + name + ".ini");
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help") {
  const Run v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string("lefschetz ") + kVersion + "\n");
  const Run h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("signature") != std::string::npos);
  CHECK(h.err.empty());
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
}

TEST_CASE("flow on the genus-2 mesh") {
  const fs::path out = scratch("flow");
  const Run r = run({"flow", data_path("meshes/genus2.trisurf"), "--config", data_path("configs/flow_default.ini"),
                     "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.rfind("terminated=converged", 0) == 0);
  const auto summary = read_json(out / "summary.json");
  CHECK(summary["converged"] == true);
  CHECK(summary["terminated"] == "converged");
  CHECK(summary["fitted_rate"].get<double>() < 0);
  CHECK(summary["r2"].get<double>() >= 0.99);
  std::ifstream csv(out / "trace.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,max_dev,min_dev,sup_dev,h_max,grad_norm,area");
  fs::remove_all(out);
}

TEST_CASE("flow error paths") {
  const fs::path out = scratch("flow_err");
  const Run malformed = run({"flow", data_path("meshes/invalid/malformed.trisurf"), "--out", out.string()});
  CHECK(malformed.code == 1);
  CHECK(malformed.out.empty());
  CHECK(malformed.err.find("line 4") != std::string::npos);

  const Run flipped = run({"flow", data_path("meshes/invalid/flipped_triangle.trisurf"), "--out", out.string()});
  CHECK(flipped.code == 1);
  CHECK(flipped.err.find("orientation") != std::string::npos);

  CHECK(run({"flow", data_path("meshes/missing.trisurf"), "--out", out.string()}).code == 1);

  const Run cap = run({"flow", data_path("meshes/genus2.trisurf"), "--config", data_path("configs/flow_timecap.ini"),
                       "--out", out.string()});
  CHECK(cap.code == 2);
  CHECK(read_json(out / "summary.json")["terminated"] == "time-cap");
  CHECK(read_json(out / "summary.json")["fitted_rate"].is_null());
  fs::remove_all(out);
}

TEST_CASE("config validation") {
  auto code = [](const std::string& name, const std::string& text) {
    return run({"flow", data_path("meshes/torus.trisurf"), "--config", write_config(name, text), "--out",
                scratch("cfg").string()})
        .code;
  };
  CHECK(code("unknown_key", "[flow]\nstep = 1\n") == 1);
  CHECK(code("unknown_section", "[solver]\ntol = 1\n") == 1);
  CHECK(code("bad_rule", "[flow]\nstep_rule = leapfrog\n") == 1);
  CHECK(code("bad_number", "[flow]\ntol = tiny\n") == 1);
  CHECK(code("dt_order", "[flow]\ndt_init = 1\ndt_max = 0.1\n") == 1);
  CHECK(code("negative_seed", "[init]\nseed = -3\n") == 1);
  CHECK(code("fine", "[flow]\nstep_rule = rk4\ndt_init = 0.05\n[init]\namplitude = 0.1\nseed = 2\n") == 0);

  std::istringstream in("[family]\nbase = sphere-mesh\nsize = 1\nseed = 42\n");
  const RunConfig cfg = parse_run_config(in);
  CHECK(cfg.base == BaseKind::sphere_mesh);
  CHECK(cfg.family_seed == 42);
  fs::remove_all(scratch("cfg"));
}

TEST_CASE("family runs") {
  const fs::path out = scratch("family");
  const Run constant = run({"family", data_path("meshes/genus2.trisurf"), "--config",
                            data_path("configs/family_constant.ini"), "--out", out.string()});
  CHECK(constant.code == 0);
  CHECK(constant.err.empty());

  const Run loop = run({"family", data_path("meshes/genus2.trisurf"), "--config", data_path("configs/family_loop.ini"),
                        "--out", out.string()});
  CHECK(loop.code == 0);
  const auto j = read_json(out / "family.json");
  CHECK(j.contains("envelope"));
  CHECK(j["envelope"]["rate"].get<double>() < 0);
  CHECK(j["continuity"]["closed"] == true);
  CHECK(fs::exists(out / "fiber_31.csv"));

  const Run bad = run({"family", data_path("meshes/genus2.trisurf"), "--config", data_path("configs/bad_seed.ini"),
                       "--out", out.string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("seed") != std::string::npos);

  const Run wild = run({"family", data_path("meshes/genus2.trisurf"), "--config",
                        write_config("wild", "[family]\nsize = 6\namplitude = 5\n"), "--out", out.string()});
  CHECK(wild.code == 1);
  CHECK(wild.err.find("fiber ") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("signature") {
  const fs::path out = scratch("signature");
  const Run e1 = run({"signature", data_path("words/e1.word"), "--out", out.string()});
  CHECK(e1.code == 0);
  CHECK(e1.out == "sigma=-8 c1=1 delta=12\n");
  CHECK(read_json(out / "report.json")["c1_pairing"] == "1/1");
  CHECK(run({"signature", data_path("words/empty.word"), "--out", out.string()}).out == "sigma=0 c1=0 delta=0\n");
  CHECK(run({"signature", data_path("words/genus2_separating_achiral.word"), "--out", out.string()}).out ==
        "sigma=-7 c1=1 delta=11\n");

  const Run single = run({"signature", data_path("words/single_twist.word"), "--out", out.string()});
  CHECK(single.code == 3);
  CHECK(single.out.empty());
  CHECK(single.err.find("product matrix") != std::string::npos);
  CHECK(single.err.find("-1") != std::string::npos);

  std::ofstream(out / "broken.word") << "word g=1 base=sphere\ntwist +1 c 2 0\n";
  const Run broken = run({"signature", (out / "broken.word").string(), "--out", out.string()});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("line 2") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("thread count from the environment") {
  setenv("LEFSCHETZ_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  setenv("LEFSCHETZ_THREADS", "0", 1);
  CHECK(thread_count_from_env() >= 1);
  unsetenv("LEFSCHETZ_THREADS");
  CHECK(thread_count_from_env() >= 1);
}

TEST_CASE("process exit statuses") {
  const std::string cli = LEFSCHETZ_CLI_PATH;
  const fs::path out = scratch("process");
  CHECK(exit_status(cli + " --version") == 0);
  CHECK(exit_status(cli + " signature " + data_path("words/e2.word") + " --out " + out.string()) == 0);
  CHECK(exit_status(cli + " signature " + data_path("words/single_twist.word") + " --out " + out.string()) == 3);
  CHECK(exit_status(cli + " flow " + data_path("meshes/genus2.trisurf") + " --config " +
                    data_path("configs/flow_timecap.ini") + " --out " + out.string()) == 2);
  CHECK(exit_status(cli + " flow " + data_path("meshes/invalid/deleted_face.trisurf") + " --out " + out.string()) == 1);
  fs::remove_all(out);
}

}  // TEST_SUITE
