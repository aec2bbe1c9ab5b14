// Runs the command-line tool as a subprocess and inspects its outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kWork = fs::path(TWINBEAM_TEST_WORKDIR) / "cli";

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path out = kWork / "stdout.txt";
  const fs::path err = kWork / "stderr.txt";
  const std::string cmd = std::string("\"") + TWINBEAM_CLI + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Json json_file(const fs::path& p) { return Json::parse(slurp(p)); }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kQuantumModel = R"({"b1": 2.0, "b2": 2.5, "modes": 6.0, "d12": 2.6})";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  const Run r = run("dist --bogus");
  CHECK(r.code == 1);
  CHECK(Json::parse(r.err)["error"] == "UsageError");
  CHECK(run("").code == 1);
}

TEST_CASE("simulate is deterministic and feeds fit") {
  const auto model = write("quantum.json", kQuantumModel);
  const auto a = kWork / "sim_a";
  const auto b = kWork / "sim_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string common = "simulate --model " + q(model) + " --eta 0.6 --shots 200000 --seed 17";
  REQUIRE(run(common + " --out " + q(a)).code == 0);
  REQUIRE(run(common + " --out " + q(b)).code == 0);
  CHECK(slurp(a / "shots.csv") == slurp(b / "shots.csv"));
  const Json cfg = json_file(a / "config.json");
  CHECK(cfg["command"] == "simulate");
  CHECK(cfg["seed"] == 17);
  CHECK(cfg["eta"].get<double>() == 0.6);

  const auto fit_dir = kWork / "fit_sim";
  const Run r = run("fit --input " + q(a / "shots.csv") + " --eta 0.6 --out " + q(fit_dir));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("verdict: nonclassical", 0) == 0);
  const Json m = json_file(fit_dir / "model.json");
  CHECK(std::fabs(m["b1"].get<double>() - 2.0) < 0.1);
  CHECK(std::fabs(m["d12"].get<double>() - 2.6) < 0.1);
  CHECK(fs::exists(fit_dir / "report.json"));
  CHECK(fs::exists(fit_dir / "report.txt"));
  const Json fc = json_file(fit_dir / "config.json");
  CHECK(fc["modes_policy"] == "mean");
  CHECK(fc["input_details"]["shots"] == 200000);
}

TEST_CASE("fit from moment files") {
  const auto photon = write("photon.json", R"({"level": "photon", "mean1": 959.21, "mean2": 1078.3,
    "second1": 971829.7, "second2": 1218608, "cross": 1088083})");
  const auto dir = kWork / "fit_photon";
  REQUIRE(run("fit --input " + q(photon) + " --modes-policy 19.66 --out " + q(dir)).code == 0);
  const Json m = json_file(dir / "model.json");
  CHECK(m["modes"].get<double>() == 19.66);
  CHECK(std::fabs(m["b1"].get<double>() - 52.95) < 0.05);
  const Json rep = json_file(dir / "report.json");
  CHECK(std::fabs(rep["k"].get<double>() + 44.23) < 1.5);
  // Floats carry 17 significant digits.
  CHECK(slurp(dir / "model.json").find("19.66") != std::string::npos);

  const auto pe = write("pe.json", R"({"level": "photoelectron", "mean1": 527.5655, "mean2": 593.065,
    "second1": 294223.7, "second2": 368909.5, "cross": 329145.1, "eta": 0.55,
    "noise": {"level": "photoelectron", "mean1": 0.5, "mean2": 0.5, "second1": 0.75, "second2": 0.75, "cross": 0.25}})");
  const Run r = run("fit --input " + q(pe) + " --out " + q(kWork / "fit_pe"));
  CHECK(r.code == 0);
  const Json cfg = json_file(kWork / "fit_pe" / "config.json");
  CHECK(cfg["input_details"]["noise_subtracted"] == true);
  CHECK(cfg["input_details"]["eta"].get<double>() == 0.55);

  CHECK(run("fit --input " + q(photon) + " --modes-policy median --out " + q(kWork / "x")).code == 1);
}

TEST_CASE("input errors report the line") {
  const auto bad = write("bad.csv", "shot,m1,m2\n0,1,2\n1,oops,3\n");
  const Run r = run("fit --input " + q(bad) + " --eta 0.5 --out " + q(kWork / "fit_bad"));
  CHECK(r.code == 1);
  const Json e = Json::parse(r.err);
  CHECK(e["error"] == "ParseError");
  CHECK(e["line"] == 3);
  CHECK(run("fit --input " + q(bad) + " --out " + q(kWork / "fit_bad")).code == 1);
  CHECK(run("report --model " + q(kWork / "missing.json")).code == 1);
}

TEST_CASE("unphysical model exits 2 with the report written") {
  const auto model = write("unphysical.json", R"({"b1": 1, "b2": 1, "modes": 4, "d12": 3})");
  const auto dir = kWork / "report_bad";
  const Run r = run("report --model " + q(model) + " --out " + q(dir));
  CHECK(r.code == 2);
  CHECK(r.out.rfind("verdict: unphysical", 0) == 0);
  CHECK(json_file(dir / "report.json")["physical"] == false);
  CHECK(fs::exists(dir / "config.json"));
}

TEST_CASE("dist") {
  const auto model = write("quantum.json", kQuantumModel);
  const auto dir = kWork / "dist";
  const Run r = run("dist --model " + q(model) + " --grid-max 150 --fano-n1 1,5,20 --out " + q(dir));
  CHECK(r.code == 0);
  const Json meta = json_file(dir / "metadata.json");
  CHECK(std::fabs(meta["captured_mass"].get<double>() - 1.0) < 1e-12);
  CHECK(meta["n1_max"] == 150);
  CHECK(meta["difference"]["variance"].get<double>() < meta["poisson_baseline_variance"].get<double>());
  const std::string fano = slurp(dir / "fano.csv");
  CHECK(fano.rfind("n1,row_mass,mean,variance,fano,fano_closed_form\n1,", 0) == 0);
  const std::string joint = slurp(dir / "joint.csv");
  CHECK(joint.rfind("n1,n2,p\n0,0,", 0) == 0);
  CHECK(slurp(dir / "difference.csv").rfind("n,p\n", 0) == 0);
  CHECK(json_file(dir / "config.json")["grid_max"] == 150);

  const Run small = run("dist --model " + q(model) + " --grid-max 10 --out " + q(kWork / "dist_small"));
  CHECK(small.code == 0);
  CHECK(small.err.find("warning") != std::string::npos);

  const auto classical = write("classical.json", R"({"b1": 2, "b2": 3, "modes": 4, "d12": 2.345207879911715})");
  const Run cancel = run("dist --model " + q(classical) + " --grid-max 60 --max-cancel-digits 2 --out " +
                         q(kWork / "dist_cancel"));
  CHECK(cancel.code == 3);
  CHECK(Json::parse(cancel.err)["error"] == "CancellationOverflow");
}

TEST_CASE("quasi") {
  const auto model = write("published.json", R"({"b1": 52.946, "b2": 50.820, "modes": 19.66, "d12": 52.2957})");
  const auto dir = kWork / "quasi";
  const Run r = run("quasi --model " + q(model) + " --s 0.1,0.2 --points 1025 --out " + q(dir));
  CHECK(r.code == 0);
  const Json meta = json_file(dir / "metadata.json");
  REQUIRE(meta["runs"].size() == 2);
  CHECK(meta["runs"][0]["regime"] == "regular");
  CHECK(meta["runs"][1]["regime"] == "oscillatory");
  CHECK(meta["runs"][1]["min_value"].get<double>() < 0);
  CHECK(fs::exists(dir / "quasi_s0.1.csv"));
  CHECK(fs::exists(dir / "pminus_s0.2.csv"));
  CHECK(slurp(dir / "quasi_s0.1.csv").rfind("w1\\w2,", 0) == 0);
  CHECK(run("quasi --model " + q(model) + " --s 3 --out " + q(dir)).code == 1);
  CHECK(run("quasi --model " + q(model) + " --s abc --out " + q(dir)).code == 1);
}
