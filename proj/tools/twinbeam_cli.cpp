// Command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twinbeam/twinbeam.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 1, kPhysicality = 2, kNumerical = 3 };

struct Failure {
  tb_status status;
  std::string message;
  long line;
};

int exit_code(tb_status s) {
  switch (s) {
    case TB_OK: return kOk;
    case TB_UNPHYSICAL_MODEL: return kPhysicality;
    case TB_CANCELLATION_OVERFLOW:
    case TB_BESSEL_OVERFLOW:
    case TB_INSUFFICIENT_MASS:
    case TB_NOT_CONVERGED:
    case TB_INTERNAL: return kNumerical;
    default: return kInput;
  }
}

void check(tb_status s) {
  if (s != TB_OK) throw Failure{s, tb_last_error(), tb_last_error_line()};
}

[[noreturn]] void input_error(const std::string& message) {
  throw Failure{TB_INVALID_ARGUMENT, message, -1};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  tb_string_free(s);
  return out;
}

std::string formatted(const Json& j) {
  char* out = nullptr;
  check(tb_json_format(j.dump().c_str(), &out));
  return take(out);
}

void write_text(const fs::path& path, const std::string& text) {
  FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f || std::fwrite(text.data(), 1, text.size(), f) != text.size() || std::fclose(f) != 0) {
    throw Failure{TB_IO_ERROR, "cannot write '" + path.string() + "'", -1};
  }
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{TB_IO_ERROR, "cannot create '" + dir.string() + "': " + ec.message(), -1};
}

void warn(const std::string& message) {
  std::cerr << formatted(Json{{"warning", message}});
}

Json moments_json(const tb_moment_set& m) {
  char* out = nullptr;
  check(tb_moments_to_json(&m, &out));
  return Json::parse(take(out));
}

Json model_json(const tb_model& m) {
  char* out = nullptr;
  check(tb_model_to_json(&m, &out));
  return Json::parse(take(out));
}

tb_model load_model(const std::string& path) {
  tb_model m{};
  check(tb_model_read_json(path.c_str(), &m));
  return m;
}

bool looks_like_json(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Failure{TB_IO_ERROR, "cannot open '" + path + "' for reading", -1};
  int c;
  do {
    c = std::fgetc(f);
  } while (c == ' ' || c == '\n' || c == '\r' || c == '\t');
  std::fclose(f);
  return c == '{';
}

// Reads shots CSV or moment JSON and returns photon-level moments.
tb_moment_set load_photon_moments(const std::string& path, std::optional<double> eta_flag,
                                  Json& provenance) {
  tb_moment_set m{};
  if (looks_like_json(path)) {
    double eta_file = NAN;
    tb_moment_set noise{};
    int has_noise = 0;
    check(tb_moments_read_json(path.c_str(), &m, &eta_file, &noise, &has_noise));
    provenance["format"] = "moments-json";
    provenance["level"] = m.level == TB_PHOTOELECTRON ? "photoelectron"
                          : m.level == TB_PHOTON      ? "photon"
                                                      : "intensity";
    if (m.level == TB_PHOTOELECTRON) {
      if (has_noise) {
        tb_moment_set clean{};
        check(tb_subtract_noise(&m, &noise, &clean));
        m = clean;
        provenance["noise_subtracted"] = true;
      }
      const double eta = eta_flag ? *eta_flag : eta_file;
      if (std::isnan(eta)) input_error("photoelectron moments need --eta or an 'eta' key");
      provenance["eta"] = eta;
      tb_moment_set photon{};
      check(tb_photoelectron_to_photon(&m, eta, &photon));
      return photon;
    }
    if (has_noise) warn("noise object ignored: subtraction applies to photoelectron moments");
    if (m.level == TB_INTENSITY) {
      tb_moment_set photon{};
      check(tb_intensity_to_photon(&m, &photon));
      return photon;
    }
    return m;
  }
  if (!eta_flag) input_error("per-shot CSV input needs --eta");
  tb_shots* shots = nullptr;
  check(tb_shots_read_csv(path.c_str(), *eta_flag, &shots));
  tb_moment_set pe{};
  const tb_status st = tb_shots_reduce(shots, &pe);
  provenance["format"] = "shots-csv";
  provenance["shots"] = tb_shots_count(shots);
  provenance["eta"] = *eta_flag;
  tb_shots_free(shots);
  check(st);
  tb_moment_set photon{};
  check(tb_photoelectron_to_photon(&pe, *eta_flag, &photon));
  return photon;
}

struct Policy {
  tb_mode_policy kind = TB_MODES_MEAN;
  double value = 0.0;
  Json json() const {
    switch (kind) {
      case TB_MODES_ARM1: return "arm1";
      case TB_MODES_ARM2: return "arm2";
      case TB_MODES_EXPLICIT: return value;
      default: return "mean";
    }
  }
};

Policy parse_policy(const std::string& text) {
  if (text == "mean") return {};
  if (text == "arm1") return {TB_MODES_ARM1, 0.0};
  if (text == "arm2") return {TB_MODES_ARM2, 0.0};
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return {TB_MODES_EXPLICIT, v};
  } catch (const std::exception&) {
  }
  input_error("--modes-policy must be mean, arm1, arm2 or a positive mode number");
}

int report_exit(const tb_report& r) { return r.physical ? kOk : kPhysicality; }

// ---- fit -----------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::optional<double> eta;
  std::string policy = "mean";
  std::string out;
};

int run_fit(const FitArgs& a) {
  const Policy policy = parse_policy(a.policy);
  Json provenance;
  const tb_moment_set photon = load_photon_moments(a.input, a.eta, provenance);
  tb_moment_set intensity{};
  check(tb_photon_to_intensity(&photon, &intensity));
  tb_model model{};
  check(tb_fit(&intensity, policy.kind, policy.value, &model));
  tb_report report{};
  check(tb_report_compute(&model, &photon, &report));

  const fs::path dir(a.out);
  prepare_dir(dir);
  char* text = nullptr;
  check(tb_report_to_json(&model, &photon, &text));
  write_text(dir / "report.json", take(text));
  check(tb_report_to_text(&model, &photon, &text));
  const std::string report_text = take(text);
  write_text(dir / "report.txt", report_text);
  write_text(dir / "model.json", formatted(model_json(model)));
  write_text(dir / "photon_moments.json", formatted(moments_json(photon)));

  Json cfg;
  cfg["command"] = "fit";
  cfg["version"] = tb_version();
  cfg["input"] = a.input;
  cfg["eta"] = a.eta ? Json(*a.eta) : Json(nullptr);
  cfg["modes_policy"] = policy.json();
  cfg["out"] = a.out;
  cfg["input_details"] = provenance;
  write_text(dir / "config.json", formatted(cfg));

  std::cout << report_text;
  return report_exit(report);
}

// ---- dist ----------------------------------------------------------------

struct DistArgs {
  std::string model;
  std::optional<long> grid_max;
  std::vector<long> fano_n1;
  double max_cancel_digits = 12.0;
  unsigned threads = 0;
  std::string out;
};

int run_dist(const DistArgs& a) {
  const tb_model model = load_model(a.model);
  tb_joint_options opt;
  tb_joint_options_default(&opt);
  if (a.grid_max) {
    if (*a.grid_max < 0) input_error("--grid-max must be nonnegative");
    opt.n1_max = opt.n2_max = *a.grid_max;
  }
  opt.max_cancel_digits = a.max_cancel_digits;
  opt.threads = a.threads;

  tb_joint* joint = nullptr;
  check(tb_joint_compute(&model, &opt, &joint));
  struct Holder {
    tb_joint* p;
    ~Holder() { tb_joint_free(p); }
  } hold{joint};

  const fs::path dir(a.out);
  prepare_dir(dir);
  const double mass = tb_joint_captured_mass(joint);
  if (mass < 0.99) {
    warn("grid captures only " + std::to_string(mass) + " of the probability; enlarge --grid-max");
  }
  check(tb_joint_write_csv(joint, (dir / "joint.csv").string().c_str(), 0.0));
  tb_difference_stats diff{};
  check(tb_joint_write_difference_csv(joint, (dir / "difference.csv").string().c_str(), &diff));

  std::vector<long> rows = a.fano_n1;
  if (rows.empty()) {
    for (long n : {1L, 2L, 5L, 10L, 20L, 50L, 100L, 200L, 500L, 1000L, 2000L, 3000L, 5000L}) {
      if (n <= tb_joint_n1_max(joint)) rows.push_back(n);
    }
  }
  std::string fano = "n1,row_mass,mean,variance,fano,fano_closed_form\n";
  char buf[256];
  for (long n1 : rows) {
    tb_conditional c{};
    check(tb_joint_conditional(joint, n1, &c));
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.n1, c.row_mass,
                  c.mean, c.variance, c.fano_empirical, c.fano_closed_form);
    fano += buf;
  }
  write_text(dir / "fano.csv", fano);

  tb_moment_set forward{};
  check(tb_forward_moments(&model, &forward));
  Json meta;
  meta["n1_max"] = tb_joint_n1_max(joint);
  meta["n2_max"] = tb_joint_n2_max(joint);
  meta["captured_mass"] = mass;
  meta["max_digits_lost"] = tb_joint_max_digits_lost(joint);
  meta["difference"] = {{"mass", diff.mass}, {"mean", diff.mean}, {"variance", diff.variance}};
  meta["poisson_baseline_variance"] = forward.mean1 + forward.mean2;
  meta["fano_limit"] = tb_conditional_fano_limit(&model);
  write_text(dir / "metadata.json", formatted(meta));

  Json cfg;
  cfg["command"] = "dist";
  cfg["version"] = tb_version();
  cfg["model"] = model_json(model);
  cfg["model_path"] = a.model;
  cfg["grid_max"] = a.grid_max ? Json(*a.grid_max) : Json(nullptr);
  cfg["fano_n1"] = rows;
  cfg["max_cancel_digits"] = a.max_cancel_digits;
  cfg["threads"] = a.threads;
  cfg["out"] = a.out;
  write_text(dir / "config.json", formatted(cfg));
  return kOk;
}

// ---- quasi ---------------------------------------------------------------

struct QuasiArgs {
  std::string model;
  std::vector<std::string> s;
  std::optional<double> grid_max;
  int points = 0;
  std::optional<double> a_param;
  unsigned threads = 0;
  std::string out;
};

int run_quasi(const QuasiArgs& a) {
  const tb_model model = load_model(a.model);
  if (a.s.empty()) input_error("quasi needs at least one --s value");
  const fs::path dir(a.out);
  prepare_dir(dir);
  Json runs = Json::array();
  for (const std::string& tag : a.s) {
    double s = 0.0;
    try {
      std::size_t used = 0;
      s = std::stod(tag, &used);
      if (used != tag.size()) throw std::invalid_argument(tag);
    } catch (const std::exception&) {
      input_error("--s value '" + tag + "' is not a number");
    }
    tb_quasi_options opt;
    tb_quasi_options_default(&opt);
    opt.s = s;
    if (a.grid_max) opt.w1_max = opt.w2_max = *a.grid_max;
    if (a.points > 0) opt.points = a.points;
    if (a.a_param) opt.a_param = *a.a_param;
    opt.threads = a.threads;
    tb_quasi* q = nullptr;
    check(tb_quasi_compute(&model, &opt, &q));
    struct Holder {
      tb_quasi* p;
      ~Holder() { tb_quasi_free(p); }
    } hold{q};

    const std::string grid_file = "quasi_s" + tag + ".csv";
    const std::string diff_file = "pminus_s" + tag + ".csv";
    check(tb_quasi_write_csv(q, (dir / grid_file).string().c_str()));
    double pmin = 0.0, pint = 0.0;
    check(tb_quasi_write_difference_csv(q, (dir / diff_file).string().c_str(), &pmin, &pint));
    if (tb_quasi_regime(q) == TB_OSCILLATORY && !tb_quasi_resolved(q)) {
      warn("s = " + tag + ": grid step exceeds half the sinc zero spacing; raise --points");
    }
    double ks = 0.0;
    check(tb_k_s(&model, s, &ks));
    Json r;
    r["s"] = s;
    r["k_s"] = ks;
    r["regime"] = tb_quasi_regime(q) == TB_OSCILLATORY ? "oscillatory" : "regular";
    r["ridge_limit"] = tb_quasi_ridge_limit(q) != 0;
    r["a_param"] = tb_quasi_regime(q) == TB_OSCILLATORY ? Json(tb_quasi_a_param(q)) : Json(nullptr);
    r["resolved"] = tb_quasi_resolved(q) != 0;
    r["points"] = {tb_quasi_n1(q), tb_quasi_n2(q)};
    r["w1_max"] = tb_quasi_w1(q, tb_quasi_n1(q) - 1);
    r["w2_max"] = tb_quasi_w2(q, tb_quasi_n2(q) - 1);
    r["min_value"] = tb_quasi_min(q);
    r["integral"] = tb_quasi_integral(q);
    r["pminus_min"] = pmin;
    r["pminus_integral"] = pint;
    r["grid_file"] = grid_file;
    r["pminus_file"] = diff_file;
    runs.push_back(r);
  }
  write_text(dir / "metadata.json", formatted(Json{{"runs", runs}}));

  Json cfg;
  cfg["command"] = "quasi";
  cfg["version"] = tb_version();
  cfg["model"] = model_json(model);
  cfg["model_path"] = a.model;
  cfg["s"] = a.s;
  cfg["grid_max"] = a.grid_max ? Json(*a.grid_max) : Json(nullptr);
  cfg["points"] = a.points > 0 ? Json(a.points) : Json(nullptr);
  cfg["a_param"] = a.a_param ? Json(*a.a_param) : Json(nullptr);
  cfg["threads"] = a.threads;
  cfg["out"] = a.out;
  write_text(dir / "config.json", formatted(cfg));
  return kOk;
}

// ---- simulate ------------------------------------------------------------

struct SimArgs {
  std::string model;
  double eta = 1.0;
  long shots = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

int run_simulate(const SimArgs& a) {
  const tb_model model = load_model(a.model);
  tb_shots* shots = nullptr;
  check(tb_simulate(&model, a.eta, a.shots, a.seed, a.threads, &shots));
  struct Holder {
    tb_shots* p;
    ~Holder() { tb_shots_free(p); }
  } hold{shots};
  const fs::path dir(a.out);
  prepare_dir(dir);
  check(tb_shots_write_csv(shots, (dir / "shots.csv").string().c_str()));
  Json cfg;
  cfg["command"] = "simulate";
  cfg["version"] = tb_version();
  cfg["model"] = model_json(model);
  cfg["model_path"] = a.model;
  cfg["eta"] = a.eta;
  cfg["shots"] = a.shots;
  cfg["seed"] = a.seed;
  cfg["out"] = a.out;
  write_text(dir / "config.json", formatted(cfg));
  return kOk;
}

// ---- report --------------------------------------------------------------

struct ReportArgs {
  std::string model;
  std::optional<std::string> input;
  std::optional<double> eta;
  std::optional<std::string> out;
};

int run_report(const ReportArgs& a) {
  const tb_model model = load_model(a.model);
  Json provenance;
  std::optional<tb_moment_set> photon;
  if (a.input) photon = load_photon_moments(*a.input, a.eta, provenance);
  const tb_moment_set* p = photon ? &*photon : nullptr;
  tb_report report{};
  check(tb_report_compute(&model, p, &report));
  char* text = nullptr;
  check(tb_report_to_text(&model, p, &text));
  const std::string report_text = take(text);
  if (a.out) {
    const fs::path dir(*a.out);
    prepare_dir(dir);
    check(tb_report_to_json(&model, p, &text));
    write_text(dir / "report.json", take(text));
    write_text(dir / "report.txt", report_text);
    Json cfg;
    cfg["command"] = "report";
    cfg["version"] = tb_version();
    cfg["model"] = model_json(model);
    cfg["model_path"] = a.model;
    cfg["input"] = a.input ? Json(*a.input) : Json(nullptr);
    cfg["eta"] = a.eta ? Json(*a.eta) : Json(nullptr);
    cfg["input_details"] = provenance;
    cfg["out"] = *a.out;
    write_text(dir / "config.json", formatted(cfg));
  }
  std::cout << report_text;
  return report_exit(report);
}

void print_error(const std::string& name, int code, const std::string& message, long line) {
  Json e;
  e["error"] = name;
  e["code"] = code;
  e["message"] = message;
  if (line >= 0) e["line"] = line;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin-beam photon statistics: moment fits, photon-number and quasi-distributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tb_version()));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the multimode model to shot or moment data");
  fit_cmd->add_option("--input", fit.input, "Per-shot CSV or moment JSON")->required();
  fit_cmd->add_option("--eta", fit.eta, "Detection efficiency in (0, 1]");
  fit_cmd->add_option("--modes-policy", fit.policy, "mean, arm1, arm2 or a mode number");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Joint photon-number distribution and derived data");
  dist_cmd->add_option("--model", dist.model, "Model JSON")->required();
  dist_cmd->add_option("--grid-max", dist.grid_max, "Largest photon number on both axes");
  dist_cmd->add_option("--fano-n1", dist.fano_n1, "Signal photon numbers for the Fano table")
      ->delimiter(',');
  dist_cmd->add_option("--max-cancel-digits", dist.max_cancel_digits,
                       "Digits an alternating sum may cancel");
  dist_cmd->add_option("--threads", dist.threads, "Worker threads (0 = all cores)");
  dist_cmd->add_option("--out", dist.out, "Output directory")->required();

  QuasiArgs quasi;
  auto* quasi_cmd = app.add_subcommand("quasi", "s-ordered intensity quasi-distributions");
  quasi_cmd->add_option("--model", quasi.model, "Model JSON")->required();
  quasi_cmd->add_option("--s", quasi.s, "Ordering parameters in [-1, 1]")
      ->delimiter(',')
      ->required();
  quasi_cmd->add_option("--grid-max", quasi.grid_max, "Largest intensity on both axes");
  quasi_cmd->add_option("--points", quasi.points, "Grid points per axis");
  quasi_cmd->add_option("--a-param", quasi.a_param, "Sinc constant of the oscillatory form");
  quasi_cmd->add_option("--threads", quasi.threads, "Worker threads (0 = all cores)");
  quasi_cmd->add_option("--out", quasi.out, "Output directory")->required();

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw seeded photocount shots from a model");
  sim_cmd->add_option("--model", sim.model, "Model JSON")->required();
  sim_cmd->add_option("--eta", sim.eta, "Detection efficiency in (0, 1]");
  sim_cmd->add_option("--shots", sim.shots, "Number of shots")->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Nonclassicality report for a model");
  rep_cmd->add_option("--model", rep.model, "Model JSON")->required();
  rep_cmd->add_option("--input", rep.input, "Measured data for the shot-noise level");
  rep_cmd->add_option("--eta", rep.eta, "Detection efficiency for --input");
  rep_cmd->add_option("--out", rep.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", kInput, e.what(), -1);
    return kInput;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*dist_cmd) return run_dist(dist);
    if (*quasi_cmd) return run_quasi(quasi);
    if (*sim_cmd) return run_simulate(sim);
    if (*rep_cmd) return run_report(rep);
  } catch (const Failure& f) {
    print_error(tb_status_name(f.status), static_cast<int>(f.status), f.message, f.line);
    return exit_code(f.status);
  } catch (const std::exception& e) {
    print_error("Internal", TB_INTERNAL, e.what(), -1);
    return kNumerical;
  }
  return kInput;
}
