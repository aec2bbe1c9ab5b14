#include "twinbeam/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "twinbeam/error.hpp"

namespace twinbeam::io {
namespace {

void dump(const Json& v, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(v[i], indent, depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw Error(Errc::parse_error, where + ": missing key '" + key + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw Error(Errc::parse_error, where + ": key '" + key + "' must be a number");
  }
  return v.get<double>();
}

MomentSet moments_from(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) {
    throw Error(Errc::parse_error, where + " must be a JSON object");
  }
  MomentSet m;
  if (!obj.contains("level") || !obj.at("level").is_string()) {
    throw Error(Errc::parse_error, where + ": missing string key 'level'");
  }
  const auto level = parse_moment_level(obj.at("level").get<std::string>());
  if (!level) {
    throw Error(Errc::parse_error, where + ": unknown level '" +
                                       obj.at("level").get<std::string>() + "'");
  }
  m.level = *level;
  m.mean1 = number_field(obj, "mean1", where);
  m.mean2 = number_field(obj, "mean2", where);
  m.second1 = number_field(obj, "second1", where);
  m.second2 = number_field(obj, "second2", where);
  m.cross = number_field(obj, "cross", where);
  return m;
}

nlohmann::json parse(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, std::string(what) + " is not valid JSON: " + e.what());
  }
}

bool parse_int(std::string_view field, long long& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump(value, indent, 0, out);
  out += "\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) {
    throw Error(Errc::io_error, "cannot write '" + path + "'");
  }
}

RawCountData read_shots_csv(std::istream& in, double eta) {
  RawCountData data;
  data.eta = eta;
  std::string line;
  long lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      std::string compact;
      for (char c : line) {
        if (c != ' ' && c != '\t') compact += c;
      }
      if (compact != "shot,m1,m2") {
        throw Error(Errc::parse_error,
                    "line " + std::to_string(lineno) + ": expected header 'shot,m1,m2'", lineno);
      }
      header = true;
      continue;
    }
    std::string_view rest(line);
    long long v[3];
    int count = 0;
    bool ok = true;
    while (ok) {
      const auto comma = rest.find(',');
      const auto field = rest.substr(0, comma);
      if (count == 3 || !parse_int(field, v[count])) ok = false;
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!ok || count != 3) {
      throw Error(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": expected three integers 'shot,m1,m2', got '" +
                      line + "'",
                  lineno);
    }
    if (v[1] < 0 || v[2] < 0) {
      throw Error(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": counts must be nonnegative", lineno);
    }
    data.shots.push_back({v[1], v[2]});
  }
  if (!header) {
    throw Error(Errc::parse_error, "shot CSV is empty (no header)", lineno);
  }
  return data;
}

RawCountData read_shots_csv_file(const std::string& path, double eta) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  }
  return read_shots_csv(in, eta);
}

void write_shots_csv(std::ostream& out, const RawCountData& data) {
  out << "shot,m1,m2\n";
  for (std::size_t i = 0; i < data.shots.size(); ++i) {
    out << i << ',' << data.shots[i].m1 << ',' << data.shots[i].m2 << '\n';
  }
}

MomentInput parse_moment_json(const std::string& text) {
  const auto j = parse(text, "moment file");
  MomentInput in;
  in.moments = moments_from(j, "moment file");
  if (j.contains("eta") && !j.at("eta").is_null()) {
    in.eta = number_field(j, "eta", "moment file");
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    in.noise = moments_from(j.at("noise"), "noise object");
  }
  return in;
}

Json moments_to_json(const MomentSet& m) {
  Json j;
  j["level"] = std::string(to_string(m.level));
  j["mean1"] = m.mean1;
  j["mean2"] = m.mean2;
  j["second1"] = m.second1;
  j["second2"] = m.second2;
  j["cross"] = m.cross;
  return j;
}

Json model_to_json(const TwinBeamModel& m) {
  Json j;
  j["b1"] = m.b1;
  j["b2"] = m.b2;
  j["modes"] = m.modes;
  j["d12"] = m.d12;
  j["m1_modes"] = m.m1_modes;
  j["m2_modes"] = m.m2_modes;
  return j;
}

TwinBeamModel model_from_json(const std::string& text) {
  const auto j = parse(text, "model file");
  if (!j.is_object()) {
    throw Error(Errc::parse_error, "model file must be a JSON object");
  }
  TwinBeamModel m = TwinBeamModel::make(number_field(j, "b1", "model file"),
                                        number_field(j, "b2", "model file"),
                                        number_field(j, "modes", "model file"),
                                        number_field(j, "d12", "model file"));
  if (j.contains("m1_modes")) m.m1_modes = number_field(j, "m1_modes", "model file");
  if (j.contains("m2_modes")) m.m2_modes = number_field(j, "m2_modes", "model file");
  return m;
}

Json report_to_json(const TwinBeamModel& m, const NonclassicalityReport& r) {
  Json j;
  j["verdict"] = r.verdict();
  j["model"] = model_to_json(m);
  j["k"] = r.k;
  j["s_th"] = r.s_th;
  j["lambda"] = r.lambda;
  j["r"] = r.r;
  j["r_raw"] = r.r_raw;
  j["var_w_diff"] = r.var_w_diff;
  j["var_w_diff_raw"] = r.var_w_diff_raw;
  j["c"] = r.c;
  j["c_raw"] = r.c_raw;
  j["lower_bound_holds"] = r.lower_bound_holds;
  j["upper_bound_holds"] = r.upper_bound_holds;
  j["sub_shot_noise_bound_holds"] = r.sub_shot_noise_bound_holds;
  j["mode_bound_ok"] = r.mode_bound_ok;
  j["physical"] = r.physical;
  return j;
}

std::string report_text(const TwinBeamModel& m, const NonclassicalityReport& r) {
  std::ostringstream s;
  auto row = [&](const char* name, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-26s %s\n", name, format_double(v).c_str());
    s << buf;
  };
  auto flag = [&](const char* name, bool v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-26s %s\n", name, v ? "yes" : "no");
    s << buf;
  };
  s << "verdict: " << r.verdict() << "\n\nmodel\n";
  row("B1", m.b1);
  row("B2", m.b2);
  row("M", m.modes);
  row("M1", m.m1_modes);
  row("M2", m.m2_modes);
  row("|D12|", m.d12);
  s << "\ncertificates\n";
  row("K", r.k);
  row("s_th", r.s_th);
  row("lambda", r.lambda);
  row("R (model)", r.r);
  row("R (raw moments)", r.r_raw);
  row("var(W1-W2) (model)", r.var_w_diff);
  row("var(W1-W2) (raw moments)", r.var_w_diff_raw);
  row("C (model)", r.c);
  row("C (raw moments)", r.c_raw);
  s << "\nbounds\n";
  flag("B1 B2 < |D12|^2", r.lower_bound_holds);
  flag("|D12|^2 < B1 B2 + min(B)", r.upper_bound_holds);
  flag("(B1^2+B2^2)/2 < |D12|^2", r.sub_shot_noise_bound_holds);
  flag("mode bound", r.mode_bound_ok);
  return s.str();
}

void write_joint_csv(std::ostream& out, const JointPhotonDistribution& joint, double threshold) {
  out << "n1,n2,p\n";
  joint.for_each([&](long n1, long n2, double p) {
    if (std::fabs(p) >= threshold) out << n1 << ',' << n2 << ',' << format_double(p) << '\n';
  });
}

void write_difference_csv(std::ostream& out, const DifferenceDistribution& d) {
  out << "n,p\n";
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    out << d.offset + static_cast<long>(i) << ',' << format_double(d.probs[i]) << '\n';
  }
}

void write_quasi_csv(std::ostream& out, const QuasiGrid& grid) {
  out << "w1\\w2";
  for (double w : grid.w2) out << ',' << format_double(w);
  out << '\n';
  for (std::size_t i = 0; i < grid.w1.size(); ++i) {
    out << format_double(grid.w1[i]);
    for (std::size_t j = 0; j < grid.w2.size(); ++j) out << ',' << format_double(grid.at(i, j));
    out << '\n';
  }
}

void write_difference_quasi_csv(std::ostream& out, const DifferenceQuasi& d) {
  out << "w,p\n";
  for (std::size_t i = 0; i < d.w.size(); ++i) {
    out << format_double(d.w[i]) << ',' << format_double(d.values[i]) << '\n';
  }
}

}  // namespace twinbeam::io
