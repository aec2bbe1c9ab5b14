#include "twinbeam/twinbeam.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "twinbeam/error.hpp"
#include "twinbeam/io.hpp"
#include "twinbeam/oracle.hpp"
#include "twinbeam/photodist.hpp"
#include "twinbeam/quasidist.hpp"

struct tb_shots {
  twinbeam::RawCountData data;
};

struct tb_joint {
  twinbeam::JointPhotonDistribution dist;
};

struct tb_quasi {
  twinbeam::QuasiGrid grid;
};

namespace {

using namespace twinbeam;

thread_local std::string g_error;
thread_local long g_error_line = -1;

template <class Fn>
tb_status guarded(Fn&& fn) {
  try {
    g_error.clear();
    g_error_line = -1;
    fn();
    return TB_OK;
  } catch (const Error& e) {
    g_error = e.what();
    g_error_line = e.line().value_or(-1);
    return static_cast<tb_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
  } catch (const std::exception& e) {
    g_error = e.what();
  } catch (...) {
    g_error = "unknown failure";
  }
  return TB_INTERNAL;
}

template <class T>
void require(const T* p, const char* name) {
  if (p == nullptr) {
    throw Error(Errc::invalid_argument, std::string(name) + " is null");
  }
}

MomentSet from_c(const tb_moment_set& m) {
  if (m.level < 0 || m.level > 2) {
    throw Error(Errc::invalid_argument, "unknown moment level");
  }
  return {static_cast<MomentLevel>(m.level), m.mean1, m.mean2, m.second1, m.second2, m.cross};
}

tb_moment_set to_c(const MomentSet& m) {
  return {static_cast<int>(m.level), m.mean1, m.mean2, m.second1, m.second2, m.cross};
}

TwinBeamModel from_c(const tb_model& m) {
  TwinBeamModel out{m.b1, m.b2, m.modes, m.d12, m.m1_modes, m.m2_modes};
  out.validate();
  return out;
}

tb_model to_c(const TwinBeamModel& m) {
  return {m.b1, m.b2, m.modes, m.d12, m.m1_modes, m.m2_modes};
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

JointOptions joint_options(const tb_joint_options* o) {
  JointOptions j;
  if (o == nullptr) return j;
  if (o->n1_max >= 0) j.n1_max = o->n1_max;
  if (o->n2_max >= 0) j.n2_max = o->n2_max;
  j.sigma_span = o->sigma_span;
  j.tail_mass = o->tail_mass;
  j.band_log_cutoff = o->band_log_cutoff;
  j.max_cancel_digits = o->max_cancel_digits;
  j.threads = o->threads;
  return j;
}

// Photon moments for the report: supplied ones, else the model's own.
MomentSet report_photon(const TwinBeamModel& model, const tb_moment_set* photon) {
  if (photon != nullptr) return from_c(*photon);
  return intensity_to_photon_moments(forward_moments(model));
}

template <class Writer>
void write_file(const char* path, Writer&& writer) {
  require(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::io_error, std::string("cannot open '") + path + "' for writing");
  }
  writer(out);
  if (!out.flush()) {
    throw Error(Errc::io_error, std::string("cannot write '") + path + "'");
  }
}

}  // namespace

extern "C" {

const char* tb_version(void) { return "0.1.0"; }

const char* tb_status_name(tb_status status) {
  if (status == TB_OK) return "Ok";
  if (status == TB_INTERNAL) return "Internal";
  return errc_name(static_cast<Errc>(status));
}

const char* tb_last_error(void) { return g_error.c_str(); }
long tb_last_error_line(void) { return g_error_line; }
void tb_string_free(char* s) { std::free(s); }

tb_status tb_moments_validate(const tb_moment_set* m) {
  return guarded([&] {
    require(m, "moments");
    from_c(*m).validate();
  });
}

tb_status tb_subtract_noise(const tb_moment_set* signal, const tb_moment_set* noise,
                            tb_moment_set* out) {
  return guarded([&] {
    require(signal, "signal");
    require(noise, "noise");
    require(out, "out");
    *out = to_c(subtract_noise(from_c(*signal), from_c(*noise)));
  });
}

tb_status tb_photoelectron_to_photon(const tb_moment_set* m, double eta, tb_moment_set* out) {
  return guarded([&] {
    require(m, "moments");
    require(out, "out");
    *out = to_c(photoelectron_to_photon(from_c(*m), eta));
  });
}

tb_status tb_photon_to_photoelectron(const tb_moment_set* n, double eta, tb_moment_set* out) {
  return guarded([&] {
    require(n, "moments");
    require(out, "out");
    *out = to_c(photon_to_photoelectron(from_c(*n), eta));
  });
}

tb_status tb_photon_to_intensity(const tb_moment_set* n, tb_moment_set* out) {
  return guarded([&] {
    require(n, "moments");
    require(out, "out");
    *out = to_c(photon_to_intensity(from_c(*n)));
  });
}

tb_status tb_intensity_to_photon(const tb_moment_set* w, tb_moment_set* out) {
  return guarded([&] {
    require(w, "moments");
    require(out, "out");
    *out = to_c(intensity_to_photon_moments(from_c(*w)));
  });
}

double tb_burgess_map(double fano_photon, double eta) { return burgess_map(fano_photon, eta); }

tb_status tb_moments_read_json(const char* path, tb_moment_set* out, double* eta,
                               tb_moment_set* noise, int* has_noise) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto in = io::parse_moment_json(io::read_text_file(path));
    *out = to_c(in.moments);
    if (eta) *eta = in.eta.value_or(std::numeric_limits<double>::quiet_NaN());
    if (has_noise) *has_noise = in.noise.has_value();
    if (noise && in.noise) *noise = to_c(*in.noise);
  });
}

tb_status tb_moments_to_json(const tb_moment_set* m, char** json) {
  return guarded([&] {
    require(m, "moments");
    require(json, "json");
    *json = dup_string(io::dump_json(io::moments_to_json(from_c(*m))));
  });
}

tb_status tb_shots_create(const int64_t* m1, const int64_t* m2, size_t count, double eta,
                          tb_shots** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) {
      require(m1, "m1");
      require(m2, "m2");
    }
    auto s = std::make_unique<tb_shots>();
    s->data.eta = eta;
    s->data.shots.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (m1[i] < 0 || m2[i] < 0) {
        throw Error(Errc::invalid_argument, "photocounts must be nonnegative");
      }
      s->data.shots.push_back({m1[i], m2[i]});
    }
    *out = s.release();
  });
}

tb_status tb_shots_read_csv(const char* path, double eta, tb_shots** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<tb_shots>();
    s->data = io::read_shots_csv_file(path, eta);
    *out = s.release();
  });
}

tb_status tb_shots_write_csv(const tb_shots* shots, const char* path) {
  return guarded([&] {
    require(shots, "shots");
    write_file(path, [&](std::ostream& o) { io::write_shots_csv(o, shots->data); });
  });
}

size_t tb_shots_count(const tb_shots* shots) { return shots ? shots->data.shots.size() : 0; }

tb_status tb_shots_get(const tb_shots* shots, size_t index, int64_t* m1, int64_t* m2) {
  return guarded([&] {
    require(shots, "shots");
    if (index >= shots->data.shots.size()) {
      throw Error(Errc::out_of_range, "shot index out of range");
    }
    if (m1) *m1 = shots->data.shots[index].m1;
    if (m2) *m2 = shots->data.shots[index].m2;
  });
}

tb_status tb_shots_reduce(const tb_shots* shots, tb_moment_set* out) {
  return guarded([&] {
    require(shots, "shots");
    require(out, "out");
    *out = to_c(reduce_shots(shots->data));
  });
}

void tb_shots_free(tb_shots* shots) { delete shots; }

tb_status tb_model_make(double b1, double b2, double modes, double d12, tb_model* out) {
  return guarded([&] {
    require(out, "out");
    *out = to_c(TwinBeamModel::make(b1, b2, modes, d12));
  });
}

tb_status tb_fit(const tb_moment_set* intensity, tb_mode_policy policy, double explicit_modes,
                 tb_model* out) {
  return guarded([&] {
    require(intensity, "moments");
    require(out, "out");
    ModePolicy p;
    switch (policy) {
      case TB_MODES_MEAN: p = ModePolicy::mean(); break;
      case TB_MODES_ARM1: p = ModePolicy::arm1(); break;
      case TB_MODES_ARM2: p = ModePolicy::arm2(); break;
      case TB_MODES_EXPLICIT: p = ModePolicy::explicit_modes(explicit_modes); break;
      default: throw Error(Errc::invalid_argument, "unknown mode policy");
    }
    *out = to_c(fit(from_c(*intensity), p));
  });
}

tb_status tb_forward_moments(const tb_model* model, tb_moment_set* intensity) {
  return guarded([&] {
    require(model, "model");
    require(intensity, "out");
    *intensity = to_c(forward_moments(from_c(*model)));
  });
}

tb_status tb_k_s(const tb_model* model, double s, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = determinant_k_s(from_c(*model), s);
  });
}

tb_status tb_threshold_ordering(const tb_model* model, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = threshold_ordering(from_c(*model));
  });
}

tb_status tb_report_compute(const tb_model* model, const tb_moment_set* photon, tb_report* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const TwinBeamModel m = from_c(*model);
    const auto r = nonclassicality_report(m, report_photon(m, photon));
    *out = {r.k,
            r.s_th,
            r.lambda,
            r.r,
            r.r_raw,
            r.var_w_diff,
            r.var_w_diff_raw,
            r.c,
            r.c_raw,
            r.lower_bound_holds,
            r.upper_bound_holds,
            r.sub_shot_noise_bound_holds,
            r.mode_bound_ok,
            r.physical,
            r.verdict() == "nonclassical"};
  });
}

tb_status tb_model_read_json(const char* path, tb_model* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = to_c(io::model_from_json(io::read_text_file(path)));
  });
}

tb_status tb_model_to_json(const tb_model* model, char** json) {
  return guarded([&] {
    require(model, "model");
    require(json, "json");
    *json = dup_string(io::dump_json(io::model_to_json(from_c(*model))));
  });
}

tb_status tb_report_to_json(const tb_model* model, const tb_moment_set* photon, char** json) {
  return guarded([&] {
    require(model, "model");
    require(json, "json");
    const TwinBeamModel m = from_c(*model);
    const auto r = nonclassicality_report(m, report_photon(m, photon));
    *json = dup_string(io::dump_json(io::report_to_json(m, r)));
  });
}

tb_status tb_report_to_text(const tb_model* model, const tb_moment_set* photon, char** text) {
  return guarded([&] {
    require(model, "model");
    require(text, "text");
    const TwinBeamModel m = from_c(*model);
    const auto r = nonclassicality_report(m, report_photon(m, photon));
    *text = dup_string(io::report_text(m, r));
  });
}

void tb_joint_options_default(tb_joint_options* options) {
  if (options == nullptr) return;
  const JointOptions d;
  *options = {-1, -1, d.sigma_span, d.tail_mass, d.band_log_cutoff, d.max_cancel_digits,
              d.threads};
}

tb_status tb_joint_compute(const tb_model* model, const tb_joint_options* options,
                           tb_joint** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new tb_joint{joint_pn(from_c(*model), joint_options(options))};
  });
}

tb_status tb_joint_border(double b1, double b2, double modes, const tb_joint_options* options,
                          tb_joint** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tb_joint{joint_pn_border(b1, b2, modes, joint_options(options))};
  });
}

long tb_joint_n1_max(const tb_joint* joint) { return joint ? joint->dist.n1_max() : -1; }
long tb_joint_n2_max(const tb_joint* joint) { return joint ? joint->dist.n2_max() : -1; }

double tb_joint_prob(const tb_joint* joint, long n1, long n2) {
  if (joint == nullptr || n1 < 0 || n2 < 0 || n1 > joint->dist.n1_max() ||
      n2 > joint->dist.n2_max()) {
    return 0.0;
  }
  return joint->dist.prob(n1, n2);
}

double tb_joint_captured_mass(const tb_joint* joint) {
  return joint ? joint->dist.captured_mass() : 0.0;
}

double tb_joint_max_digits_lost(const tb_joint* joint) {
  return joint ? joint->dist.stats().max_digits_lost : 0.0;
}

tb_status tb_joint_conditional(const tb_joint* joint, long n1, tb_conditional* out) {
  return guarded([&] {
    require(joint, "joint");
    require(out, "out");
    const auto c = conditional(joint->dist, n1);
    *out = {c.n1, c.row_mass, c.mean, c.variance, c.fano_empirical, c.fano_closed_form};
  });
}

double tb_conditional_fano_limit(const tb_model* model) {
  if (model == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return conditional_fano_limit(TwinBeamModel{model->b1, model->b2, model->modes, model->d12,
                                              model->m1_modes, model->m2_modes});
}

tb_status tb_joint_moments(const tb_joint* joint, tb_moment_set* photon) {
  return guarded([&] {
    require(joint, "joint");
    require(photon, "out");
    *photon = to_c(brute_moments(joint->dist));
  });
}

tb_status tb_joint_write_csv(const tb_joint* joint, const char* path, double threshold) {
  return guarded([&] {
    require(joint, "joint");
    write_file(path, [&](std::ostream& o) { io::write_joint_csv(o, joint->dist, threshold); });
  });
}

tb_status tb_joint_write_difference_csv(const tb_joint* joint, const char* path,
                                        tb_difference_stats* stats) {
  return guarded([&] {
    require(joint, "joint");
    const auto d = difference_pn(joint->dist);
    write_file(path, [&](std::ostream& o) { io::write_difference_csv(o, d); });
    if (stats) *stats = {d.mass, d.mean, d.variance};
  });
}

void tb_joint_free(tb_joint* joint) { delete joint; }

void tb_quasi_options_default(tb_quasi_options* options) {
  if (options == nullptr) return;
  const QuasiOptions d;
  *options = {1.0, 0.0, 0.0, d.sigma_span, d.points, 0.0, d.threads};
}

tb_status tb_quasi_compute(const tb_model* model, const tb_quasi_options* options,
                           tb_quasi** out) {
  return guarded([&] {
    require(model, "model");
    require(options, "options");
    require(out, "out");
    QuasiOptions q;
    if (options->w1_max > 0.0) q.w1_max = options->w1_max;
    if (options->w2_max > 0.0) q.w2_max = options->w2_max;
    q.sigma_span = options->sigma_span;
    q.points = options->points;
    if (options->a_param > 0.0) q.a_param = options->a_param;
    q.threads = options->threads;
    *out = new tb_quasi{quasi_auto(from_c(*model), options->s, q)};
  });
}

int tb_quasi_regime(const tb_quasi* quasi) {
  return quasi && quasi->grid.regime == Regime::oscillatory ? TB_OSCILLATORY : TB_REGULAR;
}
int tb_quasi_resolved(const tb_quasi* quasi) { return quasi ? quasi->grid.resolved : 0; }
int tb_quasi_ridge_limit(const tb_quasi* quasi) { return quasi ? quasi->grid.ridge_limit : 0; }
double tb_quasi_a_param(const tb_quasi* quasi) { return quasi ? quasi->grid.a_param : 0.0; }
size_t tb_quasi_n1(const tb_quasi* quasi) { return quasi ? quasi->grid.w1.size() : 0; }
size_t tb_quasi_n2(const tb_quasi* quasi) { return quasi ? quasi->grid.w2.size() : 0; }

double tb_quasi_w1(const tb_quasi* quasi, size_t i) {
  return quasi && i < quasi->grid.w1.size() ? quasi->grid.w1[i]
                                            : std::numeric_limits<double>::quiet_NaN();
}

double tb_quasi_w2(const tb_quasi* quasi, size_t j) {
  return quasi && j < quasi->grid.w2.size() ? quasi->grid.w2[j]
                                            : std::numeric_limits<double>::quiet_NaN();
}

double tb_quasi_value(const tb_quasi* quasi, size_t i, size_t j) {
  if (!quasi || i >= quasi->grid.w1.size() || j >= quasi->grid.w2.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return quasi->grid.at(i, j);
}

double tb_quasi_min(const tb_quasi* quasi) {
  if (!quasi || quasi->grid.values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double m = quasi->grid.values.front();
  for (double v : quasi->grid.values) m = std::min(m, v);
  return m;
}

double tb_quasi_integral(const tb_quasi* quasi) {
  return quasi ? grid_integral(quasi->grid) : std::numeric_limits<double>::quiet_NaN();
}

tb_status tb_quasi_write_csv(const tb_quasi* quasi, const char* path) {
  return guarded([&] {
    require(quasi, "quasi");
    write_file(path, [&](std::ostream& o) { io::write_quasi_csv(o, quasi->grid); });
  });
}

tb_status tb_quasi_write_difference_csv(const tb_quasi* quasi, const char* path,
                                        double* min_value, double* integral) {
  return guarded([&] {
    require(quasi, "quasi");
    const QuasiGrid& g = quasi->grid;
    DifferenceQuasi d;
    if (g.regime == Regime::oscillatory) {
      // The sinc lobes are better served by line integrals of the function.
      const double h = g.w1.size() > 1 ? g.w1[1] - g.w1[0] : 1.0;
      std::vector<double> w;
      for (double x = -g.w2.back(); x <= g.w1.back() + 0.5 * h; x += h) w.push_back(x);
      d = difference_quasi_direct(g.function(), w, g.w2.back(), 4.0, 0);
    } else {
      d = difference_quasi(g);
    }
    write_file(path, [&](std::ostream& o) { io::write_difference_quasi_csv(o, d); });
    if (min_value) *min_value = d.min_value();
    if (integral) *integral = d.integral();
  });
}

void tb_quasi_free(tb_quasi* quasi) { delete quasi; }

tb_status tb_simulate(const tb_model* model, double eta, long shots, uint64_t seed,
                      unsigned threads, tb_shots** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    auto s = std::make_unique<tb_shots>();
    s->data = sample_shots({from_c(*model), eta, shots, seed, threads});
    *out = s.release();
  });
}

tb_status tb_json_format(const char* json, char** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    io::Json j;
    try {
      j = io::Json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::parse_error, std::string("invalid JSON: ") + e.what());
    }
    *out = dup_string(io::dump_json(j));
  });
}

}  // extern "C"
