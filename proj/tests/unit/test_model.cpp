#include <random>

#include "support.hpp"
#include "twinbeam/model.hpp"

using namespace twinbeam;
using testing::rel_err;

namespace {

MomentSet published_intensity() {
  MomentSet n;
  n.level = MomentLevel::photon;
  n.mean1 = 959.21;
  n.mean2 = 1078.3;
  n.second1 = 971829.7;
  n.second2 = 1218608;
  n.cross = 1088083;
  return photon_to_intensity(n);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("fit of the published moments") {
    const auto m = fit(published_intensity());
    CHECK(m.b1 == doctest::Approx(52.95).epsilon(1e-3));
    CHECK(m.b2 == doctest::Approx(50.81).epsilon(1e-3));
    CHECK(m.m1_modes == doctest::Approx(18.11).epsilon(1e-3));
    CHECK(m.m2_modes == doctest::Approx(21.22).epsilon(1e-3));
    CHECK(m.modes == doctest::Approx(0.5 * (m.m1_modes + m.m2_modes)));
    CHECK(m.d12 == doctest::Approx(52.29).epsilon(1e-3));
  }

  TEST_CASE("mode policies") {
    const auto w = published_intensity();
    const auto a1 = fit(w, ModePolicy::arm1());
    const auto a2 = fit(w, ModePolicy::arm2());
    const auto ex = fit(w, ModePolicy::explicit_modes(19.66));
    CHECK(a1.modes == a1.m1_modes);
    CHECK(a2.modes == a2.m2_modes);
    CHECK(ex.modes == 19.66);
    CHECK(ex.d12 * ex.d12 * 19.66 == doctest::Approx(w.covariance()));
    CHECK(parse_mode_policy("arm2", 0).kind == ModePolicyKind::arm2);
    CHECK(parse_mode_policy("explicit", 7).value == 7);
    CHECK_ERRC(parse_mode_policy("median", 0), Errc::invalid_argument);
    CHECK_ERRC(fit(w, ModePolicy::explicit_modes(-1)), Errc::invalid_argument);
  }

  TEST_CASE("fit input checks") {
    auto w = published_intensity();
    CHECK_ERRC(fit(intensity_to_photon_moments(w)), Errc::level_mismatch);
    w.mean1 = 1000;
    w.second1 = 1e6;
    CHECK_ERRC(fit(w), Errc::zero_variance);
    w = published_intensity();
    w.cross = w.mean1 * w.mean2 - 1;
    CHECK_ERRC(fit(w), Errc::negative_cross_covariance);
  }

  TEST_CASE("forward moments and round trip") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double b1 = 0.01 + 80 * u(rng), b2 = 0.01 + 80 * u(rng);
      const double modes = 1 + 500 * u(rng);
      const double d2 = b1 * b2 * (0.5 + 0.5 * u(rng)) + u(rng) * std::min(b1, b2);
      const auto m = TwinBeamModel::make(b1, b2, modes, std::sqrt(d2));
      const auto w = forward_moments(m);
      CHECK(w.mean1 == doctest::Approx(modes * b1));
      const auto back = fit(w, ModePolicy::explicit_modes(modes));
      REQUIRE(rel_err(back.b1, b1) < 1e-12);
      REQUIRE(rel_err(back.b2, b2) < 1e-12);
      REQUIRE(rel_err(back.d12, m.d12) < 1e-12);
      REQUIRE(rel_err(fit(w).modes, modes) < 1e-12);
    }
  }

  TEST_CASE("determinants and threshold ordering") {
    const auto m = testing::published();
    CHECK(m.k() == doctest::Approx(52.946 * 50.820 - 52.2957 * 52.2957));
    CHECK(determinant_k_s(m, 1.0) == doctest::Approx(m.k()));
    CHECK(m.k_s(0.1) > 0);
    CHECK(m.k_s(0.2) < 0);
    const double s_th = threshold_ordering(m);
    CHECK(s_th == doctest::Approx(1 + m.b1 + m.b2 - std::sqrt(std::pow(m.b1 - m.b2, 2) + 4 * m.d12 * m.d12)));
    CHECK(std::fabs(m.k_s(s_th)) < 1e-9);
    CHECK_ERRC(determinant_k_s(m, 1.5), Errc::out_of_range);
    // Classical model: K_s > 0 for every s, no threshold in range.
    CHECK_ERRC(threshold_ordering(testing::synthetic()), Errc::out_of_range);
  }

  TEST_CASE("certificates of the published model") {
    const auto m = testing::published();
    MomentSet n;
    n.level = MomentLevel::photon;
    n.mean1 = 959.21;
    n.mean2 = 1078.3;
    n.second1 = 971829.7;
    n.second2 = 1218608;
    n.cross = 1088083;
    const auto r = nonclassicality_report(m, n);
    CHECK(r.verdict() == "nonclassical");
    CHECK(r.lower_bound_holds);
    CHECK(r.upper_bound_holds);
    CHECK(r.sub_shot_noise_bound_holds);
    CHECK(r.physical);
    CHECK(r.lambda == doctest::Approx(principal_squeeze_variance(m)));
    CHECK(r.var_w_diff == doctest::Approx(difference_intensity_variance(m)));
    CHECK(r.r == doctest::Approx((n.mean1 + n.mean2 + r.var_w_diff) / (n.mean1 + n.mean2)));
    CHECK((r.r < 1) == (r.var_w_diff < 0));
    CHECK(r.c == doctest::Approx(0.997).epsilon(1e-3));
    CHECK(r.c_raw == doctest::Approx(0.99991).epsilon(1e-4));
  }

  TEST_CASE("classical and unphysical verdicts") {
    const auto c = testing::synthetic();
    const auto rc = nonclassicality_report(c, intensity_to_photon_moments(forward_moments(c)));
    CHECK(rc.verdict() == "classical");
    CHECK_FALSE(rc.lower_bound_holds);
    CHECK(rc.r >= 1);
    const auto bad = TwinBeamModel::make(1, 1, 4, 3);
    CHECK_FALSE(bad.physical());
    CHECK_ERRC(bad.require_physical(), Errc::unphysical_model);
    const auto rb = nonclassicality_report(bad, intensity_to_photon_moments(forward_moments(bad)));
    CHECK(rb.verdict() == "unphysical");
    CHECK_FALSE(rb.upper_bound_holds);
  }

  TEST_CASE("make rejects invalid parameters") {
    CHECK_ERRC(TwinBeamModel::make(0, 1, 1, 1), Errc::invalid_argument);
    CHECK_ERRC(TwinBeamModel::make(1, 1, -2, 1), Errc::invalid_argument);
    CHECK_ERRC(TwinBeamModel::make(1, 1, 1, -1), Errc::invalid_argument);
  }

  TEST_CASE("mode bound") {
    auto report = [](const TwinBeamModel& m) {
      return nonclassicality_report(m, intensity_to_photon_moments(forward_moments(m)));
    };
    CHECK(report(TwinBeamModel::make(2, 3.9, 3, 2.9)).mode_bound_ok);
    CHECK_FALSE(report(TwinBeamModel::make(2, 9, 3, 4.3)).mode_bound_ok);
  }
}
