#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "rsma/harness.hpp"
#include "rsma/power_allocator.hpp"
#include "rsma/rate_engine.hpp"

using namespace rsma;

namespace {

// One user, one device on its beam, scalar gains.
GainTable scalar_table(double h0, double hu, double g0, double g1) {
  GainTable g;
  g.user.resize(1, 2);
  g.user << h0, hu;
  g.device.resize(2, 1);
  g.device << g0, g1;
  return g;
}

Allocation one_user(double p0, double pu, double pd) {
  Allocation a = Allocation::zeros(1, 1);
  a.p_common = p0;
  a.p_private(0) = pu;
  a.p_device(0) = pd;
  return a;
}

}  // namespace

TEST_CASE("common stream SINR") {
  const GainTable g = scalar_table(2.0, 1.0, 0.0, 0.0);
  const BeamAssignment none{{kUnassigned}};
  const RSSelection rs = RSSelection::all(1, true);
  Allocation a = one_user(3.0, 4.0, 0.0);
  const LinkState st{g, none, rs, a, 2.0};
  CHECK(common_sinr(0, st) == doctest::Approx(1.0));
  CHECK(rate_of(common_sinr(0, st)) == doctest::Approx(1.0));
  a.p_common = 0.0;
  CHECK(common_sinr(0, st) == 0.0);
}

TEST_CASE("private stream SINR") {
  const GainTable g = scalar_table(1.0, 1.0, 0.0, 0.0);
  const BeamAssignment none{{kUnassigned}};
  const Allocation a = one_user(1.0, 1.0, 0.0);
  const RSSelection rs = RSSelection::all(1, true);
  const RSSelection sdma = RSSelection::all(1, false);
  const double with_sic = private_sinr(0, {g, none, rs, a, 1.0});
  const double without = private_sinr(0, {g, none, sdma, a, 1.0});
  CHECK(with_sic == doctest::Approx(1.0));
  CHECK(without == doctest::Approx(0.5));
  CHECK(without < with_sic);
}

TEST_CASE("device SINR") {
  SUBCASE("interference free") {
    const GainTable g = scalar_table(1.0, 1.0, 0.0, 0.0);
    GainTable gg = g;
    gg.device << 0.0, 3.0;
    const BeamAssignment a{{1}};
    const Allocation p = one_user(0.0, 0.0, 2.0);
    CHECK(device_sinr(0, {gg, a, RSSelection::all(1, false), p, 0.5}) == doctest::Approx(12.0));
  }
  SUBCASE("unit interference") {
    const GainTable g = scalar_table(1.0, 1.0, 0.0, 1.0);
    const BeamAssignment a{{1}};
    const Allocation p = one_user(0.0, 1.0, 1.0);
    const double sinr = device_sinr(0, {g, a, RSSelection::all(1, false), p, 1.0});
    CHECK(sinr == doctest::Approx(0.5));
    CHECK(rate_of(sinr) == doctest::Approx(0.5849625007).epsilon(1e-9));
  }
  SUBCASE("unassigned device") {
    const GainTable g = scalar_table(1.0, 1.0, 0.0, 1.0);
    const BeamAssignment a{{kUnassigned}};
    const Allocation p = one_user(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(device_sinr(0, {g, a, RSSelection::all(1, false), p, 1.0}), Unassigned);
  }
}

TEST_CASE("common rate is capped by the weakest RS user") {
  // h_{u,0} P_0 / (h_{u,u} P_u + noise) = 3 for user 0 and 1 for user 1.
  GainTable g;
  g.user.resize(2, 3);
  g.user << 3.0, 1.0, 0.0,  //
      1.0, 0.0, 1.0;
  g.device = Eigen::MatrixXd::Zero(3, 0);
  Allocation a = Allocation::zeros(2, 0);
  a.p_common = 1.0;
  a.p_private << 0.0, 0.0;
  a.r_common << 0.5, 0.5;
  SystemConfig cfg = reference_config();
  cfg.noise_power_w = 1.0;
  const RateReport rep = evaluate(g, BeamAssignment{{}}, RSSelection::all(2, true), a, cfg);
  CHECK(rep.common_rates(0) == doctest::Approx(2.0));
  CHECK(rep.common_rates(1) == doctest::Approx(1.0));
  CHECK(rep.common_cap == doctest::Approx(1.0));
  CHECK(rep.sum_device_rate == 0.0);
}

TEST_CASE("constraint verification") {
  SystemConfig cfg = reference_config();
  const GainTable g = scalar_table(1e-9, 1e-9, 1e-10, 1e-9);
  const BeamAssignment a{{1}};
  const RSSelection sdma = RSSelection::all(1, false);

  const RateReport zero = evaluate(g, a, sdma, Allocation::zeros(1, 1), cfg);
  const ConstraintCheck c0 = verify_constraints(zero, cfg);
  CHECK_FALSE(c0.passed());
  CHECK(c0.get("min_rate").value == doctest::Approx(cfg.min_rate_bps_hz));
  CHECK(zero.sum_device_rate == 0.0);

  const AllocationProblem prob{g, a, sdma, cfg};
  const AllocationResult res = allocate(prob);
  const RateReport ok = evaluate(g, a, sdma, res.allocation, cfg);
  CHECK(verify_constraints(ok, cfg).passed());

  SystemConfig relaxed = cfg;
  relaxed.max_power_w *= 2.0;
  CHECK(verify_constraints(ok, relaxed).passed());

  Allocation over = res.allocation;
  const double scale = 1.01 * cfg.max_power_w / over.total_power();
  over.p_common *= scale;
  over.p_private *= scale;
  over.p_device *= scale;
  const ConstraintCheck c1 = verify_constraints(evaluate(g, a, sdma, over, cfg), cfg);
  int failed = 0;
  for (const auto& r : c1.residuals) failed += !r.ok();
  CHECK(failed == 1);
  CHECK_FALSE(c1.get("budget").ok());
}

TEST_CASE("engine agrees with the brute-force rates") {
  const SystemConfig cfg = reference_config();
  const TrialScenario ts = draw_trial_scenario(cfg, 5);
  const int k = cfg.n_users;
  const std::vector<int> beams = {3, 1, 2, 8, 4, 6, 5, 7};
  const std::vector<int> s = {1, 0, 1, 1, 0, 0, 1, 0};
  BeamAssignment assign{beams};
  RSSelection sel;
  for (int v : s) sel.s.push_back(static_cast<std::uint8_t>(v));
  Allocation a = Allocation::zeros(k, k);
  oracle::Powers p;
  p.stream.assign(k + 1, 0.0);
  p.device.assign(k, 0.0);
  a.p_common = p.stream[0] = 0.2;
  for (int u = 0; u < k; ++u) {
    a.p_private(u) = p.stream[u + 1] = 0.05 + 0.01 * u;
    a.p_device(u) = p.device[u] = 0.03 + 0.002 * u;
  }
  std::vector<int> beam_of(beams.begin(), beams.end());
  const oracle::Rates want = oracle::rates(ts.gains, beam_of, s, p, cfg.noise_power_w);
  const RateReport got = evaluate(ts.gains, assign, sel, a, cfg);
  for (int u = 0; u < k; ++u) {
    CHECK(got.private_rates(u) == doctest::Approx(want.priv[u]).epsilon(1e-9));
    if (s[u]) CHECK(got.common_rates(u) == doctest::Approx(want.common[u]).epsilon(1e-9));
    CHECK(got.device_rates(u) == doctest::Approx(want.device[u]).epsilon(1e-9));
  }
}

TEST_CASE("swapping two devices only changes device gains") {
  const SystemConfig cfg = reference_config();
  const TrialScenario ts = draw_trial_scenario(cfg, 9);
  const int k = cfg.n_users;
  BeamAssignment a{{1, 2, 3, 4, 5, 6, 7, 8}};
  BeamAssignment b = a;
  std::swap(b.beam_of[2], b.beam_of[5]);
  const RSSelection sel = RSSelection::all(k, true);
  Allocation p = Allocation::zeros(k, k);
  p.p_common = 0.3;
  p.p_private.setConstant(0.05);
  p.p_device.setConstant(0.03);
  p.r_common.setConstant(0.1);
  Allocation q = p;
  std::swap(q.p_device(2), q.p_device(5));
  const RateReport ra = evaluate(ts.gains, a, sel, p, cfg);
  const RateReport rb = evaluate(ts.gains, b, sel, q, cfg);
  CHECK(rb.total_power == doctest::Approx(ra.total_power));
  for (int u = 0; u < k; ++u) CHECK(rb.private_rates(u) == doctest::Approx(ra.private_rates(u)).epsilon(1e-12));

  std::vector<int> beam_of(b.beam_of.begin(), b.beam_of.end());
  oracle::Powers pw;
  pw.stream.assign(k + 1, 0.05);
  pw.stream[0] = 0.3;
  pw.device.assign(k, 0.03);
  const oracle::Rates want = oracle::rates(ts.gains, beam_of, std::vector<int>(k, 1), pw, cfg.noise_power_w);
  for (int m = 0; m < k; ++m) CHECK(rb.device_rates(m) == doctest::Approx(want.device[m]).epsilon(1e-9));
}
