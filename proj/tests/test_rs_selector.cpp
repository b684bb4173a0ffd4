#include <cmath>
#include <map>

#include "doctest.h"
#include "rsma/rs_selector.hpp"

using namespace rsma;

TEST_CASE("acceptance probability") {
  CHECK(flip_probability(0.0, 5.0) == 1.0);
  CHECK(flip_probability(0.3, 5.0) == 1.0);
  CHECK(flip_probability(-2.0, 2.0) == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(flip_probability(-6.0, 2.0) == doctest::Approx(0.049787).epsilon(1e-5));
  CHECK(flip_probability(-1.0, 1e-300) == 0.0);
}

TEST_CASE("single user picks the better selection") {
  for (const auto& [zero, one] : {std::pair{1.0, 2.0}, std::pair{3.0, 0.5}, std::pair{-HUGE_VAL, 0.2}}) {
    auto f = [&](const RSSelection& s) { return s.s[0] ? one : zero; };
    Rng rng(5);
    const AnnealResult r = anneal(RSSelection::all(1, true), f, rng, AnnealSchedule{});
    CHECK(r.best_rate == std::max(zero, one));
    CHECK(r.best.s[0] == (one >= zero ? 1 : 0));
  }
}

TEST_CASE("annealer against exhaustive search on random tables") {
  int hits = 0;
  int runs = 0;
  for (int k = 2; k <= 4; ++k) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng table_rng(1000 + seed);
      std::vector<double> table(std::size_t{1} << k);
      for (auto& v : table) v = 4.0 * uniform01(table_rng);
      table[uniform_index(table_rng, table.size())] = -INFINITY;
      double best = -INFINITY;
      for (double v : table) best = std::max(best, v);

      int calls = 0;
      auto f = [&](const RSSelection& s) {
        ++calls;
        return table[s.mask()];
      };
      Rng rng(seed);
      const AnnealSchedule sched{20.0, 0.9, 4 * k};
      const AnnealResult r = anneal(RSSelection::all(k, true), f, rng, sched);
      CHECK(r.best_rate <= best);
      CHECK(r.best_rate == table[r.best.mask()]);
      CHECK(calls == r.evaluations);
      CHECK(calls <= static_cast<int>(table.size()));
      CHECK(r.trace.size() == static_cast<std::size_t>(r.steps));
      for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1]);
      hits += r.best_rate == best;
      ++runs;
    }
  }
  MESSAGE("annealer hit the optimum on " << hits << " of " << runs);
  CHECK(hits >= 0.9 * runs);
}

TEST_CASE("wanders through infeasible selections") {
  // Only the all-zero selection is feasible.
  auto f = [](const RSSelection& s) { return s.any() ? -INFINITY : 1.0; };
  Rng rng(3);
  const AnnealResult r = anneal(RSSelection::all(3, true), f, rng, AnnealSchedule{20.0, 0.9, 12});
  CHECK(r.best_rate == 1.0);
  CHECK(r.best.mask() == 0);

  auto none = [](const RSSelection&) { return -INFINITY; };
  const AnnealResult lost = anneal(RSSelection::all(3, true), none, rng, AnnealSchedule{20.0, 0.9, 12});
  CHECK(lost.best_rate == -INFINITY);
}

TEST_CASE("same seed, same chain") {
  auto f = [](const RSSelection& s) { return std::sin(1.0 + static_cast<double>(s.mask())); };
  Rng a(9);
  Rng b(9);
  const AnnealResult ra = anneal(RSSelection::all(5, true), f, a, AnnealSchedule{});
  const AnnealResult rb = anneal(RSSelection::all(5, true), f, b, AnnealSchedule{});
  CHECK(ra.proposals == rb.proposals);
  CHECK(ra.trace == rb.trace);
  CHECK(ra.best.mask() == rb.best.mask());
}
