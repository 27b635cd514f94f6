#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <random>

#include "flowmux/fair_share.hpp"

using namespace flowmux;

namespace {

// Independent progressive-filling oracle: per-flow, no grouping, no shared
// scratch. Kept deliberately naive; the library implementation is checked
// against it on random instances.
std::vector<double> oracle_max_min(const std::vector<double>& cap,
                                   const std::vector<std::vector<LinkId>>& paths) {
  const std::size_t nf = paths.size(), nl = cap.size();
  std::vector<double> rate(nf, 0.0), residual(cap);
  std::vector<char> frozen(nf, 0);
  std::size_t left = nf;
  while (left > 0) {
    double best_share = std::numeric_limits<double>::infinity();
    std::size_t best_link = nl;
    for (std::size_t l = 0; l < nl; ++l) {
      int cnt = 0;
      for (std::size_t f = 0; f < nf; ++f)
        if (!frozen[f])
          for (LinkId x : paths[f])
            if (x == l) {
              ++cnt;
              break;
            }
      if (cnt == 0) continue;
      double share = residual[l] / cnt;
      if (share < best_share) {
        best_share = share;
        best_link = l;
      }
    }
    REQUIRE(best_link != nl);
    for (std::size_t f = 0; f < nf; ++f) {
      if (frozen[f]) continue;
      bool on = false;
      for (LinkId x : paths[f])
        if (x == best_link) on = true;
      if (!on) continue;
      frozen[f] = 1;
      rate[f] = best_share;
      --left;
      for (LinkId x : paths[f]) residual[x] -= best_share;
    }
  }
  return rate;
}

}  // namespace

TEST_CASE("two flows share one link equally") {
  MaxMinFair mm;
  auto rates = mm.rates({100e6}, {{0}, {0}});
  CHECK(rates[0] == 50e6);
  CHECK(rates[1] == 50e6);
}

TEST_CASE("two-link chain with a crossing flow") {
  // A crosses both links, B only the first, C only the second; both 100 Mbps.
  MaxMinFair mm;
  auto rates = mm.rates({100e6, 100e6}, {{0, 1}, {0}, {1}});
  CHECK_THAT(rates[0], Catch::Matchers::WithinRel(50e6, 1e-12));
  CHECK_THAT(rates[1], Catch::Matchers::WithinRel(50e6, 1e-12));
  CHECK_THAT(rates[2], Catch::Matchers::WithinRel(50e6, 1e-12));
}

TEST_CASE("classic bottleneck asymmetry") {
  // one thin link (10) shared by A,B; thick link (100) shared by B,C:
  // A = 5, B = 5, C = 95
  MaxMinFair mm;
  auto rates = mm.rates({10.0, 100.0}, {{0}, {0, 1}, {1}});
  CHECK_THAT(rates[0], Catch::Matchers::WithinRel(5.0, 1e-12));
  CHECK_THAT(rates[1], Catch::Matchers::WithinRel(5.0, 1e-12));
  CHECK_THAT(rates[2], Catch::Matchers::WithinRel(95.0, 1e-12));
}

TEST_CASE("contract violations") {
  MaxMinFair mm;
  CHECK_THROWS_AS(mm.rates({10.0}, {{}}), std::logic_error);     // empty path
  CHECK_THROWS_AS(mm.rates({10.0}, {{3}}), std::logic_error);    // unknown link
}

TEST_CASE("random instances match the oracle") {
  std::mt19937_64 rng(424242);
  MaxMinFair mm;
  for (int iter = 0; iter < 300; ++iter) {
    int nl = 1 + int(rng() % 10);
    int nf = 1 + int(rng() % 20);
    std::vector<double> cap(nl);
    for (double& c : cap) c = 1.0 + double(rng() % 10000) / 10.0;
    std::vector<std::vector<LinkId>> paths(nf);
    for (auto& p : paths) {
      int len = 1 + int(rng() % std::min(nl, 4));
      while (int(p.size()) < len) {
        LinkId l = LinkId(rng() % nl);
        bool dup = false;
        for (LinkId x : p) dup |= (x == l);
        if (!dup) p.push_back(l);
      }
    }
    auto got = mm.rates(cap, paths);
    auto want = oracle_max_min(cap, paths);
    for (int f = 0; f < nf; ++f)
      REQUIRE_THAT(got[f], Catch::Matchers::WithinRel(want[f], 1e-9) ||
                               Catch::Matchers::WithinAbs(want[f], 1e-9));

    // no link over capacity
    std::vector<double> agg(nl, 0.0);
    for (int f = 0; f < nf; ++f)
      for (LinkId l : paths[f]) agg[l] += got[f];
    for (int l = 0; l < nl; ++l) CHECK(agg[l] <= cap[l] * (1.0 + 1e-9));
  }
}

TEST_CASE("grouped form equals per-flow form") {
  std::mt19937_64 rng(99);
  MaxMinFair mm;
  for (int iter = 0; iter < 100; ++iter) {
    int nl = 2 + int(rng() % 8);
    int ng = 1 + int(rng() % 6);
    std::vector<double> cap(nl);
    for (double& c : cap) c = 10.0 + double(rng() % 1000);
    std::vector<std::vector<LinkId>> gpaths(ng);
    std::vector<std::int64_t> gcount(ng);
    std::vector<std::vector<LinkId>> fpaths;
    for (int g = 0; g < ng; ++g) {
      int len = 1 + int(rng() % 3);
      for (int k = 0; k < len; ++k) {
        LinkId l = LinkId(rng() % nl);
        bool dup = false;
        for (LinkId x : gpaths[g]) dup |= (x == l);
        if (!dup) gpaths[g].push_back(l);
      }
      gcount[g] = 1 + std::int64_t(rng() % 5);
      for (int k = 0; k < gcount[g]; ++k) fpaths.push_back(gpaths[g]);
    }
    std::vector<double> grate;
    mm.group_rates(cap, gpaths, gcount, grate);
    auto frate = mm.rates(cap, fpaths);
    std::size_t fi = 0;
    for (int g = 0; g < ng; ++g)
      for (int k = 0; k < gcount[g]; ++k, ++fi)
        REQUIRE_THAT(frate[fi], Catch::Matchers::WithinRel(grate[g], 1e-9) ||
                                    Catch::Matchers::WithinAbs(grate[g], 1e-12));
  }
}

TEST_CASE("empty groups get zero and do not disturb others") {
  MaxMinFair mm;
  std::vector<double> rates;
  mm.group_rates({100.0}, {{0}, {0}}, {0, 4}, rates);
  CHECK(rates[0] == 0.0);
  CHECK_THAT(rates[1], Catch::Matchers::WithinRel(25.0, 1e-12));
}
