#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fpp/passage.hpp"
#include "oracles.hpp"

using namespace fpp;

namespace {

// deterministic small-integer weights for oracle comparisons
oracles::MapWeights integer_weights_on(const Window& win, std::uint64_t seed,
                                       const std::vector<double>& values) {
  oracles::MapWeights mw;
  rng::Stream stream(seed);
  for (std::size_t i = 0; i < win.size(); ++i) {
    Site s = win.site_at(i);
    for (int a = 0; a < win.dim(); ++a) {
      Site t = s.shifted(a, 1);
      if (win.contains(t))
        mw.w[Edge(s, t)] = values[static_cast<std::size_t>(stream.next_unit() * values.size())];
    }
  }
  return mw;
}

}  // namespace

TEST_CASE("dijkstra: unit weights give the L1 metric") {
  auto unit = [](const Edge&) { return 1.0; };
  Window win(origin(2), 4);
  PassageField pf = dijkstra(unit, origin(2), win);
  CHECK(pf.at(origin(2)) == 0.0);
  for (std::size_t i = 0; i < win.size(); ++i)
    CHECK(pf.dist[i] == static_cast<double>(win.site_at(i).l1_norm()));
  CHECK(pf.boundary_min == 4.0);
}

TEST_CASE("dijkstra vs simple-path enumeration on a 3x3 window") {
  Window win(origin(2), 1);  // 9 sites, 12 edges
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracles::MapWeights mw = integer_weights_on(win, seed, {1.0, 2.0, 3.0});
    PassageField pf = dijkstra(mw, Site{-1, -1}, win);
    for (std::size_t i = 0; i < win.size(); ++i) {
      double oracle = oracles::min_simple_path(mw, Site{-1, -1}, win.site_at(i), win);
      CHECK(pf.dist[i] == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("dijkstra parent chains realize the shortest-path value") {
  Window win(origin(2), 3);
  WeightField field(Distribution::exponential(1.0), 17);
  PassageField pf = dijkstra(field, origin(2), win);
  for (std::size_t i = 0; i < win.size(); ++i) {
    double walked = 0.0;
    std::size_t cur = i;
    while (cur != win.index_of(origin(2))) {
      std::size_t par = pf.parent[cur];
      REQUIRE(par != Window::npos);
      walked += field(Edge(win.site_at(cur), win.site_at(par)));
      CHECK(pf.dist[par] <= pf.dist[cur]);
      cur = par;
    }
    CHECK(walked == doctest::Approx(pf.dist[i]).epsilon(1e-12));
  }
}

TEST_CASE("exact_passage_time: constant(1) to (5,0) certifies with T = 5") {
  WeightField field(Distribution::constant(1.0), 1);
  ExactPassageResult r = exact_passage_time(field, origin(2), Site{5, 0});
  CHECK(r.certified);
  CHECK(r.time == 5.0);
  CHECK(r.certificate_slack >= 0.0);
}

TEST_CASE("exact_passage_time matches an oversized-window oracle") {
  for (std::uint64_t seed : {3, 4, 5, 6, 7}) {
    WeightField field(Distribution::exponential(1.0), seed);
    ExactPassageResult r = exact_passage_time(field, origin(2), Site{4, 3});
    REQUIRE(r.certified);
    Window big(origin(2), 40);
    PassageField oracle = dijkstra(field, origin(2), big);
    CHECK(r.time == doctest::Approx(oracle.at(Site{4, 3})).epsilon(1e-12));
  }
}

TEST_CASE("certificate soundness: doubling past certification never changes T") {
  for (std::uint64_t seed : {10, 11, 12}) {
    WeightField field(Distribution::uniform(0.2, 1.0), seed);
    ExactPassageResult r = exact_passage_time(field, origin(2), Site{6, -2});
    REQUIRE(r.certified);
    Window doubled(r.window.center(), 2 * r.window.radius());
    PassageField pf = dijkstra(field, origin(2), doubled);
    CHECK(pf.at(Site{6, -2}) == doctest::Approx(r.time).epsilon(1e-12));
  }
}

TEST_CASE("exact_passage_time reports uncertified at the radius cap") {
  // heavy certification demand: zero atoms and a tiny cap
  WeightField field(Distribution::atom_mixture(0.3, 1.0), 8);
  ExactPassageOptions opt;
  opt.radius_cap = 4;
  ExactPassageResult r = exact_passage_time(field, origin(2), Site{20, 0}, opt);
  CHECK(!r.certified);
  CHECK(r.time < kInf);  // still an upper bound
}

TEST_CASE("geodesic dag: constant(1) to (1,1) has 4 edges, 2 geodesics, no pivotal edge") {
  WeightField field(Distribution::constant(1.0), 1);
  ExactPassageResult r = exact_passage_time(field, origin(2), Site{1, 1});
  GeodesicDag dag = geodesic_dag(field, r.forward, r.backward, r.time, 0.0);
  CHECK(dag.edges.size() == 4);
  CHECK(dag.geodesic_count == 2);
  CHECK(pivotal_edges(dag).empty());
  CHECK(!dag.tie_collapse);
}

TEST_CASE("geodesic dag: constant(1) to (2,0) is the straight segment") {
  WeightField field(Distribution::constant(1.0), 1);
  ExactPassageResult r = exact_passage_time(field, origin(2), Site{2, 0});
  GeodesicDag dag = geodesic_dag(field, r.forward, r.backward, r.time, 0.0);
  CHECK(dag.geodesic_count == 1);
  std::vector<Edge> expect = {Edge(Site{0, 0}, Site{1, 0}), Edge(Site{1, 0}, Site{2, 0})};
  CHECK(dag.edges.size() == 2);
  CHECK(pivotal_edges(dag) == expect);
}

TEST_CASE("continuous weights: geodesics are a.s. unique") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    WeightField field(Distribution::exponential(1.0), seed);
    ExactPassageResult r = exact_passage_time(field, origin(2), Site{3, 2});
    REQUIRE(r.certified);
    double eps = geodesic_tolerance(r.time, false);
    GeodesicDag dag = geodesic_dag(field, r.forward, r.backward, r.time, eps);
    CHECK(dag.geodesic_count == 1);
    CHECK(pivotal_edges(dag).size() == dag.edges.size());  // N=1: all DAG edges pivotal
  }
}

TEST_CASE("pivotal edges vs brute-force geodesic enumeration") {
  Window win(origin(2), 1);
  Site src{-1, -1}, dst{1, 1};
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    oracles::MapWeights mw = integer_weights_on(win, seed, {1.0, 2.0, 3.0});
    PassageField fwd = dijkstra(mw, src, win);
    PassageField bwd = dijkstra(mw, dst, win);
    double total = fwd.at(dst);
    GeodesicDag dag = geodesic_dag(mw, fwd, bwd, total, 0.0);
    auto oracle = oracles::enumerate_geodesics(mw, src, dst, win, 1e-9);
    CHECK(dag.geodesic_count == BigInt(oracle.count));
    CHECK(pivotal_edges(dag) == oracle.pivotal);
  }
}

TEST_CASE("deletion-based pivotal detection matches counting and survives zero ties") {
  Window win(origin(2), 1);
  Site src{-1, -1}, dst{1, 1};
  // strictly positive weights: deletion test equals DAG counting
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    oracles::MapWeights mw = integer_weights_on(win, seed, {1.0, 2.0});
    PassageField fwd = dijkstra(mw, src, win);
    double total = fwd.at(dst);
    PassageField bwd = dijkstra(mw, dst, win);
    GeodesicDag dag = geodesic_dag(mw, fwd, bwd, total, 0.0);
    CHECK(pivotal_edges_by_deletion(mw, src, dst, win, total, 0.0) == pivotal_edges(dag));
  }
  // zero-weight ties: counting reports the collapse, deletion matches the oracle
  std::size_t collapses = 0;
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    oracles::MapWeights mw = integer_weights_on(win, seed, {0.0, 1.0});
    PassageField fwd = dijkstra(mw, src, win);
    double total = fwd.at(dst);
    PassageField bwd = dijkstra(mw, dst, win);
    GeodesicDag dag = geodesic_dag(mw, fwd, bwd, total, 0.0);
    if (dag.tie_collapse) ++collapses;
    auto oracle = oracles::enumerate_geodesics(mw, src, dst, win, 1e-9);
    CHECK(pivotal_edges_by_deletion(mw, src, dst, win, total, 0.0) == oracle.pivotal);
  }
  CHECK(collapses > 0);  // the diagnostic actually fires on zero-atom laws
}

TEST_CASE("ball: sublevel sets") {
  WeightField unit(Distribution::constant(1.0), 1);
  Window win(origin(2), 5);
  PassageField pf = dijkstra(unit, origin(2), win);
  Ball b = ball(pf, 2.5);
  CHECK(b.certified);
  for (const Site& s : b.sites) CHECK(s.l1_norm() <= 2);
  CHECK(b.sites.size() == 13);  // L1 ball of radius 2 in d=2
  CHECK(b.contains(Site{2, 0}));
  CHECK(!b.contains(Site{2, 1}));

  // t = 0 with continuous weights: only the source
  WeightField cont(Distribution::exponential(1.0), 5);
  PassageField pfc = dijkstra(cont, origin(2), win);
  Ball b0 = ball(pfc, 0.0);
  CHECK(b0.sites == std::vector<Site>{origin(2)});

  // monotone nesting
  Ball b1 = ball(pfc, 1.0), b2 = ball(pfc, 2.0);
  for (const Site& s : b1.sites) CHECK(b2.contains(s));
  CHECK(ball(pfc, 100.0).certified == false);  // boundary reached
}

TEST_CASE("box_to_box_time: reductions") {
  WeightField field(Distribution::exponential(1.0), 9);
  Window win(origin(2), 8);
  std::vector<Site> a = {Site{0, 0}, Site{0, 1}};
  std::vector<Site> overlapping = {Site{0, 1}, Site{3, 3}};
  CHECK(box_to_box_time(field, a, overlapping, win) == 0.0);
  PassageField pf = dijkstra(field, origin(2), win);
  CHECK(box_to_box_time(field, {origin(2)}, {Site{4, 2}}, win) ==
        doctest::Approx(pf.at(Site{4, 2})).epsilon(1e-12));
  CHECK_THROWS_AS(box_to_box_time(field, {}, a, win), std::invalid_argument);
}

TEST_CASE("box sandwich holds pathwise on 100 random fields") {
  const int m = 4;
  MacroBox b0 = macro_box(origin(2), m, 0.5);  // radius 1
  Site far{m, 0};
  MacroBox b1 = macro_box(far, m, 0.5);
  Window win(Site{m / 2, 0}, m / 2 + b0.radius + 8);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    WeightField field(Distribution::uniform(0.1, 1.0), seed);
    double tau_m = box_to_box_time(field, b0.sites(), b1.sites(), win);
    PassageField pf = dijkstra(field, origin(2), win);
    double tau = pf.at(far);
    double j0 = box_diameter_time(field, b0, win).value;
    double j1 = box_diameter_time(field, b1, win).value;
    CHECK(tau_m <= tau + 1e-12);
    CHECK(tau <= tau_m + j0 + j1 + 1e-12);
  }
}

TEST_CASE("box_diameter_time: unit weights and all-pairs oracle") {
  WeightField unit(Distribution::constant(1.0), 1);
  MacroBox box = macro_box(origin(2), 2, 1.0);  // radius 1
  Window win(origin(2), 6);
  CHECK(box_diameter_time(unit, box, win).value == 4.0);  // L1 diameter of the 3x3 box

  for (std::uint64_t seed : {21, 22, 23}) {
    WeightField field(Distribution::uniform(0.5, 2.0), seed);
    BoxDiameterResult r = box_diameter_time(field, box, win);
    double brute = 0.0;
    auto sites = box.sites();
    for (const Site& a : sites)
      for (const Site& b : sites)
        if (!(a == b)) brute = std::max(brute, dijkstra(field, a, win).at(b));
    CHECK(r.value == doctest::Approx(brute).epsilon(1e-12));
    CHECK(r.certified);
  }
}

TEST_CASE("restricted_time: trivia and enumeration oracle") {
  LocalBox box = local_box(origin(2));
  WeightField unit(Distribution::constant(1.0), 1);
  CHECK(restricted_time(unit, box, Site{0, 0}, Site{0, 0}) == 0.0);
  CHECK(restricted_time(unit, box, Site{0, 0}, Site{0, 1}) == 1.0);
  CHECK_THROWS_AS(restricted_time(unit, box, Site{0, 0}, Site{2, 0}), std::invalid_argument);

  // oracle: brute force over simple paths within the 12-edge box
  Window boxwin(origin(2), 1);
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    oracles::MapWeights mw = integer_weights_on(boxwin, seed, {0.5, 1.0, 2.5});
    for (const Site& v : box.vertices) {
      double got = restricted_time(mw, box, Site{-1, -1}, v);
      double oracle = oracles::min_simple_path(mw, Site{-1, -1}, v, boxwin);
      CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("pathwise triangle inequality in certified regions") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    WeightField field(Distribution::exponential(1.0), seed);
    double oxy = exact_passage_time(field, origin(2), Site{5, 2}).time;
    double ox = exact_passage_time(field, origin(2), Site{3, 1}).time;
    double xy = exact_passage_time(field, Site{3, 1}, Site{5, 2}).time;
    CHECK(oxy <= ox + xy + 1e-12);
  }
}

TEST_CASE("min_saw_time: trivia") {
  WeightField unit(Distribution::constant(1.0), 1);
  Window win(origin(2), 8);
  CHECK(min_saw_time(unit, origin(2), 5, win).min_time == 5.0);

  WeightField field(Distribution::uniform(0.0, 1.0), 3);
  double m1 = min_saw_time(field, origin(2), 1, win).min_time;
  double incident = kInf;
  for (const Site& n : neighbors(origin(2)))
    incident = std::min(incident, field(Edge(origin(2), n)));
  CHECK(m1 == incident);
  CHECK_THROWS_AS(min_saw_time(unit, origin(2), 0, win), std::invalid_argument);
  CHECK_THROWS_AS(min_saw_time(unit, origin(2), 9, win), std::invalid_argument);
}

TEST_CASE("min_saw_time pruned vs unpruned enumeration, m <= 6") {
  Window win(origin(2), 6);
  for (std::uint64_t seed = 70; seed < 90; ++seed) {
    oracles::MapWeights mw = integer_weights_on(win, seed, {0.0, 1.0, 2.0});
    for (int m = 1; m <= 6; ++m) {
      double pruned = min_saw_time(mw, origin(2), m, win).min_time;
      double oracle = oracles::min_saw_unpruned(mw, origin(2), m, win);
      CHECK(pruned == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("min_saw_time: budget exhaustion is an explicit error") {
  WeightField field(Distribution::uniform(0.9, 1.0), 2);
  Window win(origin(2), 12);
  SawOptions opt;
  opt.node_budget = 10;
  CHECK_THROWS_AS(min_saw_time(field, origin(2), 12, win, opt), std::runtime_error);
}
