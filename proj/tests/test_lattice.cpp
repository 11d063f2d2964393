#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fpp/lattice.hpp"

using namespace fpp;

TEST_CASE("neighbors of the origin in d=2") {
  auto ns = neighbors(origin(2));
  REQUIRE(ns.size() == 4);
  std::set<Site> got(ns.begin(), ns.end());
  std::set<Site> want = {Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}};
  CHECK(got == want);
}

TEST_CASE("neighbors count is 2d in d=3") {
  CHECK(neighbors(origin(3)).size() == 6);
  CHECK(neighbors(Site{4, -2, 7}).size() == 6);
}

TEST_CASE("neighbors translate with the site") {
  Site shift{2, -1};
  auto at_origin = neighbors(origin(2));
  auto at_shift = neighbors(shift);
  std::set<Site> translated;
  for (const Site& s : at_origin) translated.insert(s + shift);
  CHECK(std::set<Site>(at_shift.begin(), at_shift.end()) == translated);
}

TEST_CASE("edge canonicalization is symmetric and idempotent") {
  for (const Site& s : {Site{0, 0}, Site{3, -2}, Site{-1, 5}}) {
    for (const Site& n : neighbors(s)) {
      Edge a(s, n), b(n, s);
      CHECK(a == b);
      CHECK(a.u < a.v());
      CHECK(l1_distance(a.u, a.v()) == 1);
      CHECK(a.hash() == b.hash());
    }
  }
}

TEST_CASE("local box sizes: |B_i| = 3^d, |S_i| = d*2*3^(d-1)") {
  for (int d : {2, 3, 4}) {
    LocalBox box = local_box(origin(d));
    long long expect_vertices = 1;
    for (int i = 0; i < d; ++i) expect_vertices *= 3;
    long long expect_edges = d * 2 * (expect_vertices / 3);
    CHECK(box.vertices.size() == static_cast<std::size_t>(expect_vertices));
    CHECK(box.edges.size() == static_cast<std::size_t>(expect_edges));

    // cross-check by exhaustive pair enumeration
    std::size_t count = 0;
    for (const Site& a : box.vertices)
      for (const Site& b : box.vertices)
        if (a < b && l1_distance(a, b) == 1) ++count;
    CHECK(box.edges.size() == count);
  }
  CHECK(local_box(origin(2)).edges.size() == 12);
  CHECK(local_box(origin(3)).edges.size() == 54);
  CHECK(local_box(origin(2)).vertices.size() == 9);
}

TEST_CASE("local box rejects d < 2") {
  CHECK_THROWS_AS(local_box(Site{0}), std::invalid_argument);
}

TEST_CASE("local box membership and edge anchoring") {
  LocalBox box = local_box(Site{5, 5});
  CHECK(box.contains_vertex(Site{4, 6}));
  CHECK(!box.contains_vertex(Site{7, 5}));
  CHECK(box.contains_edge(Edge(Site{4, 4}, Site{4, 5})));
  CHECK(!box.contains_edge(Edge(Site{6, 6}, Site{7, 6})));
  Edge e(Site{3, 3}, Site{3, 4});
  CHECK(local_box_of_edge(e).anchor == e.u);
}

TEST_CASE("macro box radii") {
  CHECK(macro_box(origin(2), 8, 1.0).radius == 5);
  CHECK(macro_box(origin(2), 2, 1.0).radius == 1);
  CHECK_THROWS_AS(macro_box(origin(2), 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(macro_box(origin(2), 8, 0.0), std::invalid_argument);
}

TEST_CASE("macro box: doubling C7 at most doubles radius+1") {
  for (int m : {2, 3, 8, 100}) {
    for (double c7 : {0.3, 1.0, 2.5}) {
      int r1 = macro_box(origin(2), m, c7).radius;
      int r2 = macro_box(origin(2), m, 2 * c7).radius;
      CHECK(r2 + 1 <= 2 * (r1 + 1));
      CHECK(r2 >= r1);
    }
  }
}

TEST_CASE("macro box sites fill the window") {
  MacroBox box = macro_box(Site{2, -1}, 4, 0.5);
  auto sites = box.sites();
  long long side = 2LL * box.radius + 1;
  CHECK(sites.size() == static_cast<std::size_t>(side * side));
  for (const Site& s : sites) CHECK(linf_distance(s, box.center) <= box.radius);
}

TEST_CASE("window indexing round-trips and finds boundaries") {
  for (int radius : {0, 1, 3}) {
    Window w(Site{1, -2}, radius);
    CHECK(w.size() == static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
    for (std::size_t i = 0; i < w.size(); ++i) {
      Site s = w.site_at(i);
      CHECK(w.contains(s));
      CHECK(w.index_of(s) == i);
      CHECK(w.is_boundary(i) == (linf_distance(s, w.center()) == radius));
    }
  }
}

TEST_CASE("window neighbor_index agrees with site arithmetic") {
  Window w(origin(2), 2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Site s = w.site_at(i);
    for (int a = 0; a < 2; ++a) {
      for (int dir : {+1, -1}) {
        std::size_t j = w.neighbor_index(i, a, dir);
        Site t = s.shifted(a, dir);
        if (w.contains(t))
          CHECK(j == w.index_of(t));
        else
          CHECK(j == Window::npos);
      }
    }
  }
}

TEST_CASE("window edge count for d=2 is 2*(2r+1)*(2r)") {
  for (int r : {1, 2, 3, 4}) {
    Window w(origin(2), r);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      Site s = w.site_at(i);
      for (int a = 0; a < 2; ++a)
        if (w.contains(s.shifted(a, 1))) ++edges;
    }
    CHECK(edges == static_cast<std::size_t>(2 * (2 * r + 1) * (2 * r)));
  }
}

TEST_CASE("site norms") {
  CHECK(Site{3, -4}.l1_norm() == 7);
  CHECK(Site{3, -4}.linf_norm() == 4);
  CHECK(l1_distance(Site{1, 2}, Site{4, 0}) == 5);
  CHECK(linf_distance(Site{1, 2}, Site{4, 0}) == 3);
}
