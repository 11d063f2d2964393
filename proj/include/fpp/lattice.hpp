#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/rng.hpp"

// Geometry of the cubic lattice: sites, canonical nearest-neighbor edges,
// finite cube windows, the 3^d local boxes used for block tensorization,
// and the polylog-radius macro boxes.

namespace fpp {

struct Site {
  std::vector<int> coords;

  Site() = default;
  explicit Site(std::vector<int> c) : coords(std::move(c)) {}
  Site(std::initializer_list<int> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](int i) const { return coords[i]; }

  friend bool operator==(const Site& a, const Site& b) { return a.coords == b.coords; }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
  friend bool operator<(const Site& a, const Site& b) { return a.coords < b.coords; }

  Site shifted(int axis, int delta) const {
    Site s = *this;
    s.coords[axis] += delta;
    return s;
  }

  friend Site operator+(const Site& a, const Site& b) {
    Site s = a;
    for (int i = 0; i < a.dim(); ++i) s.coords[i] += b.coords[i];
    return s;
  }

  long long l1_norm() const {
    long long n = 0;
    for (int c : coords) n += std::abs(c);
    return n;
  }

  int linf_norm() const {
    int n = 0;
    for (int c : coords) n = std::max(n, std::abs(c));
    return n;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < dim(); ++i) {
      if (i) s += ",";
      s += std::to_string(coords[i]);
    }
    return s + ")";
  }
};

inline Site origin(int d) { return Site(std::vector<int>(d, 0)); }

inline long long l1_distance(const Site& a, const Site& b) {
  long long n = 0;
  for (int i = 0; i < a.dim(); ++i) n += std::abs((long long)a[i] - b[i]);
  return n;
}

inline int linf_distance(const Site& a, const Site& b) {
  int n = 0;
  for (int i = 0; i < a.dim(); ++i) n = std::max(n, std::abs(a[i] - b[i]));
  return n;
}

// Nearest-neighbor edge in canonical form: u is the lexicographically
// smaller endpoint, so v = u + e_axis and canonicalization is idempotent.
struct Edge {
  Site u;
  int axis = 0;

  Edge() = default;
  Edge(const Site& a, const Site& b) {
    assert(l1_distance(a, b) == 1);
    const Site& lo = (a < b) ? a : b;
    const Site& hi = (a < b) ? b : a;
    u = lo;
    for (int i = 0; i < lo.dim(); ++i) {
      if (hi[i] != lo[i]) {
        axis = i;
        break;
      }
    }
  }

  Site v() const { return u.shifted(axis, 1); }

  friend bool operator==(const Edge& a, const Edge& b) { return a.axis == b.axis && a.u == b.u; }
  friend bool operator<(const Edge& a, const Edge& b) {
    if (a.u.coords != b.u.coords) return a.u.coords < b.u.coords;
    return a.axis < b.axis;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (int c : u.coords) h = rng::mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
    return rng::mix(h, static_cast<std::uint64_t>(axis));
  }
};

inline std::vector<Site> neighbors(const Site& s) {
  std::vector<Site> out;
  out.reserve(2 * s.dim());
  for (int a = 0; a < s.dim(); ++a) {
    out.push_back(s.shifted(a, +1));
    out.push_back(s.shifted(a, -1));
  }
  return out;
}

// Finite cube window: sites within L-infinity distance `radius` of `center`.
// Linear indices enumerate offsets in row-major order over [-r, r]^d.
class Window {
 public:
  Window() = default;
  Window(Site center, int radius) : center_(std::move(center)), radius_(radius) {
    assert(radius >= 0);
    side_ = 2 * radius_ + 1;
    size_ = 1;
    strides_.assign(center_.dim(), 0);
    for (int a = center_.dim() - 1; a >= 0; --a) {
      strides_[a] = size_;
      size_ *= side_;
    }
  }

  int dim() const { return center_.dim(); }
  int radius() const { return radius_; }
  const Site& center() const { return center_; }
  std::size_t size() const { return size_; }

  bool contains(const Site& s) const { return linf_distance(s, center_) <= radius_; }

  std::size_t index_of(const Site& s) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a) idx += static_cast<std::size_t>(s[a] - center_[a] + radius_) * strides_[a];
    return idx;
  }

  Site site_at(std::size_t idx) const {
    Site s = center_;
    for (int a = 0; a < dim(); ++a) {
      int off = static_cast<int>(idx / strides_[a]) % side_;
      s.coords[a] = center_[a] + off - radius_;
    }
    return s;
  }

  bool is_boundary(std::size_t idx) const {
    for (int a = 0; a < dim(); ++a) {
      int off = static_cast<int>(idx / strides_[a]) % side_;
      if (off == 0 || off == side_ - 1) return true;
    }
    return false;
  }

  // Offset of neighbor along axis, or npos when it leaves the window.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t neighbor_index(std::size_t idx, int axis, int dir) const {
    int off = static_cast<int>(idx / strides_[axis]) % side_;
    int noff = off + dir;
    if (noff < 0 || noff >= side_) return npos;
    return idx + static_cast<std::ptrdiff_t>(dir) * static_cast<std::ptrdiff_t>(strides_[axis]);
  }

  std::size_t stride(int axis) const { return strides_[axis]; }

 private:
  Site center_;
  int radius_ = 0;
  int side_ = 1;
  std::size_t size_ = 1;
  std::vector<std::size_t> strides_;
};

// 3^d box around an anchor with its internal nearest-neighbor edges.
struct LocalBox {
  Site anchor;
  std::vector<Site> vertices;  // the L-infinity ball of radius 1
  std::vector<Edge> edges;     // all nearest-neighbor pairs inside

  bool contains_vertex(const Site& s) const { return linf_distance(s, anchor) <= 1; }
  bool contains_edge(const Edge& e) const { return contains_vertex(e.u) && contains_vertex(e.v()); }
};

inline LocalBox local_box(const Site& anchor) {
  const int d = anchor.dim();
  if (d < 2) throw std::invalid_argument("local_box: d must be >= 2");
  LocalBox box;
  box.anchor = anchor;
  Window w(anchor, 1);
  box.vertices.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) box.vertices.push_back(w.site_at(i));
  for (const Site& s : box.vertices) {
    for (int a = 0; a < d; ++a) {
      Site t = s.shifted(a, 1);
      if (w.contains(t)) box.edges.emplace_back(s, t);
    }
  }
  return box;
}

// Each edge gets one deterministic representative endpoint; we take the
// lexicographically smaller one, i.e. the canonical u.
inline LocalBox local_box_of_edge(const Edge& e) { return local_box(e.u); }

// Macro box D_m(v) with integer radius ceil(C7 (log m)^2); natural log.
struct MacroBox {
  Site center;
  int m = 2;
  double c7 = 1.0;
  int radius = 0;

  Window window() const { return Window(center, radius); }
  std::vector<Site> sites() const {
    Window w = window();
    std::vector<Site> out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w.site_at(i));
    return out;
  }
};

inline MacroBox macro_box(const Site& v, int m, double c7) {
  if (m < 2) throw std::invalid_argument("macro_box: m must be >= 2");
  if (c7 <= 0) throw std::invalid_argument("macro_box: C7 must be positive");
  MacroBox box;
  box.center = v;
  box.m = m;
  box.c7 = c7;
  double lg = std::log(static_cast<double>(m));
  box.radius = static_cast<int>(std::ceil(c7 * lg * lg));
  return box;
}

}  // namespace fpp
