#pragma once

// Reference implementations and data generators shared by the unit and
// acceptance tests. The oracles are written from the textbook definitions
// and share no code with the library beyond its plain data types.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "landuse/common.hpp"
#include "landuse/geo.hpp"
#include "landuse/learn.hpp"

namespace landuse::testing {

// ---------------------------------------------------------------------------
// Files

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("landuse_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// ---------------------------------------------------------------------------
// Geometry oracles

struct XY {
  double x, y;
};

inline bool on_segment(XY p, XY a, XY b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

/// Crossing count of a horizontal ray to +x; a vertex ring without the
/// closing duplicate. Returns 1 for on-boundary, 2 for inside, 0 outside.
inline int crossing_test(const std::vector<XY>& ring, XY p) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const XY a = ring[j], b = ring[i];
    if (on_segment(p, a, b)) return 1;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside ? 2 : 0;
}

inline std::vector<XY> open_ring(const geo::Ring& ring) {
  std::vector<XY> out;
  for (const auto& p : ring) out.push_back({p.lon, p.lat});
  if (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y) out.pop_back();
  return out;
}

inline bool brute_point_in_polygon(const geo::Region& r, double lon, double lat) {
  const XY p{lon, lat};
  const int outer = crossing_test(open_ring(r.rings[0]), p);
  if (outer == 0) return false;
  if (outer == 1) return true;
  for (std::size_t h = 1; h < r.rings.size(); ++h) {
    const int in_hole = crossing_test(open_ring(r.rings[h]), p);
    if (in_hole == 1) return true;
    if (in_hole == 2) return false;
  }
  return true;
}

inline std::optional<std::string> linear_scan_assign(const std::vector<geo::Region>& regions, double lon, double lat) {
  std::optional<std::string> best;
  for (const auto& r : regions) {
    if (brute_point_in_polygon(r, lon, lat) && (!best || r.region_id < *best)) best = r.region_id;
  }
  return best;
}

/// Random simple polygon: star-shaped around (cx, cy) with sorted distinct
/// angles and random radii.
inline geo::Ring random_star_polygon(std::mt19937_64& rng, std::size_t vertices, double cx, double cy,
                                     double r_min, double r_max) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<double> angles(vertices);
  for (auto& a : angles) a = angle(rng);
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  geo::Ring ring;
  for (double a : angles) {
    const double r = radius(rng);
    ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  ring.push_back(ring.front());
  return ring;
}

inline geo::Ring square(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
}

// ---------------------------------------------------------------------------
// Solver oracle: projected gradient on the squared-hinge dual
//   min_a 1/2 a'(Q + D)a - e'a, a >= 0, Q_ij = y_i y_j x_i.x_j, D = I/(2C)
// with a fixed 1/L step (L = Frobenius bound on Q + D).

struct DenseProblem {
  std::vector<std::vector<double>> x;  // rows, without the bias feature
  std::vector<int> y;
  double C = 1.0;
  double bias = 1.0;
};

inline std::vector<double> augmented(const DenseProblem& p, std::size_t i) {
  auto v = p.x[i];
  v.push_back(p.bias);
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline std::vector<double> oracle_dual_solve(const DenseProblem& p, double tol = 1e-12,
                                             std::size_t max_steps = 5'000'000) {
  const std::size_t n = p.x.size();
  std::vector<std::vector<double>> H(n, std::vector<double>(n));
  double frob = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      H[i][j] = p.y[i] * p.y[j] * dot(augmented(p, i), augmented(p, j));
      if (i == j) H[i][j] += 1.0 / (2.0 * p.C);
      frob += H[i][j] * H[i][j];
    }
  }
  const double step = 1.0 / std::sqrt(frob);
  std::vector<double> a(n, 0.0), g(n);
  for (std::size_t it = 0; it < max_steps; ++it) {
    double viol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = -1.0;
      for (std::size_t j = 0; j < n; ++j) g[i] += H[i][j] * a[j];
      const double pg = a[i] > 0.0 ? g[i] : std::min(g[i], 0.0);
      viol = std::max(viol, std::abs(pg));
    }
    if (viol < tol) break;
    for (std::size_t i = 0; i < n; ++i) a[i] = std::max(0.0, a[i] - step * g[i]);
  }
  return a;
}

inline std::vector<double> oracle_weights(const DenseProblem& p, const std::vector<double>& alpha) {
  std::vector<double> w(p.x[0].size() + 1, 0.0);
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const auto v = augmented(p, i);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += alpha[i] * p.y[i] * v[k];
  }
  return w;
}

inline double oracle_primal(const DenseProblem& p, const std::vector<double>& w) {
  double obj = 0.5 * dot(w, w);
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const double m = std::max(0.0, 1.0 - p.y[i] * dot(w, augmented(p, i)));
    obj += p.C * m * m;
  }
  return obj;
}

inline learn::SparseMatrix to_sparse(const std::vector<std::vector<double>>& rows) {
  learn::SparseMatrix m(static_cast<std::uint32_t>(rows.empty() ? 0 : rows[0].size()));
  for (const auto& r : rows) {
    std::vector<float> f(r.begin(), r.end());
    m.add_row(f);
  }
  return m;
}

/// Random 2-D problem with n points and both labels present. Points are
/// stored as floats so the library sees the same values.
inline DenseProblem random_2d_problem(std::mt19937_64& rng, std::size_t n, bool separable) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> cd(0.05, 20.0);
  DenseProblem p;
  p.C = cd(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = (i % 2 == 0) ? 1 : -1;
    const double shift = separable ? 2.5 : 0.6;
    // Held in float variables; a cast alone may be folded away under -O3.
    volatile float x0 = static_cast<float>(nd(rng) + y * shift);
    volatile float x1 = static_cast<float>(nd(rng) + 0.5 * y * shift);
    p.x.push_back({x0, x1});
    p.y.push_back(y);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Classification oracles

struct Blobs {
  std::vector<std::vector<double>> x;
  std::vector<std::string> labels;
};

/// k well-separated Gaussian blobs; centers on a circle of radius `spread`.
inline Blobs make_blobs(std::mt19937_64& rng, std::size_t k, std::size_t per_class, std::size_t dim, double spread,
                        double sigma, const std::vector<std::string>& names) {
  std::normal_distribution<double> nd(0.0, sigma);
  Blobs b;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> center(dim, 0.0);
    if (dim >= 2) {
      center[0] = spread * std::cos(2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k));
      center[1] = spread * std::sin(2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k));
    }
    if (dim > 2) center[2 + c % (dim - 2)] += spread;
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> v(dim);
      for (std::size_t d = 0; d < dim; ++d) v[d] = static_cast<float>(center[d] + nd(rng));
      b.x.push_back(std::move(v));
      b.labels.push_back(names[c]);
    }
  }
  return b;
}

inline std::vector<std::string> nearest_centroid(const Blobs& b) {
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  for (std::size_t i = 0; i < b.x.size(); ++i) {
    auto& [s, n] = sums[b.labels[i]];
    if (s.empty()) s.assign(b.x[i].size(), 0.0);
    for (std::size_t d = 0; d < s.size(); ++d) s[d] += b.x[i][d];
    ++n;
  }
  std::vector<std::string> out;
  for (const auto& v : b.x) {
    std::string best;
    double best_d = INFINITY;
    for (const auto& [cls, sn] : sums) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < v.size(); ++d) {
        const double c = sn.first[d] / static_cast<double>(sn.second);
        d2 += (v[d] - c) * (v[d] - c);
      }
      if (d2 < best_d) {
        best_d = d2;
        best = cls;
      }
    }
    out.push_back(best);
  }
  return out;
}

/// Majority label by exhaustive scan: most votes, then larger score sum,
/// then smaller class name.
inline std::optional<LandUseClass> brute_vote(const std::array<std::size_t, kNumLandUseClasses>& votes,
                                              const std::array<double, kNumLandUseClasses>& sums) {
  std::optional<LandUseClass> best;
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    if (votes[c] == 0) continue;
    if (!best) {
      best = kAllLandUseClasses[c];
      continue;
    }
    const auto b = static_cast<std::size_t>(*best);
    const bool better = votes[c] > votes[b] || (votes[c] == votes[b] && sums[c] > sums[b]) ||
                        (votes[c] == votes[b] && sums[c] == sums[b] &&
                         to_string(kAllLandUseClasses[c]) < to_string(kAllLandUseClasses[b]));
    if (better) best = kAllLandUseClasses[c];
  }
  return best;
}

}  // namespace landuse::testing
