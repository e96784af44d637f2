#pragma once

// Slow, independent reference implementations shared by the unit tests and
// the acceptance binary.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "rtw/blending.hpp"
#include "rtw/raster.hpp"
#include "rtw/region.hpp"

namespace rtw::oracle {

struct DenseSystem {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
};

// The 4-neighbour Poisson system written out pixel by pixel: for each
// neighbour q of p, f_p - f_q should equal the guidance along p->q; known
// values move to the right-hand side.
inline DenseSystem poisson_system(const blend::Problem& p, std::uint32_t k) {
  const std::size_t n = p.pixels.size();
  DenseSystem d{std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)),
                std::vector<double>(n, 0.0)};
  auto g = [&](const std::vector<double>& v, std::uint32_t x, std::uint32_t y) {
    return v[(std::size_t{y} * p.width + x) * p.channels + k];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t x = p.pixels[i] % p.width, y = p.pixels[i] / p.width;
    struct Nb {
      std::uint32_t x, y;
      double v;
    };
    const Nb nbs[] = {{x + 1, y, -g(p.gx, x, y)},
                      {x - 1, y, g(p.gx, x - 1, y)},
                      {x, y + 1, -g(p.gy, x, y)},
                      {x, y - 1, g(p.gy, x, y - 1)}};
    for (const auto& q : nbs) {
      d.a[i][i] += 1.0;
      d.b[i] += q.v;
      if (p.in_domain(q.x, q.y)) {
        d.a[i][p.slot[std::size_t{q.y} * p.width + q.x]] -= 1.0;
      } else {
        d.b[i] += p.base.at(q.x, q.y, k);
      }
    }
  }
  return d;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(DenseSystem d) {
  const std::size_t n = d.b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(d.a[r][c]) > std::abs(d.a[piv][c])) piv = r;
    std::swap(d.a[c], d.a[piv]);
    std::swap(d.b[c], d.b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = d.a[r][c] / d.a[c][c];
      for (std::size_t j = c; j < n; ++j) d.a[r][j] -= f * d.a[c][j];
      d.b[r] -= f * d.b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = d.b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= d.a[i][j] * x[j];
    x[i] = s / d.a[i][i];
  }
  return x;
}

// Stack flood fill over {b < thr}; components as sorted pixel index lists.
inline std::set<std::vector<std::uint32_t>> flood_fill(const Raster& b, double thr) {
  const auto w = b.width(), h = b.height();
  std::vector<char> seen(std::size_t{w} * h, 0);
  std::set<std::vector<std::uint32_t>> out;
  for (std::uint32_t i = 0; i < w * h; ++i) {
    if (seen[i] || !(b.data()[i] < thr)) continue;
    std::vector<std::uint32_t> comp, stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const auto p = stack.back();
      stack.pop_back();
      comp.push_back(p);
      const long x = p % w, y = p / w;
      const std::pair<long, long> nb[] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto [nx, ny] : nb) {
        if (nx < 0 || ny < 0 || nx >= long(w) || ny >= long(h)) continue;
        const auto q = std::uint32_t(ny * w + nx);
        if (!seen[q] && b.data()[q] < thr) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.insert(std::move(comp));
  }
  return out;
}

// Region pixel centers back-projected with the same pinhole assumption the
// engine uses (focal = focal_assumption * max(w,h), centered principal point).
inline std::vector<Eigen::Vector3d> back_project(const Raster& depth, const region::Region& r,
                                                 double focal_assumption) {
  const double f = focal_assumption * std::max(depth.width(), depth.height());
  const double cx = depth.width() / 2.0, cy = depth.height() / 2.0;
  std::vector<Eigen::Vector3d> pts;
  for (auto i : r.pixels) {
    const auto x = i % depth.width(), y = i / depth.width();
    const double z = depth.at(x, y);
    pts.emplace_back(z * (x + 0.5 - cx) / f, z * (y + 0.5 - cy) / f, z);
  }
  return pts;
}

// Orthogonal least squares normal by direct search over the hemisphere,
// refined by pattern search; normal.z >= 0.
inline Eigen::Vector3d brute_force_normal(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  auto dir = [](double th, double ph) {
    return Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  };
  auto cost = [&](double th, double ph) {
    const auto n = dir(th, ph);
    double s = 0;
    for (const auto& p : pts) s += std::pow(n.dot(p - mean), 2);
    return s;
  };
  double bt = 0, bp = 0;
  double best = cost(bt, bp);
  for (int th = 0; th <= 16; ++th)
    for (int ph = 0; ph < 64; ++ph) {
      const double t = th * std::numbers::pi / 32, p = ph * std::numbers::pi / 32;
      if (const double c = cost(t, p); c < best) best = c, bt = t, bp = p;
    }
  for (double step = 0.1; step > 1e-7;) {
    bool moved = false;
    for (int dt = -1; dt <= 1; ++dt)
      for (int dp = -1; dp <= 1; ++dp) {
        const double c = cost(bt + dt * step, bp + dp * step);
        if (c < best) best = c, bt += dt * step, bp += dp * step, moved = true;
      }
    if (!moved) step /= 2;
  }
  const auto n = dir(bt, bp);
  return n.z() < 0 ? Eigen::Vector3d(-n) : n;
}

inline double angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0)) * 180 /
         std::numbers::pi;
}

}  // namespace rtw::oracle
