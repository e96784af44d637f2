#include "rtw/blending.hpp"

#include <algorithm>
#include <cmath>

#include "rtw/error.hpp"

namespace rtw::blend {

const char* to_string(Mode m) { return m == Mode::Mix ? "mix" : "replace"; }

int SolverConfig::iteration_limit(std::size_t unknowns) const {
  if (max_iters) return *max_iters;
  return std::max(500, static_cast<int>(std::ceil(10.0 * std::sqrt(double(unknowns)))));
}

std::vector<std::uint8_t> blend_domain(const Raster& alpha) {
  const std::uint32_t w = alpha.width(), h = alpha.height();
  std::vector<std::uint8_t> seed(alpha.pixel_count(), 0);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      seed[std::size_t{y} * w + x] = alpha.at(x, y) > kDomainAlpha;
    }
  }
  std::vector<std::uint8_t> mask(seed.size(), 0);
  for (std::uint32_t y = 1; y + 1 < h; ++y) {
    for (std::uint32_t x = 1; x + 1 < w; ++x) {
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy) {
        for (int dx = -1; dx <= 1 && !hit; ++dx) {
          hit = seed[std::size_t(y + dy) * w + (x + dx)];
        }
      }
      mask[std::size_t{y} * w + x] = hit;
    }
  }
  std::vector<std::uint8_t> out = mask;
  for (std::uint32_t y = 1; y + 1 < h; ++y) {
    for (std::uint32_t x = 1; x + 1 < w; ++x) {
      const std::size_t i = std::size_t{y} * w + x;
      if (mask[i] && !mask[i - 1] && !mask[i + 1] && !mask[i - w] && !mask[i + w]) {
        out[i] = 0;
      }
    }
  }
  return out;
}

void gradients(const Raster& img, std::vector<double>& gx, std::vector<double>& gy) {
  const std::uint32_t w = img.width(), h = img.height(), c = img.channels();
  gx.assign(img.pixel_count() * c, 0.0);
  gy.assign(img.pixel_count() * c, 0.0);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t i = (std::size_t{y} * w + x) * c;
      for (std::uint32_t k = 0; k < c; ++k) {
        const double f = img.at(x, y, k);
        if (x + 1 < w) gx[i + k] = double(img.at(x + 1, y, k)) - f;
        if (y + 1 < h) gy[i + k] = double(img.at(x, y + 1, k)) - f;
      }
    }
  }
}

Problem make_problem(const Raster& base, const std::vector<std::uint8_t>& mask,
                     std::vector<double> gx, std::vector<double> gy,
                     const SolverConfig& cfg) {
  const std::uint32_t w = base.width(), h = base.height();
  if (mask.size() != base.pixel_count() ||
      gx.size() != base.pixel_count() * base.channels() || gy.size() != gx.size()) {
    throw Error(Errc::BadConfig, "domain or guidance size does not match the base");
  }
  Problem p;
  p.width = w;
  p.height = h;
  p.channels = base.channels();
  p.slot.assign(base.pixel_count(), -1);
  for (std::uint32_t y = 1; y + 1 < h; ++y) {
    for (std::uint32_t x = 1; x + 1 < w; ++x) {
      const std::size_t i = std::size_t{y} * w + x;
      if (!mask[i]) continue;
      p.slot[i] = static_cast<std::int32_t>(p.pixels.size());
      p.pixels.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (p.pixels.empty()) throw Error(Errc::EmptyDomain, "blend domain is empty");
  p.gx = std::move(gx);
  p.gy = std::move(gy);
  p.base = base;
  p.initial = base;
  p.cfg = cfg;
  return p;
}

Problem build_problem(const Raster& base, const Raster& color,
                      const Raster& alpha, Mode mode, const SolverConfig& cfg) {
  if (!color.same_shape(base) || alpha.channels() != 1 ||
      alpha.width() != base.width() || alpha.height() != base.height()) {
    throw Error(Errc::BadConfig, "patch does not match the base image");
  }
  const auto mask = blend_domain(alpha);
  if (std::none_of(mask.begin(), mask.end(), [](auto m) { return m != 0; })) {
    throw Error(Errc::EmptyDomain, "no alpha above 0.05");
  }
  const Raster composite = alpha_blend(base, color, alpha);
  std::vector<double> gx, gy;
  gradients(composite, gx, gy);
  if (mode == Mode::Mix) {
    std::vector<double> bx, by;
    gradients(base, bx, by);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (bx[i] * bx[i] + by[i] * by[i] > gx[i] * gx[i] + gy[i] * gy[i]) {
        gx[i] = bx[i];
        gy[i] = by[i];
      }
    }
  }
  Problem p = make_problem(base, mask, std::move(gx), std::move(gy), cfg);
  p.initial = composite;
  return p;
}

std::vector<double> rhs(const Problem& p, std::uint32_t k) {
  const std::uint32_t w = p.width, c = p.channels;
  std::vector<double> b(p.pixels.size(), 0.0);
  for (std::size_t n = 0; n < p.pixels.size(); ++n) {
    const std::size_t i = p.pixels[n];
    const std::size_t left = i - 1, right = i + 1, up = i - w, down = i + w;
    double v = -p.gx[i * c + k] + p.gx[left * c + k] - p.gy[i * c + k] +
               p.gy[up * c + k];
    for (std::size_t q : {left, right, up, down}) {
      if (p.slot[q] < 0) v += p.base.data()[q * c + k];
    }
    b[n] = v;
  }
  return b;
}

void apply_laplacian(const Problem& p, const std::vector<double>& x,
                     std::vector<double>& y) {
  const std::uint32_t w = p.width;
  y.resize(x.size());
  for (std::size_t n = 0; n < p.pixels.size(); ++n) {
    const std::size_t i = p.pixels[n];
    double v = 4.0 * x[n];
    for (std::size_t q : {i - 1, i + 1, i - w, i + w}) {
      const auto s = p.slot[q];
      if (s >= 0) v -= x[static_cast<std::size_t>(s)];
    }
    y[n] = v;
  }
}

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double channel_residual(const Problem& p, const std::vector<double>& b,
                        const std::vector<double>& x) {
  std::vector<double> ax;
  apply_laplacian(p, x, ax);
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] = b[i] - ax[i];
  const double nb = norm(b);
  return norm(ax) / (nb > 0.0 ? nb : 1.0);
}

std::vector<double> channel_slice(const Problem& p, const std::vector<double>& all,
                                  std::uint32_t k) {
  std::vector<double> x(p.pixels.size());
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = all[n * p.channels + k];
  return x;
}

}  // namespace

double relative_residual(const Problem& p, const std::vector<double>& raw) {
  double worst = 0.0;
  for (std::uint32_t k = 0; k < p.channels; ++k) {
    worst = std::max(worst, channel_residual(p, rhs(p, k), channel_slice(p, raw, k)));
  }
  return worst;
}

Solution solve(const Problem& p) {
  const std::size_t n = p.pixels.size();
  const int limit = p.cfg.iteration_limit(n);
  Solution s;
  s.raw.assign(n * p.channels, 0.0);
  s.converged = true;
  std::vector<double> x(n), r(n), d(n), q(n);
  for (std::uint32_t k = 0; k < p.channels; ++k) {
    const auto b = rhs(p, k);
    const double nb = norm(b);
    const double stop = p.cfg.tolerance * (nb > 0.0 ? nb : 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = p.initial.data()[std::size_t{p.pixels[i]} * p.channels + k];
    }
    apply_laplacian(p, x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    d = r;
    double rr = dot(r, r);
    std::vector<double> best = x;
    double best_rr = rr;
    int it = 0;
    while (std::sqrt(rr) > stop && it < limit) {
      apply_laplacian(p, d, q);
      const double alpha = rr / dot(d, q);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * d[i];
        r[i] -= alpha * q[i];
      }
      const double rr_new = dot(r, r);
      const double beta = rr_new / rr;
      for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
      rr = rr_new;
      ++it;
      if (rr < best_rr) {
        best_rr = rr;
        best = x;
      }
    }
    s.iterations += it;
    // The recursive residual drifts; judge convergence on the true one.
    const double true_res = channel_residual(p, b, x);
    const double best_res = channel_residual(p, b, best);
    const auto& chosen = true_res <= best_res ? x : best;
    const double res = std::min(true_res, best_res);
    if (res > p.cfg.tolerance) s.converged = false;
    for (std::size_t i = 0; i < n; ++i) s.raw[i * p.channels + k] = chosen[i];
  }
  s.residual = relative_residual(p, s.raw);
  s.values = s.raw;
  if (p.cfg.clamp) {
    for (auto& v : s.values) v = std::clamp(v, 0.0, 1.0);
  }
  return s;
}

Raster compose(const Raster& base, const Solution& s, const Problem& p) {
  Raster out = base;
  auto data = out.data();
  for (std::size_t n = 0; n < p.pixels.size(); ++n) {
    for (std::uint32_t k = 0; k < p.channels; ++k) {
      data[std::size_t{p.pixels[n]} * p.channels + k] =
          static_cast<float>(s.values[n * p.channels + k]);
    }
  }
  return out;
}

Raster alpha_blend(const Raster& base, const Raster& color, const Raster& alpha) {
  if (!color.same_shape(base) || alpha.channels() != 1 ||
      alpha.width() != base.width() || alpha.height() != base.height()) {
    throw Error(Errc::BadConfig, "patch does not match the base image");
  }
  Raster out = base;
  for (std::uint32_t y = 0; y < base.height(); ++y) {
    for (std::uint32_t x = 0; x < base.width(); ++x) {
      const float a = alpha.at(x, y);
      if (!(a > 0.0f)) continue;
      for (std::uint32_t k = 0; k < base.channels(); ++k) {
        out.at(x, y, k) = a * color.at(x, y, k) + (1.0f - a) * base.at(x, y, k);
      }
    }
  }
  return out;
}

}  // namespace rtw::blend
