#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtw/raster.hpp"

namespace rtw::blend {

enum class Mode { Mix, Replace };

const char* to_string(Mode m);

struct SolverConfig {
  double tolerance = 1e-6;           // relative residual
  std::optional<int> max_iters;      // default max(500, 10 sqrt|domain|)
  bool clamp = true;                 // clamp the solution to [0,1]
  int iteration_limit(std::size_t unknowns) const;
};

// Discrete Poisson problem on a pixel domain. Guidance is stored as forward
// differences: gx(p) is the target for f(x+1,y) - f(x,y), gy(p) for
// f(x,y+1) - f(x,y), both full-image, channel interleaved.
struct Problem {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 0;
  std::vector<std::uint32_t> pixels;  // sorted linear indices of the domain
  std::vector<std::int32_t> slot;     // linear index -> position in pixels, or -1
  std::vector<double> gx, gy;
  Raster base;                        // Dirichlet values outside the domain
  Raster initial;                     // starting iterate (the naive composite)
  SolverConfig cfg;

  bool in_domain(std::uint32_t x, std::uint32_t y) const {
    return slot[std::size_t{y} * width + x] >= 0;
  }
};

inline constexpr float kDomainAlpha = 0.05f;

// {alpha > 0.05} dilated by one pixel (3x3), minus the image border and
// pixels without a 4-neighbour in the domain.
std::vector<std::uint8_t> blend_domain(const Raster& alpha);

// Problem over an explicit domain mask (w*h, non-zero = inside). Border
// pixels are removed from the mask. Throws EmptyDomain.
Problem make_problem(const Raster& base, const std::vector<std::uint8_t>& mask,
                     std::vector<double> gx, std::vector<double> gy,
                     const SolverConfig& cfg = {});

// Forward differences of an image, zero past the last row/column.
void gradients(const Raster& img, std::vector<double>& gx, std::vector<double>& gy);

// Guidance from the alpha composite of the patch over the base; in Mix mode
// each pixel keeps whichever of the base and composite gradient vectors is
// longer. Throws EmptyDomain when no alpha exceeds 0.05.
Problem build_problem(const Raster& base, const Raster& color,
                      const Raster& alpha, Mode mode,
                      const SolverConfig& cfg = {});

struct Solution {
  std::vector<double> raw;     // |domain| * channels, unclamped CG iterate
  std::vector<double> values;  // raw, clamped when cfg.clamp
  double residual = 0.0;       // max over channels of |b - Ax| / |b|
  int iterations = 0;          // summed over channels
  bool converged = false;
};

// Right-hand side b of the 4-neighbour system A f = b for one channel.
std::vector<double> rhs(const Problem& p, std::uint32_t channel);
// y = A x for one channel (x indexed like p.pixels).
void apply_laplacian(const Problem& p, const std::vector<double>& x,
                     std::vector<double>& y);
double relative_residual(const Problem& p, const std::vector<double>& raw);

// Conjugate gradient per channel. Never throws on non-convergence; check
// `converged`.
Solution solve(const Problem& p);

// Base with the domain pixels replaced by the solution.
Raster compose(const Raster& base, const Solution& s, const Problem& p);

// out = alpha * color + (1 - alpha) * base where alpha > 0; other pixels are
// copied.
Raster alpha_blend(const Raster& base, const Raster& color, const Raster& alpha);

}  // namespace rtw::blend
