#include "bminres/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bminres {

void Laplacian2dSpec::validate() const {
  if (grid < 2) throw std::invalid_argument("Laplacian2dSpec: grid must be at least 2");
}

CsrSymmetricMatrix build_laplacian_2d(const Laplacian2dSpec& spec) {
  spec.validate();
  const std::size_t g = spec.grid;
  const double inv_h2 = 1.0 / (spec.h() * spec.h());
  std::vector<Triplet> t;
  t.reserve(5 * spec.n());
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) {
      const std::size_t k = r * g + c;
      if (r > 0) t.push_back({k, k - g, inv_h2});
      if (c > 0) t.push_back({k, k - 1, inv_h2});
      t.push_back({k, k, -4.0 * inv_h2});
      if (c + 1 < g) t.push_back({k, k + 1, inv_h2});
      if (r + 1 < g) t.push_back({k, k + g, inv_h2});
    }
  }
  return CsrSymmetricMatrix::from_triplets(spec.n(), std::move(t));
}

CsrSymmetricMatrix build_shifted_laplacian_2d(const Laplacian2dSpec& spec) {
  return build_laplacian_2d(spec).scaled(-1.0).shifted(-spec.sigma);
}

namespace {

double t_eigenvalue(std::size_t k, std::size_t g) {
  return -2.0 + 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(g + 1));
}

Vector sine_vector(std::size_t k, std::size_t g) {
  const double scale = std::sqrt(2.0 / static_cast<double>(g + 1));
  Vector s(g);
  for (std::size_t i = 0; i < g; ++i) {
    s[i] = scale * std::sin(static_cast<double>((i + 1) * k) * std::numbers::pi / static_cast<double>(g + 1));
  }
  return s;
}

}  // namespace

std::vector<LaplacianMode> laplacian_modes(const Laplacian2dSpec& spec, std::size_t count, EigenEnd which) {
  spec.validate();
  const std::size_t g = spec.grid;
  if (count > spec.n()) throw std::invalid_argument("laplacian_modes: count exceeds the dimension");
  const double inv_h2 = 1.0 / (spec.h() * spec.h());
  Vector t(g + 1);
  for (std::size_t k = 1; k <= g; ++k) t[k] = t_eigenvalue(k, g);

  std::vector<LaplacianMode> modes;
  modes.reserve(spec.n());
  for (std::size_t a = 1; a <= g; ++a) {
    for (std::size_t b = 1; b <= g; ++b) {
      const double lam = inv_h2 * (t[a] + t[b]);
      modes.push_back({a, b, lam, -lam - spec.sigma});
    }
  }
  std::sort(modes.begin(), modes.end(), [](const LaplacianMode& x, const LaplacianMode& y) {
    const double ax = std::abs(x.shifted_eigenvalue);
    const double ay = std::abs(y.shifted_eigenvalue);
    if (ax != ay) return ax < ay;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  if (which == EigenEnd::Smallest) {
    modes.resize(count);
  } else {
    modes.erase(modes.begin(), modes.end() - static_cast<std::ptrdiff_t>(count));
  }
  return modes;
}

void accumulate_mode(const Laplacian2dSpec& spec, const LaplacianMode& mode, double coeff, std::span<double> out) {
  const std::size_t g = spec.grid;
  if (out.size() != spec.n()) throw std::invalid_argument("accumulate_mode: output length mismatch");
  const Vector sa = sine_vector(mode.a, g);
  const Vector sb = sine_vector(mode.b, g);
  for (std::size_t r = 0; r < g; ++r) {
    const double w = coeff * sa[r];
    for (std::size_t c = 0; c < g; ++c) out[r * g + c] += w * sb[c];
  }
}

Vector mode_vector(const Laplacian2dSpec& spec, const LaplacianMode& mode) {
  Vector q(spec.n(), 0.0);
  accumulate_mode(spec, mode, 1.0, q);
  return q;
}

std::vector<Eigenpair> laplacian_eigenpairs(const Laplacian2dSpec& spec, std::size_t count, EigenEnd which) {
  std::vector<Eigenpair> out;
  for (const auto& mode : laplacian_modes(spec, count, which)) out.push_back({mode, mode_vector(spec, mode)});
  return out;
}

}  // namespace bminres
