#include "gdisp/patch_stats.hpp"

#include <map>

namespace gdisp {

// On a torus every patch component has the global mean, and the covariance
// between components a and b depends only on the lag offset(b) - offset(a).
// The 9x9 matrix therefore needs at most 25 lagged autocovariances; each lag
// and its negation share one accumulated value, so the result is exactly
// symmetric.
PatchCovariance<double> patch_covariance(const FieldLattice& field) {
  const int n = field.height();
  const int m = field.width();
  const double count = static_cast<double>(n) * m;
  const LatticeValues centred = field.values().array() - field.values().mean();

  auto wrap = [](int i, int len) { return ((i % len) + len) % len; };
  auto lag_cov = [&](int dr, int dc) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const int ii = wrap(i + dr, n);
      for (int j = 0; j < m; ++j) acc += centred(i, j) * centred(ii, wrap(j + dc, m));
    }
    return acc / count;
  };

  std::map<std::pair<int, int>, double> cache;
  auto cached = [&](int dr, int dc) {
    // canonical representative of {d, -d}
    if (dr < 0 || (dr == 0 && dc < 0)) {
      dr = -dr;
      dc = -dc;
    }
    auto [it, fresh] = cache.try_emplace({dr, dc}, 0.0);
    if (fresh) it->second = lag_cov(dr, dc);
    return it->second;
  };

  PatchCovariance<double> cov;
  for (int a = 0; a < 9; ++a) {
    for (int b = 0; b < 9; ++b) {
      cov(a, b) = cached(kPatchOffsets[b][0] - kPatchOffsets[a][0],
                         kPatchOffsets[b][1] - kPatchOffsets[a][1]);
    }
  }
  return cov;
}

PatchStatsd compute_patch_stats(const FieldLattice& field) {
  const auto& v = field.values();
  if ((v.array() == v(0, 0)).all()) {
    PatchStatsd out;
    out.degenerate = true;
    return out;
  }
  return decompose_patch_covariance(patch_covariance(field));
}

}  // namespace gdisp
