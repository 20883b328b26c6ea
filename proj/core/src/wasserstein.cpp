#include "ddgame/wasserstein.hpp"

#include <algorithm>
#include <cmath>

namespace ddgame {

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw DimensionMismatch("wasserstein1_1d: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<long long>(a.size());
  const auto nb = static_cast<long long>(b.size());
  // Integrate |F_a^{-1}(u) - F_b^{-1}(u)| du on a grid of 1/(na*nb) units.
  long long ia = 0, ib = 0, pos = 0;
  double total = 0.0;
  while (ia < na && ib < nb) {
    const long long next_a = (ia + 1) * nb;
    const long long next_b = (ib + 1) * na;
    const long long next = std::min(next_a, next_b);
    total += static_cast<double>(next - pos) *
             std::abs(a[static_cast<std::size_t>(ia)] -
                      b[static_cast<std::size_t>(ib)]);
    pos = next;
    if (next == next_a) ++ia;
    if (next == next_b) ++ib;
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

double estimate_misspecification(const LocationScaleMap& truth,
                                 const LocationScaleMap& model,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 long m_per_point, Rng& rng) {
  if (probes.empty())
    throw DimensionMismatch("estimate_misspecification: no probe points");
  if (m_per_point < 1)
    throw DimensionMismatch("estimate_misspecification: m_per_point >= 1");
  if (truth.k() != model.k() || truth.d() != model.d())
    throw DimensionMismatch("estimate_misspecification: map shape mismatch");
  const int k = truth.k();
  double worst = 0.0;
  std::vector<std::vector<double>> ts(static_cast<std::size_t>(k)),
      ms(static_cast<std::size_t>(k));
  for (const auto& x : probes) {
    for (auto& v : ts) v.clear();
    for (auto& v : ms) v.clear();
    for (long j = 0; j < m_per_point; ++j) {
      const Eigen::VectorXd zt = sample_response(truth, x, rng);
      for (int c = 0; c < k; ++c)
        ts[static_cast<std::size_t>(c)].push_back(zt[c]);
    }
    for (long j = 0; j < m_per_point; ++j) {
      const Eigen::VectorXd zm = sample_response(model, x, rng);
      for (int c = 0; c < k; ++c)
        ms[static_cast<std::size_t>(c)].push_back(zm[c]);
    }
    for (int c = 0; c < k; ++c)
      worst = std::max(worst,
                       wasserstein1_1d(ts[static_cast<std::size_t>(c)],
                                       ms[static_cast<std::size_t>(c)]));
  }
  return worst;
}

}  // namespace ddgame
