#include "ddgame/location_scale.hpp"

namespace ddgame {

void LocationScaleMap::validate() const {
  if (b.rows() < 1 || b.cols() < 1)
    throw DimensionMismatch("LocationScaleMap: B must be nonempty");
  if (!b.allFinite())
    throw DimensionMismatch("LocationScaleMap: B has non-finite entries");
  if (const auto* emp = std::get_if<EmpiricalBase>(&base)) {
    if (emp->samples.rows() < 1)
      throw DimensionMismatch("LocationScaleMap: empirical base is empty");
    if (emp->samples.cols() != b.rows())
      throw DimensionMismatch(
          "LocationScaleMap: base dimension != response dimension");
  } else {
    const auto& g = std::get<GaussianBase>(base);
    if (g.mean.size() != b.rows() || g.stddev.size() != b.rows())
      throw DimensionMismatch(
          "LocationScaleMap: Gaussian base dimension != response dimension");
    for (Eigen::Index j = 0; j < g.stddev.size(); ++j)
      if (g.stddev[j] < 0.0)
        throw DimensionMismatch("LocationScaleMap: negative stddev");
  }
}

Eigen::VectorXd LocationScaleMap::draw_base(Rng& rng) const {
  if (const auto* emp = std::get_if<EmpiricalBase>(&base)) {
    const auto row = static_cast<Eigen::Index>(
        rng.index(static_cast<std::size_t>(emp->samples.rows())));
    return emp->samples.row(row).transpose();
  }
  const auto& g = std::get<GaussianBase>(base);
  Eigen::VectorXd out(g.mean.size());
  for (Eigen::Index j = 0; j < g.mean.size(); ++j)
    out[j] = rng.normal(g.mean[j], g.stddev[j]);
  return out;
}

Eigen::VectorXd LocationScaleMap::base_mean() const {
  if (const auto* emp = std::get_if<EmpiricalBase>(&base))
    return emp->samples.colwise().mean().transpose();
  return std::get<GaussianBase>(base).mean;
}

Eigen::VectorXd sample_response(const LocationScaleMap& map,
                                const Eigen::VectorXd& x, Rng& rng) {
  if (x.size() != map.b.cols())
    throw DimensionMismatch("sample_response: x dimension != B columns");
  return map.draw_base(rng) + map.b * x;
}

Eigen::VectorXd UniformBoxSampler::draw(Rng& rng) const {
  Eigen::VectorXd out(box.dim());
  for (int j = 0; j < box.dim(); ++j) out[j] = rng.uniform(box.lo[j], box.hi[j]);
  return out;
}

Dataset collect_dataset(const LocationScaleMap& map,
                        const UniformBoxSampler& sampler, long m, Rng& rng) {
  if (m < 1) throw DimensionMismatch("collect_dataset: m must be >= 1");
  map.validate();
  if (sampler.box.dim() != map.d())
    throw DimensionMismatch("collect_dataset: sampler dimension != map d");
  Eigen::MatrixXd xs(m, map.d()), zs(m, map.k());
  for (long j = 0; j < m; ++j) {
    const Eigen::VectorXd x = sampler.draw(rng);
    const Eigen::VectorXd z = sample_response(map, x, rng);
    xs.row(j) = x.transpose();
    zs.row(j) = z.transpose();
  }
  return Dataset(std::move(xs), std::move(zs));
}

}  // namespace ddgame
