#include "dualgrad/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace dualgrad {

namespace {
constexpr double kExactModeFloor = 1e-200;
}

double NoiseModel::resolve(const Eigen::VectorXd& y_exact) const {
  if (sigma_rel > 0.0) return sigma_rel * y_exact.cwiseAbs().maxCoeff();
  if (!(sigma > 0.0))
    throw std::invalid_argument("NoiseModel: noise level must be positive");
  return sigma;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state ^= k0 * 0xC2B2AE3D27D4EB4FULL;
  h ^= splitmix64(state);
  state ^= k1 * 0x165667B19E3779F9ULL;
  h ^= splitmix64(state);
  return h;
}

double GaussianSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

MeasurementEnsemble::MeasurementEnsemble(Space space, Eigen::VectorXd mean,
                                         double sample_std, long n, double sigma,
                                         std::vector<Eigen::VectorXd> samples)
    : space_(std::move(space)),
      mean_(std::move(mean)),
      sample_std_(sample_std),
      n_(n),
      sigma_(sigma),
      samples_(std::move(samples)) {
  if (n_ < 1) throw std::invalid_argument("MeasurementEnsemble: need n >= 1");
}

double MeasurementEnsemble::sample_std() const {
  if (n_ < 2)
    throw std::domain_error("MeasurementEnsemble: sample deviation needs n >= 2");
  return sample_std_;
}

MeasurementEnsemble MeasurementEnsemble::from_samples(Space space,
                                                      std::vector<Eigen::VectorXd> samples,
                                                      double sigma) {
  if (samples.empty())
    throw std::invalid_argument("MeasurementEnsemble: need at least one sample");
  const long n = static_cast<long>(samples.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(space.dim());
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(n);
  double dev = 0.0;
  if (n >= 2) {
    double acc = 0.0;
    for (const auto& s : samples) {
      const Eigen::VectorXd d = s - mean;
      acc += (space.weights.array() * d.array().square()).sum();
    }
    dev = std::sqrt(acc / (n - 1));
  }
  return MeasurementEnsemble(std::move(space), std::move(mean), dev, n, sigma,
                             std::move(samples));
}

MeasurementEnsemble generate_ensemble(const Space& space, const Eigen::VectorXd& y_exact,
                                      const NoiseModel& noise, long n, std::uint64_t seed,
                                      bool store_samples) {
  if (n < 1) throw std::invalid_argument("generate_ensemble: need n >= 1");
  if (y_exact.size() != space.dim())
    throw std::invalid_argument("generate_ensemble: datum/space size mismatch");
  const double sigma = noise.resolve(y_exact);

  if (sigma < kExactModeFloor) {  // exact mode: every sample equals y_exact
    std::vector<Eigen::VectorXd> samples;
    if (store_samples) samples.assign(static_cast<std::size_t>(n), y_exact);
    return MeasurementEnsemble(space, y_exact, 0.0, n, sigma, std::move(samples));
  }

  GaussianSampler gauss(seed);
  const Eigen::Index dim = space.dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  double sum_norm2 = 0.0;  // sum of ||y_i||^2 in the weighted norm
  std::vector<Eigen::VectorXd> samples;
  if (store_samples) samples.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXd y(dim);
  for (long i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) y[j] = y_exact[j] + sigma * gauss();
    sum += y;
    sum_norm2 += (space.weights.array() * y.array().square()).sum();
    if (store_samples) samples.push_back(y);
  }
  Eigen::VectorXd mean = sum / static_cast<double>(n);
  double dev = 0.0;
  if (n >= 2) {
    const double mean_norm2 = (space.weights.array() * mean.array().square()).sum();
    // s_n^2 = (sum ||y_i||^2 - n ||ybar||^2) / (n - 1)
    dev = std::sqrt(std::max(0.0, (sum_norm2 - n * mean_norm2) / (n - 1)));
  }
  return MeasurementEnsemble(space, std::move(mean), dev, n, sigma, std::move(samples));
}

}  // namespace dualgrad
