#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace plg {

using Color = Eigen::Vector3d;  ///< RGB in [0, 255]

struct GmmComponent {
    double weight = 0;
    Color mean = Color::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

/// Full-covariance Gaussian mixture over RGB colors.
class GmmModel {
public:
    GmmModel() = default;
    explicit GmmModel(std::vector<GmmComponent> components);

    const std::vector<GmmComponent>& components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }

    double log_density(const Color& z) const;
    double component_log_density(std::size_t k, const Color& z) const;  ///< log N(z | k), no weight
    /// argmax_k  log w_k + log N(z | k)
    std::size_t most_likely_component(const Color& z) const;

    /// Log-likelihood after each EM iteration (filled by fit_gmm).
    std::vector<double> log_likelihood_history;

private:
    void prepare();

    std::vector<GmmComponent> components_;
    std::vector<Eigen::Matrix3d> inv_cov_;
    std::vector<double> log_norm_;  ///< log w_k - 0.5 (3 log 2pi + log det)
    std::vector<double> log_gauss_norm_;
};

struct GmmParams {
    int k = 5;
    int max_iters = 100;
    double rel_tol = 1e-4;  ///< stop when the relative log-likelihood gain drops below this
    double ridge = 1e-4;    ///< added to every covariance diagonal
    std::uint64_t seed = 0;
};

/// EM from a k-means++ seeding. With fewer pixels than components the
/// component count is reduced (logged). Components that lose all
/// responsibility are dropped.
GmmModel fit_gmm(std::span<const Color> pixels, const GmmParams& params);

/// Maximum-likelihood parameters from a hard assignment of pixels to
/// components (the learning step of iterated graph-cut segmentation).
/// Components with no pixels are dropped.
GmmModel learn_gmm(std::span<const Color> pixels, std::span<const std::size_t> assignment,
                   std::size_t k, double ridge = 1e-4);

/// Sum of log densities.
double log_likelihood(const GmmModel& model, std::span<const Color> pixels);

}  // namespace plg
