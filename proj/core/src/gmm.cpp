#include "plg/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "plg/error.hpp"
#include "plg/log.hpp"
#include "plg/random.hpp"

namespace plg {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

GmmModel::GmmModel(std::vector<GmmComponent> components) : components_(std::move(components)) { prepare(); }

void GmmModel::prepare() {
    inv_cov_.clear();
    log_norm_.clear();
    log_gauss_norm_.clear();
    for (const auto& c : components_) {
        Eigen::LLT<Eigen::Matrix3d> llt(c.cov);
        if (llt.info() != Eigen::Success) throw Error("GMM covariance is not positive definite");
        const Eigen::Matrix3d l = llt.matrixL();
        const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)) + std::log(l(2, 2)));
        inv_cov_.push_back(llt.solve(Eigen::Matrix3d::Identity()));
        const double g = -0.5 * (3.0 * kLog2Pi + log_det);
        log_gauss_norm_.push_back(g);
        log_norm_.push_back((c.weight > 0 ? std::log(c.weight) : -std::numeric_limits<double>::infinity()) + g);
    }
}

double GmmModel::component_log_density(std::size_t k, const Color& z) const {
    const Color d = z - components_[k].mean;
    return log_gauss_norm_[k] - 0.5 * d.dot(inv_cov_[k] * d);
}

double GmmModel::log_density(const Color& z) const {
    double terms[16];
    std::vector<double> big;
    std::span<double> t;
    if (components_.size() <= 16) {
        t = std::span<double>(terms, components_.size());
    } else {
        big.resize(components_.size());
        t = big;
    }
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const Color d = z - components_[k].mean;
        t[k] = log_norm_[k] - 0.5 * d.dot(inv_cov_[k] * d);
    }
    return log_sum_exp(t);
}

std::size_t GmmModel::most_likely_component(const Color& z) const {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const Color d = z - components_[k].mean;
        const double v = log_norm_[k] - 0.5 * d.dot(inv_cov_[k] * d);
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    return best;
}

double log_likelihood(const GmmModel& model, std::span<const Color> pixels) {
    double s = 0;
    for (const auto& z : pixels) s += model.log_density(z);
    return s;
}

GmmModel learn_gmm(std::span<const Color> pixels, std::span<const std::size_t> assignment, std::size_t k,
                   double ridge) {
    std::vector<double> count(k, 0);
    std::vector<Color> sum(k, Color::Zero());
    std::vector<Eigen::Matrix3d> outer(k, Eigen::Matrix3d::Zero());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const std::size_t c = assignment[i];
        count[c] += 1;
        sum[c] += pixels[i];
        outer[c] += pixels[i] * pixels[i].transpose();
    }
    std::vector<GmmComponent> comps;
    const double total = static_cast<double>(pixels.size());
    for (std::size_t c = 0; c < k; ++c) {
        if (count[c] <= 0) continue;
        GmmComponent g;
        g.weight = count[c] / total;
        g.mean = sum[c] / count[c];
        g.cov = outer[c] / count[c] - g.mean * g.mean.transpose();
        g.cov = 0.5 * (g.cov + g.cov.transpose());
        g.cov.diagonal().array() += ridge;
        comps.push_back(g);
    }
    return GmmModel(std::move(comps));
}

GmmModel fit_gmm(std::span<const Color> pixels, const GmmParams& params) {
    if (pixels.empty()) throw Error("fit_gmm: no pixels");
    std::size_t k = static_cast<std::size_t>(std::max(params.k, 1));
    if (pixels.size() < k) {
        log::warn("fit_gmm: " + std::to_string(pixels.size()) + " pixels for " + std::to_string(k) +
                  " components, reducing K");
        k = pixels.size();
    }
    const std::size_t n = pixels.size();

    // k-means++ seeding.
    Rng rng(params.seed);
    std::vector<Color> seeds;
    seeds.push_back(pixels[uniform_index(rng, n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = (pixels[i] - seeds[0]).squaredNorm();
    while (seeds.size() < k) {
        double total = 0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0) {
            double r = uniform01(rng) * total;
            for (pick = 0; pick + 1 < n; ++pick) {
                r -= d2[pick];
                if (r < 0) break;
            }
        } else {
            pick = uniform_index(rng, n);
        }
        seeds.push_back(pixels[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pixels[i] - seeds.back()).squaredNorm());
    }
    std::vector<std::size_t> assign(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            const double d = (pixels[i] - seeds[c]).squaredNorm();
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        assign[i] = best;
    }
    GmmModel model = learn_gmm(pixels, assign, k, params.ridge);

    // EM.
    std::vector<double> history;
    std::vector<double> resp;
    std::vector<double> terms;
    for (int iter = 0; iter <= params.max_iters; ++iter) {
        const std::size_t kk = model.size();
        resp.assign(n * kk, 0.0);
        terms.resize(kk);
        double ll = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < kk; ++c)
                terms[c] = std::log(model.components()[c].weight) + model.component_log_density(c, pixels[i]);
            const double lse = log_sum_exp(terms);
            ll += lse;
            for (std::size_t c = 0; c < kk; ++c) resp[i * kk + c] = std::exp(terms[c] - lse);
        }
        history.push_back(ll);
        if (history.size() >= 2) {
            const double prev = history[history.size() - 2];
            if (ll - prev < params.rel_tol * std::abs(prev)) break;
        }
        if (iter == params.max_iters) break;

        // M-step.
        std::vector<GmmComponent> comps;
        for (std::size_t c = 0; c < kk; ++c) {
            double nk = 0;
            Color mu = Color::Zero();
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i * kk + c];
                mu += resp[i * kk + c] * pixels[i];
            }
            if (nk <= 1e-10 * static_cast<double>(n)) continue;
            mu /= nk;
            Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
            for (std::size_t i = 0; i < n; ++i) {
                const Color d = pixels[i] - mu;
                cov += resp[i * kk + c] * (d * d.transpose());
            }
            cov /= nk;
            cov = 0.5 * (cov + cov.transpose());
            cov.diagonal().array() += params.ridge;
            comps.push_back({nk / static_cast<double>(n), mu, cov});
        }
        double wsum = 0;
        for (const auto& c : comps) wsum += c.weight;
        for (auto& c : comps) c.weight /= wsum;
        model = GmmModel(std::move(comps));
    }
    model.log_likelihood_history = std::move(history);
    return model;
}

}  // namespace plg
