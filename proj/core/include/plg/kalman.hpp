#pragma once

#include <Eigen/Core>

#include "plg/image.hpp"

namespace plg {

/// Constant-velocity box filter over [cx, cy, s, r, vcx, vcy, vs] where s is
/// the box area and r the aspect ratio w/h (r has no velocity).
class KalmanBoxFilter {
public:
    using State = Eigen::Matrix<double, 7, 1>;
    using Cov = Eigen::Matrix<double, 7, 7>;
    using Meas = Eigen::Matrix<double, 4, 1>;

    explicit KalmanBoxFilter(const BBox& initial);

    BBox predict();
    void update(const BBox& measured);

    BBox box() const;
    const State& state() const noexcept { return x_; }
    const Cov& covariance() const noexcept { return P_; }

    static Meas to_measurement(const BBox& b);
    static BBox to_box(double cx, double cy, double s, double r);

private:
    State x_;
    Cov P_;
};

}  // namespace plg
