#include "plg/kalman.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "plg/error.hpp"

namespace plg {

namespace {

using Cov = KalmanBoxFilter::Cov;
using H_t = Eigen::Matrix<double, 4, 7>;

constexpr double kMinAspect = 1e-6;
constexpr double kMinArea = 1e-6;

Cov transition() {
    Cov F = Cov::Identity();
    F(0, 4) = F(1, 5) = F(2, 6) = 1.0;
    return F;
}

H_t observation() {
    H_t H = H_t::Zero();
    for (int i = 0; i < 4; ++i) H(i, i) = 1.0;
    return H;
}

Cov process_noise() {
    Cov Q = Cov::Identity();
    Q(4, 4) = Q(5, 5) = 0.01;
    Q(6, 6) = 1e-4;
    return Q;
}

Eigen::Matrix4d measurement_noise() {
    Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
    R(2, 2) = R(3, 3) = 10.0;
    return R;
}

}  // namespace

KalmanBoxFilter::Meas KalmanBoxFilter::to_measurement(const BBox& b) {
    if (!(b.w > 0) || !(b.h > 0)) throw Error("KalmanBoxFilter: box must have positive size");
    return Meas(b.cx(), b.cy(), b.w * b.h, b.w / b.h);
}

BBox KalmanBoxFilter::to_box(double cx, double cy, double s, double r) {
    s = std::max(s, kMinArea);
    r = std::max(r, kMinAspect);
    const double w = std::sqrt(s * r);
    return BBox::from_center(cx, cy, w, s / w);
}

KalmanBoxFilter::KalmanBoxFilter(const BBox& initial) {
    x_.setZero();
    x_.head<4>() = to_measurement(initial);
    P_ = Cov::Identity() * 10.0;
    for (int i = 4; i < 7; ++i) P_(i, i) = 1e4;
}

BBox KalmanBoxFilter::predict() {
    if (x_(2) + x_(6) <= 0) x_(6) = 0;
    static const Cov F = transition();
    static const Cov Q = process_noise();
    x_ = F * x_;
    P_ = F * P_ * F.transpose() + Q;
    P_ = 0.5 * (P_ + P_.transpose());
    return box();
}

void KalmanBoxFilter::update(const BBox& measured) {
    static const H_t H = observation();
    static const Eigen::Matrix4d R = measurement_noise();
    const Meas z = to_measurement(measured);
    const Eigen::Matrix4d S = H * P_ * H.transpose() + R;
    const Eigen::Matrix<double, 7, 4> K = S.llt().solve(H * P_).transpose();
    x_ += K * (z - H * x_);
    // Joseph form keeps P symmetric positive definite.
    const Cov I_KH = Cov::Identity() - K * H;
    P_ = I_KH * P_ * I_KH.transpose() + K * R * K.transpose();
    P_ = 0.5 * (P_ + P_.transpose());
    x_(3) = std::max(x_(3), kMinAspect);
}

BBox KalmanBoxFilter::box() const { return to_box(x_(0), x_(1), x_(2), x_(3)); }

}  // namespace plg
