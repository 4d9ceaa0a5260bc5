#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fd_ops.hpp"
#include "field.hpp"

namespace accrete {

/// Discrete-in-time deformation history y_0 .. y_N on a uniform step tau,
/// with cached per-snapshot deformation gradients. Exposes the three
/// interpolants the incremental scheme is analyzed with: backward constant,
/// forward constant, and piecewise affine. All samplers clamp t to [0, T].
class Trajectory {
public:
    Trajectory(double tau, std::vector<VectorField2> snapshots)
        : tau_(tau), snaps_(std::move(snapshots)) {
        if (snaps_.size() < 1) throw std::invalid_argument("trajectory: no snapshots");
        if (!(tau > 0.0)) throw std::invalid_argument("trajectory: tau must be positive");
        grads_.reserve(snaps_.size());
        for (const auto& s : snaps_) grads_.push_back(grad(s));
    }

    int num_steps() const { return static_cast<int>(snaps_.size()) - 1; }
    double tau() const { return tau_; }
    double horizon() const { return tau_ * num_steps(); }
    const Grid2& grid() const { return snaps_.front().grid(); }

    const VectorField2& snapshot(int i) const { return snaps_.at(i); }
    const Mat2Field& grad_snapshot(int i) const { return grads_.at(i); }

    /// Index of the backward-constant interpolant: y_i on (t_{i-1}, t_i].
    int backward_index(double t) const {
        const int n = num_steps();
        const int i = static_cast<int>(std::ceil(t / tau_ - 1e-9));
        return std::clamp(i, 0, n);
    }

    /// Index of the forward-constant interpolant: y_{i-1} on [t_{i-1}, t_i).
    int forward_index(double t) const {
        const int n = num_steps();
        const int i = static_cast<int>(std::floor(t / tau_ + 1e-9));
        return std::clamp(i, 0, n);
    }

    /// Interval i in [1, N] and barycentric weight alpha in [0, 1] with
    /// t = (1-alpha) t_{i-1} + alpha t_i.
    std::pair<int, double> bracket(double t) const {
        const int n = num_steps();
        if (n == 0) return {0, 0.0};
        int i = static_cast<int>(std::floor(t / tau_)) + 1;
        i = std::clamp(i, 1, n);
        const double alpha = std::clamp(t / tau_ - (i - 1), 0.0, 1.0);
        return {i, alpha};
    }

    VectorField2 sample_affine(double t) const {
        const auto [i, a] = bracket(t);
        if (num_steps() == 0) return snaps_[0];
        VectorField2 out(grid());
        const auto& lo = snaps_[i - 1].data();
        const auto& hi = snaps_[i].data();
        for (std::size_t k = 0; k < out.data().size(); ++k)
            out.data()[k] = (1.0 - a) * lo[k] + a * hi[k];
        return out;
    }

    Mat2Field grad_affine(double t) const {
        const auto [i, a] = bracket(t);
        if (num_steps() == 0) return grads_[0];
        Mat2Field out(grid());
        const Mat2Field& lo = grads_[i - 1];
        const Mat2Field& hi = grads_[i];
        for (int n = 0; n < grid().num_nodes(); ++n) out[n] = (1.0 - a) * lo[n] + a * hi[n];
        return out;
    }

    /// Piecewise-constant rate (y_i - y_{i-1})/tau on interval i >= 1.
    Mat2Field grad_rate(int i) const {
        Mat2Field out(grid());
        const Mat2Field& lo = grads_.at(i - 1);
        const Mat2Field& hi = grads_.at(i);
        for (int n = 0; n < grid().num_nodes(); ++n)
            out[n] = (1.0 / tau_) * (hi[n] - lo[n]);
        return out;
    }

private:
    double tau_;
    std::vector<VectorField2> snaps_;
    std::vector<Mat2Field> grads_;
};

}  // namespace accrete
