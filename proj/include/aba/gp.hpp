#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "aba/errors.hpp"
#include "aba/grid.hpp"

namespace aba::gp {

struct RbfKernelParams {
    double signal_variance = 1.0;
    double length_scale = 1.0;

    void validate() const {
        if (!(signal_variance > 0.0) || !(length_scale > 0.0)) {
            throw ConfigError("RBF kernel needs signal_variance > 0 and length_scale > 0");
        }
    }
};

inline double kernel_eval(double a, double b, const RbfKernelParams& params) {
    const double d = a - b;
    return params.signal_variance * std::exp(-(d * d) / (2.0 * params.length_scale * params.length_scale));
}

// Observations for one regression. weights are per-point noise inflation
// factors: point i gets noise variance noise_variance * weights[i]. An empty
// weights vector means all ones.
struct GpDataset {
    std::vector<double> inputs;
    std::vector<double> targets;
    double noise_variance = 0.0;
    std::vector<double> weights;

    std::size_t size() const { return inputs.size(); }

    double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }

    void validate() const {
        if (inputs.size() != targets.size() || (!weights.empty() && weights.size() != inputs.size())) {
            throw ConfigError("GP dataset inputs, targets and weights must have equal length");
        }
        if (!(noise_variance >= 0.0)) {
            throw ConfigError("GP noise variance must be nonnegative");
        }
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw ConfigError("GP noise inflation weights must be positive and finite");
            }
        }
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (!std::isfinite(inputs[i]) || !std::isfinite(targets[i])) {
                throw ConfigError("GP dataset entry " + std::to_string(i) + " is not finite");
            }
        }
    }
};

struct GpPrediction {
    std::vector<double> means;
    std::vector<double> stds;
};

inline constexpr double kInitialJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-2;

// Factor a symmetric matrix, adding diagonal jitter (relative to `scale`) only
// when the plain factorization fails. Returns the jitter that was used.
inline double cholesky_with_jitter(const Eigen::MatrixXd& matrix, double scale, Eigen::LLT<Eigen::MatrixXd>& llt) {
    llt.compute(matrix);
    if (llt.info() == Eigen::Success) {
        return 0.0;
    }
    const auto n = matrix.rows();
    for (double rel = kInitialJitter; rel <= kMaxJitter * (1.0 + 1e-12); rel *= 10.0) {
        Eigen::MatrixXd jittered = matrix;
        jittered.diagonal().array() += rel * scale;
        llt.compute(jittered);
        if (llt.info() == Eigen::Success) {
            return rel * scale;
        }
    }
    throw NumericalInstability("Cholesky factorization of a " + std::to_string(n) + "x" + std::to_string(n) +
                               " covariance failed after maximum jitter");
}

// Zero-mean GP posterior with an RBF kernel. Inputs are divided by
// input_scale before every kernel evaluation; targets are used as given.
// Immutable once built.
class GpPosterior {
  public:
    explicit GpPosterior(RbfKernelParams kernel = {}, double input_scale = 1.0)
        : kernel_(kernel), input_scale_(input_scale) {
        kernel_.validate();
        if (!(input_scale_ > 0.0)) {
            throw ConfigError("GP input scale must be positive");
        }
    }

    static GpPosterior fit(const GpDataset& data, const RbfKernelParams& kernel, double input_scale = 1.0) {
        data.validate();
        GpPosterior post(kernel, input_scale);
        const auto n = static_cast<Eigen::Index>(data.size());
        post.inputs_ = data.inputs;
        post.targets_ = data.targets;
        if (n == 0) {
            return post;
        }
        post.x_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            post.x_[i] = data.inputs[static_cast<std::size_t>(i)] / input_scale;
        }
        Eigen::MatrixXd gram(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                gram(i, j) = gram(j, i) = kernel_eval(post.x_[i], post.x_[j], kernel);
            }
            gram(i, i) += data.noise_variance * data.weight(static_cast<std::size_t>(i));
        }
        post.jitter_ = cholesky_with_jitter(gram, kernel.signal_variance, post.llt_);
        const Eigen::Map<const Eigen::VectorXd> y(data.targets.data(), n);
        post.alpha_ = post.llt_.solve(y);
        return post;
    }

    bool empty() const { return inputs_.empty(); }
    std::size_t size() const { return inputs_.size(); }
    const RbfKernelParams& kernel() const { return kernel_; }
    double input_scale() const { return input_scale_; }
    double jitter() const { return jitter_; }
    std::span<const double> inputs() const { return inputs_; }
    std::span<const double> targets() const { return targets_; }

    double mean_at(double point) const {
        if (empty()) {
            return 0.0;
        }
        const double z = point / input_scale_;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x_.size(); ++i) {
            acc += kernel_eval(z, x_[i], kernel_) * alpha_[i];
        }
        return acc;
    }

    // Predictive means only; skips the triangular solve the variances need.
    std::vector<double> predict_means(std::span<const double> points) const {
        std::vector<double> out(points.size(), 0.0);
        if (empty() || points.empty()) {
            return out;
        }
        const Eigen::VectorXd mean = cross_covariance(points).transpose() * alpha_;
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = mean[static_cast<Eigen::Index>(i)];
        }
        return out;
    }

    GpPrediction predict(std::span<const double> points) const {
        const auto m = static_cast<Eigen::Index>(points.size());
        GpPrediction out;
        out.means.assign(points.size(), 0.0);
        out.stds.assign(points.size(), std::sqrt(kernel_.signal_variance));
        if (empty() || m == 0) {
            return out;
        }
        const Eigen::MatrixXd cross = cross_covariance(points); // n x m
        const Eigen::VectorXd mean = cross.transpose() * alpha_;
        Eigen::MatrixXd v = cross;
        llt_.matrixL().solveInPlace(v);
        const Eigen::VectorXd reduction = v.colwise().squaredNorm();
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            out.means[k] = mean[i];
            out.stds[k] = std::sqrt(std::max(0.0, kernel_.signal_variance - reduction[i]));
        }
        return out;
    }

    GpPrediction predict(const BudgetGrid& grid) const { return predict(grid.values()); }

    // Joint posterior covariance over a set of query points.
    Eigen::MatrixXd covariance(std::span<const double> points) const {
        const auto m = static_cast<Eigen::Index>(points.size());
        Eigen::MatrixXd cov(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                cov(i, j) = cov(j, i) = kernel_eval(points[static_cast<std::size_t>(i)] / input_scale_,
                                                    points[static_cast<std::size_t>(j)] / input_scale_, kernel_);
            }
        }
        if (empty()) {
            return cov;
        }
        Eigen::MatrixXd v = cross_covariance(points);
        llt_.matrixL().solveInPlace(v);
        cov.noalias() -= v.transpose() * v;
        return cov;
    }

  private:
    Eigen::MatrixXd cross_covariance(std::span<const double> points) const {
        const auto n = x_.size();
        const auto m = static_cast<Eigen::Index>(points.size());
        Eigen::MatrixXd cross(n, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double z = points[static_cast<std::size_t>(j)] / input_scale_;
            for (Eigen::Index i = 0; i < n; ++i) {
                cross(i, j) = kernel_eval(z, x_[i], kernel_);
            }
        }
        return cross;
    }

    RbfKernelParams kernel_;
    double input_scale_;
    double jitter_ = 0.0;
    std::vector<double> inputs_;
    std::vector<double> targets_;
    Eigen::VectorXd x_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

inline GpPosterior fit(const GpDataset& data, const RbfKernelParams& kernel, double input_scale = 1.0) {
    return GpPosterior::fit(data, kernel, input_scale);
}

inline GpPrediction predict(const GpPosterior& post, const BudgetGrid& grid) { return post.predict(grid); }

// Clamp the mean above the best observed budget to the value at that budget.
// Without a best budget (no observations yet) the means pass through.
inline std::vector<double> saturate_mean(std::span<const double> means, const BudgetGrid& grid,
                                         std::optional<double> b_max, double n_max) {
    std::vector<double> out(means.begin(), means.end());
    if (!b_max) {
        return out;
    }
    for (std::size_t i = 0; i < out.size() && i < grid.size(); ++i) {
        if (grid[i] > *b_max) {
            out[i] = n_max;
        }
    }
    return out;
}

} // namespace aba::gp
