#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "pursuit/random.hpp"

namespace pursuit {

struct CmaesOptions {
    double initial_sigma = 1.0;
    int max_evaluations = 1000;
    int population_size = 0;  // 0 -> 4 + floor(3 ln d)
    std::uint64_t seed = 1;
};

struct CmaesResult {
    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

inline int cmaes_default_population(int dimension) {
    return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

// (mu/mu_w, lambda) CMA-ES: rank-mu weighted recombination, cumulative
// step-size control, rank-one plus rank-mu covariance adaptation, standard
// default parameters. No restarts; bound handling is the objective's job.
// The start point itself is not evaluated; best_f covers sampled candidates
// only, so an all-spent budget of zero returns an empty best.
inline CmaesResult cmaes_minimize(std::span<const double> start, const CmaesOptions& options,
                                  const std::function<double(std::span<const double>)>& objective) {
    const int d = static_cast<int>(start.size());
    if (d < 1) throw std::invalid_argument("CMA-ES needs at least one variable");
    if (options.initial_sigma <= 0.0) throw std::invalid_argument("initial sigma must be positive");

    const int lambda = options.population_size > 0 ? options.population_size : cmaes_default_population(d);
    const int mu = lambda / 2;

    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mu_eff = 1.0 / weights.squaredNorm();

    const double c_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (d + 1.0)) - 1.0) + c_sigma;
    const double c_c = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
    const double c_1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
    const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                                ((d + 2.0) * (d + 2.0) + mu_eff));
    const double chi_n = std::sqrt(static_cast<double>(d)) *
                         (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

    Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(start.data(), d);
    double sigma = options.initial_sigma;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd path_sigma = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd path_c = Eigen::VectorXd::Zero(d);

    Rng rng(options.seed);
    CmaesResult result;
    result.best_x.assign(start.begin(), start.end());

    std::vector<Eigen::VectorXd> xs(lambda);
    std::vector<double> fs(lambda);
    std::vector<int> rank(lambda);
    int generation = 0;

    while (result.evaluations < options.max_evaluations) {
        ++generation;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov);
        Eigen::VectorXd eigvals = eigen.eigenvalues().cwiseMax(1e-20);
        const Eigen::MatrixXd& basis = eigen.eigenvectors();
        const Eigen::VectorXd scale = eigvals.cwiseSqrt();

        int sampled = 0;
        for (int i = 0; i < lambda && result.evaluations < options.max_evaluations; ++i) {
            Eigen::VectorXd z(d);
            for (int j = 0; j < d; ++j) z[j] = rng.gaussian();
            xs[i] = mean + sigma * (basis * scale.cwiseProduct(z).matrix());
            fs[i] = objective(std::span<const double>(xs[i].data(), static_cast<std::size_t>(d)));
            ++result.evaluations;
            ++sampled;
            if (fs[i] < result.best_f) {
                result.best_f = fs[i];
                result.best_x.assign(xs[i].data(), xs[i].data() + d);
            }
        }
        if (sampled < 2) break;  // budget exhausted mid-generation

        const int mu_used = std::min(mu, sampled);
        rank.resize(sampled);
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return fs[a] < fs[b]; });

        Eigen::VectorXd w_used = weights.head(mu_used);
        w_used /= w_used.sum();
        const double mu_eff_used = 1.0 / w_used.squaredNorm();

        const Eigen::VectorXd old_mean = mean;
        mean.setZero();
        for (int i = 0; i < mu_used; ++i) mean += w_used[i] * xs[rank[i]];

        const Eigen::VectorXd y = (mean - old_mean) / sigma;
        const Eigen::MatrixXd inv_sqrt =
            basis * scale.cwiseInverse().asDiagonal() * basis.transpose();

        path_sigma = (1.0 - c_sigma) * path_sigma +
                     std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff_used) * (inv_sqrt * y);
        const bool h_sigma =
            path_sigma.norm() / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * generation)) <
            (1.4 + 2.0 / (d + 1.0)) * chi_n;
        path_c = (1.0 - c_c) * path_c;
        if (h_sigma) path_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff_used) * y;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < mu_used; ++i) {
            const Eigen::VectorXd yi = (xs[rank[i]] - old_mean) / sigma;
            rank_mu.noalias() += w_used[i] * (yi * yi.transpose());
        }
        cov = (1.0 - c_1 - c_mu) * cov +
              c_1 * (path_c * path_c.transpose() + (h_sigma ? 0.0 : c_c * (2.0 - c_c)) * cov) +
              c_mu * rank_mu;

        sigma *= std::exp((c_sigma / d_sigma) * (path_sigma.norm() / chi_n - 1.0));
        sigma = std::min(sigma, 1e8);
    }
    return result;
}

}  // namespace pursuit
