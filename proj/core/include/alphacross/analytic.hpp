#pragma once

#include <optional>
#include <span>
#include <vector>

// Closed-form turnover and netting results for combined alpha streams.
//
// Conventions: turnover is traded dollars over invested dollars; rho is the
// pairwise crossing parameter (1 = nothing crosses, -1 = everything crosses),
// which callers may identify with the pairwise return correlation. Infeasible
// inputs raise InputError instead of producing NaN.
namespace alphacross::analytic {

/// Uniform per-stream turnover tau, uniform pairwise rho, and N streams.
struct UniformModel {
    double tau = 0.0;
    double rho = 0.0;
    int n = 1;

    /// Throws InputError if tau < 0, rho outside (-1, 1], n < 1, or a negative
    /// rho below the equicorrelation floor -1/(n-1).
    void validate() const;
};

class PortfolioWeights {
public:
    /// Each weight must be positive and the weights must sum to 1 within 1e-12.
    explicit PortfolioWeights(std::vector<double> weights);

    static PortfolioWeights uniform(std::size_t n);

    std::span<const double> values() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
};

struct NettingModel {
    double psi = 1.0;
    int n = 1;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Surviving fraction of the investment level after netting in one aggregation unit.
struct NettingFactor {
    double zeta = 1.0;
    bool fully_netted = false; // zeta == 0: the books cancel completely

    /// Turnover enhancement factor 1/zeta; empty when fully netted.
    std::optional<double> enhancement() const;
};

double combine_alphas(const PortfolioWeights& w, std::span<const double> alphas);

/// Turnover of two crossed streams:
/// ((1+rho)/2)(w1 t1 + w2 t2) + ((1-rho)/2)|w1 t1 - w2 t2|.
double pair_turnover(double w1, double t1, double w2, double t2, double rho);

/// Equal weights and turnovers: ((1+rho)/2) tau.
double equal_pair_turnover(double tau, double rho);

/// Correlation between the means of two disjoint pairs drawn from four
/// equicorrelated variables with pairwise correlation gamma: 2 gamma / (1 + gamma).
double correlation_of_halves(double gamma);

/// Correlation between two halves after k doublings starting from rho0:
/// 2^k rho0 / (1 + (2^k - 1) rho0).
double rho_after_doublings(double rho0, int k);

/// tau (rho + (1 - rho) / N), valid for every integer N >= 1.
double turnover_closed(double tau, double rho, int n);
double turnover_closed(const UniformModel& m);

/// Large-N floor tau * rho. Requires rho in [0, 1].
double turnover_limit(double tau, double rho);

double weighted_average_turnover(const PortfolioWeights& w, std::span<const double> turnovers);

/// [tau rho_lower, tau rho_upper]; requires 0 < rho_lower <= rho_upper <= 1.
Interval limit_interval(double tau, double rho_lower, double rho_upper);

/// Smallest common pairwise correlation an n x n correlation matrix can carry: -1/(n-1).
double min_uniform_correlation(int n);

/// zeta(N) = psi + (1 - psi) / N.
NettingFactor netting_factor(const NettingModel& m);

} // namespace alphacross::analytic
