#include "alphacross/analytic.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "alphacross/error.hpp"

namespace alphacross::analytic {

namespace {

constexpr double kWeightTolerance = 1e-12;

void require(bool ok, const std::string& message) {
    if (!ok) throw InputError(message);
}

bool finite(double x) { return std::isfinite(x); }

// Negative common correlations are only attainable down to -1/(n-1).
void require_feasible_negative(double rho, int n, const char* what) {
    if (rho < 0.0 && n >= 2) {
        require(rho >= min_uniform_correlation(n),
                std::string(what) + ": correlation " + std::to_string(rho) +
                    " below the equicorrelation floor -1/(n-1) for n = " + std::to_string(n));
    }
}

} // namespace

void UniformModel::validate() const {
    require(finite(tau) && tau >= 0.0, "tau must be finite and non-negative");
    require(finite(rho) && rho > -1.0 && rho <= 1.0, "rho must lie in (-1, 1]");
    require(n >= 1, "n must be at least 1");
    require_feasible_negative(rho, n, "uniform model");
}

PortfolioWeights::PortfolioWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    require(!weights_.empty(), "weights: empty");
    for (double w : weights_) require(finite(w) && w > 0.0, "weights: every weight must be positive");
    double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    require(std::abs(sum - 1.0) <= kWeightTolerance, "weights: must sum to 1, got " + std::to_string(sum));
}

PortfolioWeights PortfolioWeights::uniform(std::size_t n) {
    require(n >= 1, "weights: n must be at least 1");
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    // n * (1/n) may miss 1 by a few ulps; the last weight absorbs the residue.
    w.back() += 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
    return PortfolioWeights(std::move(w));
}

std::optional<double> NettingFactor::enhancement() const {
    if (fully_netted) return std::nullopt;
    return 1.0 / zeta;
}

double combine_alphas(const PortfolioWeights& w, std::span<const double> alphas) {
    require(alphas.size() == w.size(), "combine_alphas: weight/alpha length mismatch");
    auto wv = w.values();
    return std::inner_product(wv.begin(), wv.end(), alphas.begin(), 0.0);
}

double pair_turnover(double w1, double t1, double w2, double t2, double rho) {
    require(finite(w1) && finite(w2) && w1 > 0.0 && w2 > 0.0, "pair_turnover: weights must be positive");
    require(std::abs(w1 + w2 - 1.0) <= kWeightTolerance, "pair_turnover: weights must sum to 1");
    require(finite(t1) && finite(t2) && t1 >= 0.0 && t2 >= 0.0, "pair_turnover: turnovers must be non-negative");
    require(finite(rho) && rho >= -1.0 && rho <= 1.0, "pair_turnover: rho must lie in [-1, 1]");
    double a = w1 * t1;
    double b = w2 * t2;
    return 0.5 * (1.0 + rho) * (a + b) + 0.5 * (1.0 - rho) * std::abs(a - b);
}

double equal_pair_turnover(double tau, double rho) {
    require(finite(tau) && tau >= 0.0, "equal_pair_turnover: tau must be non-negative");
    require(finite(rho) && rho >= -1.0 && rho <= 1.0, "equal_pair_turnover: rho must lie in [-1, 1]");
    return 0.5 * (1.0 + rho) * tau;
}

double correlation_of_halves(double gamma) {
    require(finite(gamma) && gamma <= 1.0, "correlation_of_halves: gamma must be at most 1");
    require(gamma >= min_uniform_correlation(4),
            "correlation_of_halves: gamma below -1/3 is not a valid 4-variable correlation");
    return 2.0 * gamma / (1.0 + gamma);
}

double rho_after_doublings(double rho0, int k) {
    require(k >= 0 && k < 63, "rho_after_doublings: k must lie in [0, 62]");
    require(finite(rho0) && rho0 > -1.0 && rho0 <= 1.0, "rho_after_doublings: rho0 must lie in (-1, 1]");
    if (k == 0) return rho0;
    double scale = std::ldexp(1.0, k);
    double denom = 1.0 + (scale - 1.0) * rho0;
    require(denom > 0.0, "rho_after_doublings: rho0 infeasible for " + std::to_string(k) + " doublings");
    return scale * rho0 / denom;
}

double turnover_closed(double tau, double rho, int n) {
    UniformModel{tau, rho, n}.validate();
    if (n == 1) return tau;
    // Floor plus the 1/N excess, so that subtracting tau * rho recovers the excess
    // with a single rounding.
    return tau * rho + tau * (1.0 - rho) / static_cast<double>(n);
}

double turnover_closed(const UniformModel& m) { return turnover_closed(m.tau, m.rho, m.n); }

double turnover_limit(double tau, double rho) {
    require(finite(tau) && tau >= 0.0, "turnover_limit: tau must be non-negative");
    require(finite(rho) && rho >= 0.0 && rho <= 1.0, "turnover_limit: rho must lie in [0, 1]");
    return tau * rho;
}

double weighted_average_turnover(const PortfolioWeights& w, std::span<const double> turnovers) {
    require(turnovers.size() == w.size(), "weighted_average_turnover: length mismatch");
    for (double t : turnovers) require(finite(t) && t >= 0.0, "weighted_average_turnover: turnovers must be non-negative");
    auto wv = w.values();
    return std::inner_product(wv.begin(), wv.end(), turnovers.begin(), 0.0);
}

Interval limit_interval(double tau, double rho_lower, double rho_upper) {
    require(finite(tau) && tau >= 0.0, "limit_interval: tau must be non-negative");
    require(finite(rho_lower) && rho_lower > 0.0, "limit_interval: rho_lower must be positive");
    require(finite(rho_upper) && rho_upper <= 1.0, "limit_interval: rho_upper must be at most 1");
    require(rho_lower <= rho_upper, "limit_interval: rho_lower exceeds rho_upper");
    return {tau * rho_lower, tau * rho_upper};
}

double min_uniform_correlation(int n) {
    require(n >= 2, "min_uniform_correlation: n must be at least 2");
    return -1.0 / static_cast<double>(n - 1);
}

NettingFactor netting_factor(const NettingModel& m) {
    require(finite(m.psi) && m.psi >= -1.0 && m.psi <= 1.0, "netting_factor: psi must lie in [-1, 1]");
    require(m.n >= 1, "netting_factor: n must be at least 1");
    require_feasible_negative(m.psi, m.n, "netting_factor");
    double zeta = m.psi + (1.0 - m.psi) / static_cast<double>(m.n);
    // At the floor psi = -1/(n-1) zeta is zero up to rounding.
    if (zeta <= 1e-12) return {0.0, true};
    return {zeta, false};
}

} // namespace alphacross::analytic
