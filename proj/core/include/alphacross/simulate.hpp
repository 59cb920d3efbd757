#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Monte Carlo ensembles of correlated alpha trade vectors and the
// hierarchical pairwise combination ("1 + 1 = 2, 2 + 2 = 4, ...") run on them.
//
// Each path draws, per stock s, a common factor f_s and per-stream noise
// e_{i,s}; stream i trades sqrt(c0) f_s + sqrt(1 - c0) e_{i,s}, rescaled so the
// stream's gross is tau * I / N. Paths use independent random engines seeded
// from (seed, path), so every statistic is independent of the worker count.
namespace alphacross::sim {

enum class GrossScaling {
    exact,    // every stream rescaled to gross tau * I / N exactly
    expected, // common scale chosen so the expected gross is tau * I / N
};

std::string to_string(GrossScaling s);
GrossScaling parse_gross_scaling(const std::string& text);

struct EnsembleConfig {
    int n_streams = 1;
    int n_stocks = 1;
    double base_correlation = 0.0; // c0
    double tau = 0.1;
    double total_investment = 1e9;
    int paths = 1;
    std::uint64_t seed = 0;
    GrossScaling scaling = GrossScaling::exact;

    void validate() const; // throws InputError
    double investment_per_stream() const { return total_investment / n_streams; }
};

/// Row-major n_streams x n_stocks matrix of signed dollar trades for one path.
class TradeMatrix {
public:
    TradeMatrix() = default;
    TradeMatrix(int streams, int stocks) : streams_(streams), stocks_(stocks), data_(std::size_t(streams) * stocks) {}

    int streams() const { return streams_; }
    int stocks() const { return stocks_; }
    std::span<double> row(int i) { return {data_.data() + std::size_t(i) * stocks_, std::size_t(stocks_)}; }
    std::span<const double> row(int i) const { return {data_.data() + std::size_t(i) * stocks_, std::size_t(stocks_)}; }
    double& operator()(int i, int s) { return data_[std::size_t(i) * stocks_ + s]; }
    double operator()(int i, int s) const { return data_[std::size_t(i) * stocks_ + s]; }

    friend bool operator==(const TradeMatrix&, const TradeMatrix&) = default;

private:
    int streams_ = 0;
    int stocks_ = 0;
    std::vector<double> data_;
};

/// Paths are produced on demand from the config, or replayed from fixture
/// matrices supplied by the caller.
class AlphaEnsemble {
public:
    explicit AlphaEnsemble(EnsembleConfig config);

    /// Fixed trade matrices; config.paths, n_streams and n_stocks are taken from them.
    static AlphaEnsemble from_paths(EnsembleConfig config, std::vector<TradeMatrix> paths);

    const EnsembleConfig& config() const { return config_; }
    TradeMatrix path(int p) const;

private:
    EnsembleConfig config_;
    std::vector<TradeMatrix> fixture_;
};

AlphaEnsemble generate_ensemble(const EnsembleConfig& config);

/// Raw (unscaled) one-factor draws for path p; exposed for statistical tests.
TradeMatrix raw_draws(const EnsembleConfig& config, int p);

struct CurvePoint {
    int n = 1;
    double mean = 0.0;
    double std_error = 0.0;
};

struct TurnoverCurve {
    std::vector<CurvePoint> points;

    void validate() const; // n strictly increasing, std_error >= 0
};

struct FitResult {
    double a0 = 0.0;
    double a1 = 0.0;
    double residual_norm = 0.0;
};

struct RunOptions {
    int workers = 0; // 0 = hardware concurrency
};

/// Turnover of combined groups of 1, 2, 4, ..., N adjacent streams, averaged
/// over groups and paths. Requires N to be a power of two.
TurnoverCurve tournament_turnover(const AlphaEnsemble& e, RunOptions opts = {});

/// Crossing parameter rho = 1 - 2 xi for every adjacent pair of level-k
/// combined streams, over all paths (pairs ordered by path, then position).
std::vector<double> empirical_crossing_params(const AlphaEnsemble& e, int level, RunOptions opts = {});

/// Netting factor gross(sum of positions) / sum of gross(position) at group
/// sizes 1, 2, 4, ..., N, treating the generated vectors as positions.
TurnoverCurve measure_netting(const AlphaEnsemble& e, RunOptions opts = {});

/// Least squares of turnover_mean on (1, 1/N).
FitResult fit_inverse_n(const TurnoverCurve& curve);

/// Pooled correlation between distinct groups at each level l = 0..log2(N)-1
/// (groups of 2^l adjacent streams), estimated from the zero-mean second
/// moments of group sums over all stocks and paths. per_batch holds the same
/// estimate on `batches` contiguous blocks of paths.
struct LevelCorrelations {
    std::vector<double> pooled;
    std::vector<std::vector<double>> per_batch; // [batch][level]
};

LevelCorrelations level_correlations(const AlphaEnsemble& e, int batches, RunOptions opts = {});

/// Top-of-tournament turnover of each path (all N streams combined).
std::vector<double> combined_turnover_per_path(const AlphaEnsemble& e, RunOptions opts = {});

bool is_power_of_two(int n);

std::string curve_to_csv(const TurnoverCurve& curve);
nlohmann::json to_json(const FitResult& fit);

} // namespace alphacross::sim
