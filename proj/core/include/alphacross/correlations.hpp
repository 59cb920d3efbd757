#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace alphacross::corr {

/// Per-period series keyed by id, in file column order. Missing values are NaN.
struct ReturnsPanel {
    std::vector<std::string> period_labels;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> series;

    std::size_t periods() const { return period_labels.size(); }
    std::size_t size() const { return ids.size(); }
    std::optional<std::size_t> find(const std::string& id) const;
    void validate(std::size_t min_series) const;
};

inline bool is_missing(double v) { return std::isnan(v); }

/// CSV with a `period` first column and one column per series; blank = missing.
ReturnsPanel load_panel(const std::filesystem::path& path, std::size_t min_series);

/// load_panel requiring at least two funds.
ReturnsPanel load_returns(const std::filesystem::path& path);

struct FactorFit {
    double intercept = 0.0;
    std::vector<double> betas;        // one per regressor column
    std::vector<double> beta_stderr;  // classical OLS standard errors
    std::size_t observations = 0;
    std::vector<double> residuals;    // aligned with the input series, NaN where excluded
};

/// OLS of y on [1, X] over rows where y and every column of X are present.
/// Throws InputError when there are fewer than columns + 2 rows or X is rank deficient.
FactorFit regress(const std::vector<double>& y, const std::vector<std::vector<double>>& columns);

/// Replaces each fund series by its factor-regression residuals plus intercept.
/// Factors are matched to fund periods by label; when rf_id is set that column
/// is subtracted from fund returns and excluded from the regressors.
ReturnsPanel factor_residuals(const ReturnsPanel& panel, const ReturnsPanel& factors,
                              const std::optional<std::string>& rf_id);

class CorrelationMatrix {
public:
    CorrelationMatrix(std::vector<std::string> ids, Eigen::MatrixXd values, int min_overlap_used);

    /// Complete matrix from explicit values (validated symmetric, unit diagonal, entries in [-1, 1]).
    static CorrelationMatrix from_values(Eigen::MatrixXd values);

    const std::vector<std::string>& ids() const { return ids_; }
    const Eigen::MatrixXd& values() const { return values_; }
    int min_overlap_used() const { return min_overlap_used_; }
    std::size_t size() const { return ids_.size(); }

    std::optional<double> at(std::size_t i, std::size_t j) const;
    bool complete() const;
    std::vector<double> valid_offdiagonal() const; // upper triangle, row-major

    std::vector<std::string> warnings;

private:
    std::vector<std::string> ids_;
    Eigen::MatrixXd values_; // NaN marks a missing pair
    int min_overlap_used_ = 0;
};

/// n x n matrix with unit diagonal and every off-diagonal entry equal to rho.
CorrelationMatrix uniform_correlation_matrix(int n, double rho);

/// Pairwise-complete Pearson correlations. Pairs with fewer than min_overlap
/// mutual observations, or zero variance on the overlap, are left missing.
CorrelationMatrix estimate_correlations(const ReturnsPanel& panel, int min_overlap = 24);

struct HistogramBin {
    double center = 0.0;
    double density = 0.0;
};

struct QuantileBounds {
    double rho_lower = 0.0;
    double rho_upper = 0.0;
    double q_low = 0.0;
    double q_high = 1.0;
    std::vector<HistogramBin> histogram;
};

/// Linear-interpolation quantile of sorted data at h = (n - 1) q.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Bounds are the q_low and q_high quantiles of the valid off-diagonal entries.
/// The histogram spans [-1, 1] in `bins` equal bins, normalized to unit area.
QuantileBounds offdiag_quantile_bounds(const CorrelationMatrix& c, double q_low, double q_high, int bins = 101);

struct PsdCheck {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
};

PsdCheck check_psd(const CorrelationMatrix& c);

nlohmann::json to_json(const QuantileBounds& b);
std::string histogram_to_csv(const QuantileBounds& b);

} // namespace alphacross::corr
