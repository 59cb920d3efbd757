#include "alphacross/correlations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "alphacross/csv.hpp"
#include "alphacross/error.hpp"
#include "alphacross/numeric.hpp"

namespace alphacross::corr {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
constexpr double kPsdTolerance = 1e-10;

double parse_value(const std::string& cell, const std::string& where) {
    if (cell.empty()) return kMissing;
    double v = 0.0;
    const char* first = cell.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw InputError(where + ": cannot parse '" + cell + "' as a number");
    }
    return v;
}

} // namespace

std::optional<std::size_t> ReturnsPanel::find(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
}

void ReturnsPanel::validate(std::size_t min_series) const {
    if (ids.size() != series.size()) throw InputError("panel: id/series count mismatch");
    if (ids.size() < min_series) {
        throw InputError("panel: need at least " + std::to_string(min_series) + " series, found " +
                         std::to_string(ids.size()));
    }
    std::set<std::string> seen;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!seen.insert(ids[k]).second) throw InputError("panel: duplicate series id '" + ids[k] + "'");
        if (series[k].size() != period_labels.size()) {
            throw InputError("panel: series '" + ids[k] + "' length differs from the period count");
        }
    }
}

ReturnsPanel load_panel(const std::filesystem::path& path, std::size_t min_series) {
    auto table = csv::read(path);
    if (table.header.empty()) throw InputError("'" + path.string() + "': empty file");
    if (table.header.size() < 2) throw InputError("'" + path.string() + "': no series columns");

    ReturnsPanel panel;
    panel.ids.assign(table.header.begin() + 1, table.header.end());
    for (const auto& id : panel.ids) {
        if (id.empty()) throw InputError("'" + path.string() + "': empty column name");
    }
    panel.series.assign(panel.ids.size(), {});

    std::set<std::string> labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto where = path.string() + ":" + std::to_string(table.line_numbers[r]);
        if (row.size() != table.header.size()) {
            throw InputError(where + ": expected " + std::to_string(table.header.size()) + " fields, found " +
                             std::to_string(row.size()));
        }
        if (row[0].empty()) throw InputError(where + ": empty period label");
        if (!labels.insert(row[0]).second) throw InputError(where + ": duplicate period '" + row[0] + "'");
        panel.period_labels.push_back(row[0]);
        for (std::size_t k = 1; k < row.size(); ++k) panel.series[k - 1].push_back(parse_value(row[k], where));
    }
    if (panel.period_labels.empty()) throw InputError("'" + path.string() + "': no data rows");
    panel.validate(min_series);
    return panel;
}

ReturnsPanel load_returns(const std::filesystem::path& path) { return load_panel(path, 2); }

FactorFit regress(const std::vector<double>& y, const std::vector<std::vector<double>>& columns) {
    const std::size_t k = columns.size();
    for (const auto& col : columns) {
        if (col.size() != y.size()) throw InputError("regress: column length differs from response");
    }

    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < y.size(); ++t) {
        bool ok = !is_missing(y[t]);
        for (std::size_t j = 0; ok && j < k; ++j) ok = !is_missing(columns[j][t]);
        if (ok) rows.push_back(t);
    }
    if (rows.size() < k + 2) {
        throw InputError("regress: " + std::to_string(rows.size()) + " complete observations for " +
                         std::to_string(k) + " factors (need at least " + std::to_string(k + 2) + ")");
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd yv(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        auto t = rows[r];
        yv(r) = y[t];
        x(r, 0) = 1.0;
        for (std::size_t j = 0; j < k; ++j) x(r, Eigen::Index(j + 1)) = columns[j][t];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) throw InputError("regress: factor matrix is rank deficient");
    Eigen::VectorXd coef = qr.solve(yv);
    Eigen::VectorXd resid = yv - x * coef;

    FactorFit fit;
    fit.observations = rows.size();
    fit.intercept = coef(0);
    const double sigma2 = resid.squaredNorm() / static_cast<double>(n - x.cols());
    Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    for (std::size_t j = 0; j < k; ++j) {
        auto idx = Eigen::Index(j + 1);
        fit.betas.push_back(coef(idx));
        fit.beta_stderr.push_back(std::sqrt(std::max(0.0, sigma2 * xtx_inv(idx, idx))));
    }
    fit.residuals.assign(y.size(), kMissing);
    for (Eigen::Index r = 0; r < n; ++r) fit.residuals[rows[r]] = resid(r);
    return fit;
}

ReturnsPanel factor_residuals(const ReturnsPanel& panel, const ReturnsPanel& factors,
                              const std::optional<std::string>& rf_id) {
    panel.validate(1);
    factors.validate(1);

    std::unordered_map<std::string, std::size_t> factor_row;
    for (std::size_t t = 0; t < factors.periods(); ++t) factor_row.emplace(factors.period_labels[t], t);
    std::vector<std::size_t> align(panel.periods());
    for (std::size_t t = 0; t < panel.periods(); ++t) {
        auto it = factor_row.find(panel.period_labels[t]);
        if (it == factor_row.end()) {
            throw InputError("factors: no row for period '" + panel.period_labels[t] + "'");
        }
        align[t] = it->second;
    }

    std::optional<std::size_t> rf_col;
    if (rf_id) {
        rf_col = factors.find(*rf_id);
        if (!rf_col) throw InputError("factors: no column named '" + *rf_id + "'");
    }

    std::vector<std::vector<double>> regressors;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (rf_col && j == *rf_col) continue;
        std::vector<double> col(panel.periods());
        for (std::size_t t = 0; t < panel.periods(); ++t) col[t] = factors.series[j][align[t]];
        regressors.push_back(std::move(col));
    }
    if (regressors.empty()) throw InputError("factors: no regressor columns");

    ReturnsPanel out;
    out.period_labels = panel.period_labels;
    out.ids = panel.ids;
    for (std::size_t f = 0; f < panel.size(); ++f) {
        std::vector<double> y = panel.series[f];
        if (rf_col) {
            for (std::size_t t = 0; t < y.size(); ++t) y[t] -= factors.series[*rf_col][align[t]];
        }
        FactorFit fit;
        try {
            fit = regress(y, regressors);
        } catch (const InputError& e) {
            throw InputError("fund '" + panel.ids[f] + "': " + e.what());
        }
        std::vector<double> adjusted = fit.residuals;
        for (double& v : adjusted) {
            if (!is_missing(v)) v += fit.intercept;
        }
        out.series.push_back(std::move(adjusted));
    }
    return out;
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> ids, Eigen::MatrixXd values, int min_overlap_used)
    : ids_(std::move(ids)), values_(std::move(values)), min_overlap_used_(min_overlap_used) {
    const auto n = static_cast<Eigen::Index>(ids_.size());
    if (values_.rows() != n || values_.cols() != n) throw InputError("correlation matrix: shape does not match ids");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (values_(i, i) != 1.0) throw InputError("correlation matrix: diagonal must be 1");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double a = values_(i, j);
            double b = values_(j, i);
            if (std::isnan(a) != std::isnan(b) || (!std::isnan(a) && a != b)) {
                throw InputError("correlation matrix: not symmetric");
            }
            if (!std::isnan(a) && (a < -1.0 || a > 1.0)) throw InputError("correlation matrix: entry outside [-1, 1]");
        }
    }
}

CorrelationMatrix CorrelationMatrix::from_values(Eigen::MatrixXd values) {
    std::vector<std::string> ids;
    for (Eigen::Index i = 0; i < values.rows(); ++i) ids.push_back("s" + std::to_string(i));
    return CorrelationMatrix(std::move(ids), std::move(values), 0);
}

std::optional<double> CorrelationMatrix::at(std::size_t i, std::size_t j) const {
    double v = values_(Eigen::Index(i), Eigen::Index(j));
    if (std::isnan(v)) return std::nullopt;
    return v;
}

bool CorrelationMatrix::complete() const { return !values_.hasNaN(); }

std::vector<double> CorrelationMatrix::valid_offdiagonal() const {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
            if (!std::isnan(values_(i, j))) out.push_back(values_(i, j));
        }
    }
    return out;
}

CorrelationMatrix uniform_correlation_matrix(int n, double rho) {
    if (n < 1) throw InputError("uniform_correlation_matrix: n must be positive");
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
    m.diagonal().setOnes();
    return CorrelationMatrix::from_values(std::move(m));
}

CorrelationMatrix estimate_correlations(const ReturnsPanel& panel, int min_overlap) {
    if (min_overlap < 3) throw InputError("estimate_correlations: min_overlap must be at least 3");
    panel.validate(2);

    const auto n = static_cast<Eigen::Index>(panel.size());
    Eigen::MatrixXd values = Eigen::MatrixXd::Constant(n, n, kMissing);
    values.diagonal().setOnes();
    std::vector<std::string> warnings;

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = panel.series[i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& b = panel.series[j];
            std::vector<std::size_t> common;
            for (std::size_t t = 0; t < a.size(); ++t) {
                if (!is_missing(a[t]) && !is_missing(b[t])) common.push_back(t);
            }
            if (static_cast<int>(common.size()) < min_overlap) continue;

            bool flat_a = true;
            bool flat_b = true;
            for (auto t : common) {
                flat_a = flat_a && a[t] == a[common.front()];
                flat_b = flat_b && b[t] == b[common.front()];
            }
            if (flat_a || flat_b) {
                warnings.push_back("pair (" + panel.ids[i] + ", " + panel.ids[j] +
                                   "): zero variance on the overlap; pair left missing");
                continue;
            }

            double ma = 0.0;
            double mb = 0.0;
            for (auto t : common) {
                ma += a[t];
                mb += b[t];
            }
            ma /= static_cast<double>(common.size());
            mb /= static_cast<double>(common.size());
            double saa = 0.0;
            double sbb = 0.0;
            double sab = 0.0;
            for (auto t : common) {
                double da = a[t] - ma;
                double db = b[t] - mb;
                saa += da * da;
                sbb += db * db;
                sab += da * db;
            }
            double r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
            values(i, j) = r;
            values(j, i) = r;
        }
    }
    CorrelationMatrix out(panel.ids, std::move(values), min_overlap);
    out.warnings = std::move(warnings);
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw DegenerateError("quantile of an empty sample");
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QuantileBounds offdiag_quantile_bounds(const CorrelationMatrix& c, double q_low, double q_high, int bins) {
    if (!(q_low >= 0.0 && q_low < q_high && q_high <= 1.0)) {
        throw InputError("quantile bounds: need 0 <= q_low < q_high <= 1");
    }
    if (bins < 1) throw InputError("quantile bounds: bins must be positive");

    std::vector<double> entries = c.valid_offdiagonal();
    if (entries.empty()) throw DegenerateError("quantile bounds: no valid off-diagonal correlations");
    std::sort(entries.begin(), entries.end());

    QuantileBounds out;
    out.q_low = q_low;
    out.q_high = q_high;
    out.rho_lower = quantile_sorted(entries, q_low);
    out.rho_upper = quantile_sorted(entries, q_high);

    const double width = 2.0 / bins;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : entries) {
        auto b = static_cast<int>(std::floor((v + 1.0) / width));
        ++counts[std::clamp(b, 0, bins - 1)];
    }
    const double total = static_cast<double>(entries.size());
    for (int b = 0; b < bins; ++b) {
        out.histogram.push_back({-1.0 + (b + 0.5) * width, static_cast<double>(counts[b]) / (total * width)});
    }
    return out;
}

PsdCheck check_psd(const CorrelationMatrix& c) {
    if (!c.complete()) throw InputError("check_psd: correlation matrix has missing entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.values(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DegenerateError("check_psd: eigenvalue decomposition failed");
    double min_eig = solver.eigenvalues().minCoeff();
    return {min_eig >= -kPsdTolerance, min_eig};
}

nlohmann::json to_json(const QuantileBounds& b) {
    return {{"rho_lower", b.rho_lower}, {"rho_upper", b.rho_upper}, {"q_low", b.q_low}, {"q_high", b.q_high}};
}

std::string histogram_to_csv(const QuantileBounds& b) {
    std::ostringstream os;
    os << "bin_center,density\n";
    for (const auto& bin : b.histogram) os << format_double(bin.center) << ',' << format_double(bin.density) << '\n';
    return os.str();
}

} // namespace alphacross::corr
