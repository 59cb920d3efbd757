#include "alphacross/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "alphacross/blotter.hpp"
#include "alphacross/error.hpp"
#include "alphacross/numeric.hpp"

namespace alphacross::sim {

namespace {

int resolve_workers(int requested, int paths) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(w, 1, std::max(paths, 1));
}

// Runs fn(p) for p in [0, paths). Results must be written to per-path slots;
// the reduction happens afterwards in path order.
template <class Fn>
void for_each_path(int paths, int workers, Fn&& fn) {
    workers = resolve_workers(workers, paths);
    if (workers == 1) {
        for (int p = 0; p < paths; ++p) fn(p);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int p = next.fetch_add(1); p < paths; p = next.fetch_add(1)) {
                try {
                    fn(p);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

int log2_exact(int n) {
    int k = 0;
    while ((1 << k) < n) ++k;
    return k;
}

void require_tournament(const EnsembleConfig& c) {
    if (!is_power_of_two(c.n_streams)) {
        throw InputError("n_streams = " + std::to_string(c.n_streams) +
                         " is not a power of two; tournament combination needs N = 2^k");
    }
}

// Group sums at successive levels: level 0 is the path itself, level l + 1
// adds adjacent pairs of level-l groups.
class GroupLevels {
public:
    explicit GroupLevels(TradeMatrix base) { levels_.push_back(std::move(base)); }

    const TradeMatrix& at(int level) {
        while (static_cast<int>(levels_.size()) <= level) {
            const TradeMatrix& prev = levels_.back();
            TradeMatrix next(prev.streams() / 2, prev.stocks());
            for (int j = 0; j < next.streams(); ++j) {
                auto a = prev.row(2 * j);
                auto b = prev.row(2 * j + 1);
                auto out = next.row(j);
                for (int s = 0; s < next.stocks(); ++s) out[s] = a[s] + b[s];
            }
            levels_.push_back(std::move(next));
        }
        return levels_[level];
    }

private:
    std::vector<TradeMatrix> levels_;
};

double abs_sum(std::span<const double> v) {
    double g = 0.0;
    for (double x : v) g += std::abs(x);
    return g;
}

TurnoverCurve reduce_curve(const std::vector<std::vector<double>>& per_path, int levels) {
    TurnoverCurve curve;
    std::vector<double> column(per_path.size());
    for (int l = 0; l < levels; ++l) {
        for (std::size_t p = 0; p < per_path.size(); ++p) column[p] = per_path[p][l];
        auto ms = mean_and_stderr(column);
        curve.points.push_back({1 << l, ms.mean, ms.std_error});
    }
    return curve;
}

Blotter to_blotter(std::span<const double> trades, double investment, std::string id) {
    Blotter b(std::move(id), Cents{std::llround(investment * 100.0)});
    for (std::size_t s = 0; s < trades.size(); ++s) {
        Cents c{std::llround(trades[s] * 100.0)};
        if (c != Cents{0}) b.add("S" + std::to_string(s), c);
    }
    return b;
}

} // namespace

std::string to_string(GrossScaling s) {
    return s == GrossScaling::exact ? "exact" : "expected";
}

GrossScaling parse_gross_scaling(const std::string& text) {
    if (text == "exact") return GrossScaling::exact;
    if (text == "expected") return GrossScaling::expected;
    throw InputError("unknown gross scaling '" + text + "' (expected 'exact' or 'expected')");
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

void EnsembleConfig::validate() const {
    if (n_streams < 1) throw InputError("n_streams must be at least 1");
    if (n_stocks < 1) throw InputError("n_stocks must be at least 1");
    if (!(base_correlation >= 0.0 && base_correlation <= 1.0)) {
        throw InputError("base correlation c0 must lie in [0, 1]");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("tau must be finite and non-negative");
    if (!(total_investment > 0.0) || !std::isfinite(total_investment)) {
        throw InputError("total investment must be positive");
    }
    if (paths < 1) throw InputError("paths must be at least 1");
}

AlphaEnsemble::AlphaEnsemble(EnsembleConfig config) : config_(config) { config_.validate(); }

AlphaEnsemble AlphaEnsemble::from_paths(EnsembleConfig config, std::vector<TradeMatrix> paths) {
    if (paths.empty()) throw InputError("fixture ensemble needs at least one path");
    for (const auto& m : paths) {
        if (m.streams() != paths.front().streams() || m.stocks() != paths.front().stocks()) {
            throw InputError("fixture paths must share one shape");
        }
    }
    config.paths = static_cast<int>(paths.size());
    config.n_streams = paths.front().streams();
    config.n_stocks = paths.front().stocks();
    AlphaEnsemble e(config);
    e.fixture_ = std::move(paths);
    return e;
}

TradeMatrix raw_draws(const EnsembleConfig& c, int p) {
    auto seed = static_cast<std::uint64_t>(c.seed);
    auto path = static_cast<std::uint64_t>(p);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal;

    const double common = std::sqrt(c.base_correlation);
    const double idio = std::sqrt(1.0 - c.base_correlation);
    std::vector<double> factor(c.n_stocks);
    for (double& f : factor) f = normal(engine);

    TradeMatrix m(c.n_streams, c.n_stocks);
    for (int i = 0; i < c.n_streams; ++i) {
        for (int s = 0; s < c.n_stocks; ++s) m(i, s) = common * factor[s] + idio * normal(engine);
    }
    return m;
}

TradeMatrix AlphaEnsemble::path(int p) const {
    if (p < 0 || p >= config_.paths) throw InputError("path index out of range");
    if (!fixture_.empty()) return fixture_[p];

    TradeMatrix m = raw_draws(config_, p);
    const double target = config_.tau * config_.investment_per_stream();
    if (config_.scaling == GrossScaling::expected) {
        // Each raw entry is a unit normal with E|x| = sqrt(2/pi).
        const double scale = target / (config_.n_stocks * std::sqrt(2.0 / std::numbers::pi));
        for (int i = 0; i < m.streams(); ++i) {
            for (double& x : m.row(i)) x *= scale;
        }
        return m;
    }
    for (int i = 0; i < m.streams(); ++i) {
        auto row = m.row(i);
        double g = abs_sum(row);
        if (g == 0.0) continue;
        const double scale = target / g;
        for (double& x : row) x *= scale;
    }
    return m;
}

AlphaEnsemble generate_ensemble(const EnsembleConfig& config) { return AlphaEnsemble(config); }

void TurnoverCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && points[i].n <= points[i - 1].n) throw InputError("curve: n values must be strictly increasing");
        if (!(points[i].std_error >= 0.0)) throw InputError("curve: standard errors must be non-negative");
    }
}

TurnoverCurve tournament_turnover(const AlphaEnsemble& e, RunOptions opts) {
    const auto& c = e.config();
    require_tournament(c);
    const int levels = log2_exact(c.n_streams) + 1;
    const double per_stream = c.investment_per_stream();

    std::vector<std::vector<double>> per_path(c.paths, std::vector<double>(levels));
    for_each_path(c.paths, opts.workers, [&](int p) {
        GroupLevels groups(e.path(p));
        for (int l = 0; l < levels; ++l) {
            const TradeMatrix& g = groups.at(l);
            const double investment = per_stream * static_cast<double>(1 << l);
            double sum = 0.0;
            for (int j = 0; j < g.streams(); ++j) sum += abs_sum(g.row(j)) / investment;
            per_path[p][l] = sum / g.streams();
        }
    });
    return reduce_curve(per_path, levels);
}

std::vector<double> combined_turnover_per_path(const AlphaEnsemble& e, RunOptions opts) {
    const auto& c = e.config();
    std::vector<double> out(c.paths);
    for_each_path(c.paths, opts.workers, [&](int p) {
        TradeMatrix m = e.path(p);
        std::vector<double> total(c.n_stocks, 0.0);
        for (int i = 0; i < m.streams(); ++i) {
            auto row = m.row(i);
            for (int s = 0; s < c.n_stocks; ++s) total[s] += row[s];
        }
        out[p] = abs_sum(total) / c.total_investment;
    });
    return out;
}

std::vector<double> empirical_crossing_params(const AlphaEnsemble& e, int level, RunOptions opts) {
    const auto& c = e.config();
    require_tournament(c);
    const int top = log2_exact(c.n_streams);
    if (level < 0 || level >= top) {
        throw InputError("crossing level must lie in [0, " + std::to_string(top - 1) + "] for N = " +
                         std::to_string(c.n_streams));
    }
    const int pairs = c.n_streams >> (level + 1);
    const double investment = c.investment_per_stream() * static_cast<double>(1 << level);

    std::vector<double> out(std::size_t(c.paths) * pairs);
    for_each_path(c.paths, opts.workers, [&](int p) {
        GroupLevels groups(e.path(p));
        const TradeMatrix& g = groups.at(level);
        for (int j = 0; j < pairs; ++j) {
            auto outcome = cross_pair(to_blotter(g.row(2 * j), investment, "L"),
                                      to_blotter(g.row(2 * j + 1), investment, "R"));
            out[std::size_t(p) * pairs + j] = outcome.rho;
        }
    });
    return out;
}

TurnoverCurve measure_netting(const AlphaEnsemble& e, RunOptions opts) {
    const auto& c = e.config();
    require_tournament(c);
    const int levels = log2_exact(c.n_streams) + 1;

    std::vector<std::vector<double>> per_path(c.paths, std::vector<double>(levels));
    for_each_path(c.paths, opts.workers, [&](int p) {
        TradeMatrix base = e.path(p);
        std::vector<double> stream_gross(base.streams());
        for (int i = 0; i < base.streams(); ++i) stream_gross[i] = abs_sum(base.row(i));

        GroupLevels groups(std::move(base));
        for (int l = 0; l < levels; ++l) {
            const TradeMatrix& g = groups.at(l);
            const int size = 1 << l;
            double sum = 0.0;
            int counted = 0;
            for (int j = 0; j < g.streams(); ++j) {
                double separate = 0.0;
                for (int i = j * size; i < (j + 1) * size; ++i) separate += stream_gross[i];
                if (separate == 0.0) continue;
                sum += abs_sum(g.row(j)) / separate;
                ++counted;
            }
            per_path[p][l] = counted > 0 ? sum / counted : 1.0;
        }
    });
    return reduce_curve(per_path, levels);
}

FitResult fit_inverse_n(const TurnoverCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 2) throw InputError("fit_inverse_n: need at least two points");

    const double count = static_cast<double>(pts.size());
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& p : pts) {
        if (p.n < 1) throw InputError("fit_inverse_n: n must be at least 1");
        x_mean += 1.0 / p.n;
        y_mean += p.mean;
    }
    x_mean /= count;
    y_mean /= count;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : pts) {
        double dx = 1.0 / p.n - x_mean;
        sxx += dx * dx;
        sxy += dx * (p.mean - y_mean);
    }
    if (sxx == 0.0) throw DegenerateError("fit_inverse_n: all points share one n");

    FitResult fit;
    fit.a1 = sxy / sxx;
    fit.a0 = y_mean - fit.a1 * x_mean;
    double rss = 0.0;
    for (const auto& p : pts) {
        double r = p.mean - (fit.a0 + fit.a1 / p.n);
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    return fit;
}

LevelCorrelations level_correlations(const AlphaEnsemble& e, int batches, RunOptions opts) {
    const auto& c = e.config();
    require_tournament(c);
    const int levels = log2_exact(c.n_streams); // levels with at least two groups
    if (levels < 1) throw InputError("level_correlations: need at least two streams");
    if (batches < 1 || batches > c.paths) throw InputError("level_correlations: batches must lie in [1, paths]");

    // Per path: slot 0 holds sum_s total_s^2, slot 1 + l holds sum_s sum_j G_{j,s}^2.
    std::vector<std::vector<double>> moments(c.paths, std::vector<double>(levels + 1));
    for_each_path(c.paths, opts.workers, [&](int p) {
        GroupLevels groups(e.path(p));
        for (int l = 0; l <= levels; ++l) {
            const TradeMatrix& g = groups.at(l);
            double sq = 0.0;
            for (int j = 0; j < g.streams(); ++j) {
                for (double x : g.row(j)) sq += x * x;
            }
            moments[p][l == levels ? 0 : 1 + l] = sq;
        }
    });

    auto estimate = [&](int begin, int end) {
        std::vector<CompensatedSum> sums(levels + 1);
        for (int p = begin; p < end; ++p) {
            for (int k = 0; k <= levels; ++k) sums[k].add(moments[p][k]);
        }
        std::vector<double> gamma(levels);
        for (int l = 0; l < levels; ++l) {
            const double groups = static_cast<double>(c.n_streams >> l);
            const double within = sums[1 + l].value();
            gamma[l] = (sums[0].value() - within) / ((groups - 1.0) * within);
        }
        return gamma;
    };

    LevelCorrelations out;
    out.pooled = estimate(0, c.paths);
    for (int b = 0; b < batches; ++b) {
        int begin = static_cast<int>(static_cast<long long>(c.paths) * b / batches);
        int end = static_cast<int>(static_cast<long long>(c.paths) * (b + 1) / batches);
        out.per_batch.push_back(estimate(begin, end));
    }
    return out;
}

std::string curve_to_csv(const TurnoverCurve& curve) {
    std::ostringstream os;
    os << "n,turnover_mean,turnover_stderr\n";
    for (const auto& p : curve.points) {
        os << p.n << ',' << format_double(p.mean) << ',' << format_double(p.std_error) << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const FitResult& fit) {
    return {{"a0", fit.a0}, {"a1", fit.a1}, {"residual_norm", fit.residual_norm}};
}

} // namespace alphacross::sim
