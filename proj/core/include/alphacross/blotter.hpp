#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alphacross/money.hpp"

namespace alphacross {

/// One stream's desired signed trades (positive = buy, negative = sell) per
/// symbol, together with the investment level allocated to the stream.
class Blotter {
public:
    using TradeMap = std::map<std::string, Cents>;

    /// Throws InputError unless investment > 0.
    Blotter(std::string stream_id, Cents investment, TradeMap trades = {});

    const std::string& stream_id() const { return stream_id_; }
    Cents investment() const { return investment_; }
    const TradeMap& trades() const { return trades_; }

    /// Signed trade in `symbol`, zero when absent.
    Cents trade(const std::string& symbol) const;

    /// Adds a signed amount to the trade in `symbol`.
    void add(const std::string& symbol, Cents amount);

private:
    std::string stream_id_;
    Cents investment_;
    TradeMap trades_;
};

struct GrossTurnover {
    Cents gross;
    double turnover = 0.0;
};

struct CrossOutcome {
    Blotter net;
    Cents delta;
    Cents delta_max;
    double xi = 0.0;
    double rho = 1.0;
    double combined_turnover = 0.0;
    bool degenerate = false;
};

/// Reads `stream,symbol,dollars` rows. One blotter per distinct stream, in order
/// of first appearance; repeated (stream, symbol) rows are summed.
std::vector<Blotter> load_blotters(const std::filesystem::path& path, Cents investment_per_stream);

Cents gross(const Blotter& b);
GrossTurnover gross_and_turnover(const Blotter& b);

/// Crosses opposing flows symbol by symbol. Same-direction flows add and never
/// count toward delta. A stream with no trading yields degenerate = true,
/// xi = 0, rho = 1.
CrossOutcome cross_pair(const Blotter& b1, const Blotter& b2);

/// Signed per-symbol sum over all streams; investment is the sum of investments.
Blotter cross_many(std::span<const Blotter> blotters);

/// Annual-style savings from crossing: days * streams * crossed * spread_bps / 1e4.
double estimate_savings(double crossed_per_stream, double spread_bps, double days, double streams);

nlohmann::json to_json(const CrossOutcome& outcome);
nlohmann::json to_json(const Blotter& blotter);

} // namespace alphacross
