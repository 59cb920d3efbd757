#include "alphacross/blotter.hpp"

#include <cmath>
#include <unordered_map>

#include "alphacross/csv.hpp"
#include "alphacross/error.hpp"

namespace alphacross {

Blotter::Blotter(std::string stream_id, Cents investment, TradeMap trades)
    : stream_id_(std::move(stream_id)), investment_(investment), trades_(std::move(trades)) {
    if (investment_ <= Cents{0}) {
        throw InputError("blotter '" + stream_id_ + "': investment must be positive");
    }
}

Cents Blotter::trade(const std::string& symbol) const {
    auto it = trades_.find(symbol);
    return it == trades_.end() ? Cents{0} : it->second;
}

void Blotter::add(const std::string& symbol, Cents amount) {
    trades_[symbol] += amount;
}

std::vector<Blotter> load_blotters(const std::filesystem::path& path, Cents investment_per_stream) {
    if (investment_per_stream <= Cents{0}) throw InputError("investment per stream must be positive");

    auto table = csv::read(path);
    if (table.header.empty() && table.rows.empty()) throw InputError("'" + path.string() + "': no streams");
    if (table.header != std::vector<std::string>{"stream", "symbol", "dollars"}) {
        throw InputError("'" + path.string() + "': expected header 'stream,symbol,dollars'");
    }

    std::vector<Blotter> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto where = path.string() + ":" + std::to_string(table.line_numbers[r]);
        if (row.size() != 3) throw InputError(where + ": expected 3 fields");
        if (row[0].empty() || row[1].empty()) throw InputError(where + ": empty stream or symbol");
        Cents amount;
        try {
            amount = Cents::parse(row[2]);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        auto [it, inserted] = index.try_emplace(row[0], out.size());
        if (inserted) out.emplace_back(row[0], investment_per_stream);
        out[it->second].add(row[1], amount);
    }
    if (out.empty()) throw InputError("'" + path.string() + "': no streams");
    return out;
}

Cents gross(const Blotter& b) {
    Cents g;
    for (const auto& [symbol, amount] : b.trades()) g += amount.abs();
    return g;
}

GrossTurnover gross_and_turnover(const Blotter& b) {
    auto g = gross(b);
    return {g, ratio(g, b.investment())};
}

CrossOutcome cross_pair(const Blotter& b1, const Blotter& b2) {
    Blotter net(b1.stream_id() + "+" + b2.stream_id(), b1.investment() + b2.investment(), b1.trades());
    Cents delta;
    for (const auto& [symbol, a2] : b2.trades()) {
        Cents a1 = b1.trade(symbol);
        delta += min(a1.positive_part(), a2.negative_part()) + min(a1.negative_part(), a2.positive_part());
        net.add(symbol, a2);
    }

    CrossOutcome out{std::move(net), delta, min(gross(b1), gross(b2))};
    if (out.delta_max == Cents{0}) {
        out.degenerate = true;
        out.xi = 0.0;
    } else {
        out.xi = ratio(out.delta, out.delta_max);
    }
    out.rho = 1.0 - 2.0 * out.xi;
    out.combined_turnover = ratio(gross(out.net), out.net.investment());
    return out;
}

Blotter cross_many(std::span<const Blotter> blotters) {
    if (blotters.empty()) throw InputError("cross_many: no blotters");
    if (blotters.size() == 1) return blotters.front();

    std::string id;
    Cents investment;
    Blotter::TradeMap trades;
    for (const auto& b : blotters) {
        id += (id.empty() ? "" : "+") + b.stream_id();
        investment += b.investment();
        for (const auto& [symbol, amount] : b.trades()) trades[symbol] += amount;
    }
    return Blotter(std::move(id), investment, std::move(trades));
}

double estimate_savings(double crossed_per_stream, double spread_bps, double days, double streams) {
    for (double v : {crossed_per_stream, spread_bps, days, streams}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("estimate_savings: inputs must be finite and non-negative");
    }
    return days * streams * crossed_per_stream * spread_bps / 1e4;
}

nlohmann::json to_json(const Blotter& blotter) {
    nlohmann::json trades = nlohmann::json::object();
    for (const auto& [symbol, amount] : blotter.trades()) trades[symbol] = amount.dollars();
    auto gt = gross_and_turnover(blotter);
    return {
        {"stream", blotter.stream_id()},
        {"investment", blotter.investment().dollars()},
        {"gross", gt.gross.dollars()},
        {"turnover", gt.turnover},
        {"net", std::move(trades)},
    };
}

nlohmann::json to_json(const CrossOutcome& outcome) {
    nlohmann::json net = nlohmann::json::object();
    for (const auto& [symbol, amount] : outcome.net.trades()) net[symbol] = amount.dollars();
    return {
        {"delta", outcome.delta.dollars()},
        {"delta_max", outcome.delta_max.dollars()},
        {"xi", outcome.xi},
        {"rho", outcome.rho},
        {"turnover", outcome.combined_turnover},
        {"net", std::move(net)},
        {"degenerate", outcome.degenerate},
    };
}

} // namespace alphacross
