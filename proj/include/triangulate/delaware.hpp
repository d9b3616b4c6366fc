#ifndef TRIANGULATE_DELAWARE_HPP
#define TRIANGULATE_DELAWARE_HPP

#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "triangulate/csv.hpp"
#include "triangulate/errors.hpp"
#include "triangulate/inversion.hpp"

namespace triangulate {

/// One judicial appraisal: weights on market price, net asset value,
/// and capitalized earnings.  Published weights are two-decimal
/// roundings, so sum-to-one is enforced at 0.005.
struct CaseRecord {
    std::string name;
    int year = 0;
    double w_market = 0.0;
    double w_asset = 0.0;
    double w_earnings = 0.0;
};

struct BlockInputs {
    double price = 0.0;         // contemporaneous market price
    double net_asset = 0.0;     // net asset value of equity
    double avg_earnings = 0.0;  // five-year trailing earnings average
    double cap_factor = 0.0;    // earnings capitalization, typically 5-15
};

inline void validate(const CaseRecord& c) {
    for (double w : {c.w_market, c.w_asset, c.w_earnings}) {
        if (!std::isfinite(w) || w < 0.0 || w > 1.0)
            throw InvalidWeights("case weights must lie in [0, 1]");
    }
    if (std::abs(c.w_market + c.w_asset + c.w_earnings - 1.0) > 0.005)
        throw InvalidWeights("case weights must sum to 1 within 0.005");
}

/// Delaware Block value: weighted average of market price, net asset
/// value, and capitalized trailing earnings.
inline double block_value(const BlockInputs& in, const CaseRecord& weights) {
    validate(weights);
    if (!std::isfinite(in.price) || !std::isfinite(in.net_asset) || !std::isfinite(in.avg_earnings))
        throw InvalidParam("block inputs must be finite");
    if (!(in.cap_factor > 0.0) || !std::isfinite(in.cap_factor))
        throw InvalidParam("cap_factor must be positive and finite");
    return weights.w_market * in.price + weights.w_asset * in.net_asset +
           weights.w_earnings * in.cap_factor * in.avg_earnings;
}

struct ColumnStats {
    std::array<double, 3> mean{};    // (w_market, w_asset, w_earnings)
    std::array<double, 3> stddev{};  // sample (n-1) divisor
};

inline ColumnStats case_table_stats(const std::vector<CaseRecord>& cases) {
    if (cases.empty())
        throw EmptyTable("case table is empty");
    const double n = static_cast<double>(cases.size());
    ColumnStats out;
    for (const CaseRecord& c : cases) {
        out.mean[0] += c.w_market;
        out.mean[1] += c.w_asset;
        out.mean[2] += c.w_earnings;
    }
    for (double& m : out.mean) m /= n;
    if (cases.size() > 1) {
        for (const CaseRecord& c : cases) {
            const std::array<double, 3> w{c.w_market, c.w_asset, c.w_earnings};
            for (int j = 0; j < 3; ++j)
                out.stddev[j] += (w[j] - out.mean[j]) * (w[j] - out.mean[j]);
        }
        for (double& s : out.stddev) s = std::sqrt(s / (n - 1.0));
    }
    return out;
}

/// Implied precisions for one case, or the reason it was skipped
/// (boundary weights have no finite inversion).
struct CasePrecision {
    std::optional<ImpliedPrecisions> precisions;
    std::string skip_reason;

    bool skipped() const { return !precisions.has_value(); }
};

/// Maps the block weights onto the triangulation model: the net asset
/// leg plays the intrinsic estimate, capitalized earnings plays the
/// comparables estimate.
inline CasePrecision case_implied_precisions(const CaseRecord& c, double rho) {
    validate(c);
    try {
        return CasePrecision{implied_ratios(c.w_asset, c.w_earnings, rho), {}};
    } catch (const InfeasibleWeights& e) {
        return CasePrecision{std::nullopt, e.what()};
    }
}

/// Reads a case table: header `name,year,w_market,w_asset,w_earnings`.
inline std::vector<CaseRecord> load_cases(std::istream& in) {
    const auto rows = csv::read(in);
    if (rows.empty())
        throw EmptyTable("case file has no rows");
    const std::vector<std::string> expected{"name", "year", "w_market", "w_asset", "w_earnings"};
    if (rows.front() != expected)
        throw InputError("case file header must be name,year,w_market,w_asset,w_earnings");
    std::vector<CaseRecord> cases;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5)
            throw InputError("case row " + std::to_string(i) + " has " +
                             std::to_string(r.size()) + " fields, expected 5");
        const std::string ctx = "case row " + std::to_string(i);
        CaseRecord c;
        c.name = r[0];
        c.year = static_cast<int>(csv::to_double(r[1], ctx));
        c.w_market = csv::to_double(r[2], ctx);
        c.w_asset = csv::to_double(r[3], ctx);
        c.w_earnings = csv::to_double(r[4], ctx);
        validate(c);
        cases.push_back(std::move(c));
    }
    if (cases.empty())
        throw EmptyTable("case file has a header but no cases");
    return cases;
}

inline std::vector<CaseRecord> load_cases_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open case file: " + path);
    return load_cases(in);
}

}  // namespace triangulate

#endif
