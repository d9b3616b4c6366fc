// Command-line front end: every subcommand reads flags/CSV and prints a
// single JSON document {command, inputs, result, warnings} to stdout.
// Exit codes: 0 success, 1 input/validation error, 2 computation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "triangulate/core.hpp"
#include "triangulate/delaware.hpp"
#include "triangulate/forecast.hpp"
#include "triangulate/inversion.hpp"
#include "triangulate/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace tri = triangulate;

// All numeric output carries 12 significant digits.
double sig12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json weights_json(const tri::Weights& w) {
    return json{{"w_price", sig12(w.w_price)},
                {"w_intrinsic", sig12(w.w_intrinsic)},
                {"w_comparables", sig12(w.w_comparables)}};
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(sig12(v(i)));
    return out;
}

void emit(const std::string& command, const json& inputs, const json& result,
          const json& warnings = json::array()) {
    json doc{{"command", command}, {"inputs", inputs}, {"result", result},
             {"warnings", warnings}};
    std::cout << doc.dump(2) << '\n';
}

std::string default_cases_path() {
    if (const char* dir = std::getenv("TRIANGULATE_DATA_DIR"))
        return std::string(dir) + "/delaware_block_cases.csv";
    return "data/delaware_block_cases.csv";
}

Eigen::VectorXd parse_weight_list(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        vals.push_back(tri::csv::to_double(item, "--prior"));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct TriangulateArgs {
    tri::TriangulationParams params;
    std::optional<double> p, vi, vc;
};

void run_triangulate(const TriangulateArgs& a) {
    const tri::Weights w = tri::generalized_weights(a.params);
    json inputs{{"sigma", sig12(a.params.sigma_p)}, {"sigma_i", sig12(a.params.sigma_i)},
                {"sigma_c", sig12(a.params.sigma_c)}, {"rho", sig12(a.params.rho)},
                {"rho_i", sig12(a.params.rho_i)}};
    json result{{"weights", weights_json(w)},
                {"variance", sig12(tri::combined_variance(w, a.params))}};
    const int given = a.p.has_value() + a.vi.has_value() + a.vc.has_value();
    if (given == 3) {
        const tri::EstimateTriple triple{*a.p, *a.vi, *a.vc};
        const tri::CombinedValue cv = tri::combine(triple, w, a.params);
        inputs["p"] = sig12(*a.p);
        inputs["vi"] = sig12(*a.vi);
        inputs["vc"] = sig12(*a.vc);
        result["value"] = sig12(cv.value);
    } else if (given != 0) {
        throw tri::InvalidParam("provide all of --p/--vi/--vc or none");
    }
    emit("triangulate", inputs, result);
}

void run_invert(double ki, double kc, double rho) {
    const tri::ImpliedPrecisions r = tri::implied_ratios(ki, kc, rho);
    emit("invert", json{{"ki", sig12(ki)}, {"kc", sig12(kc)}, {"rho", sig12(rho)}},
         json{{"ratio_c", sig12(r.ratio_c)}, {"ratio_i", sig12(r.ratio_i)}});
}

void run_block(const tri::BlockInputs& in, const tri::CaseRecord& weights) {
    const double v = tri::block_value(in, weights);
    emit("block",
         json{{"p", sig12(in.price)}, {"b", sig12(in.net_asset)},
              {"ebar", sig12(in.avg_earnings)}, {"phi", sig12(in.cap_factor)},
              {"w_market", sig12(weights.w_market)}, {"w_asset", sig12(weights.w_asset)},
              {"w_earnings", sig12(weights.w_earnings)}},
         json{{"value", sig12(v)}});
}

void run_cases(const std::string& path, std::optional<double> rho) {
    const std::vector<tri::CaseRecord> cases = tri::load_cases_file(path);
    const tri::ColumnStats stats = tri::case_table_stats(cases);
    json result{{"count", cases.size()},
                {"mean", {sig12(stats.mean[0]), sig12(stats.mean[1]), sig12(stats.mean[2])}},
                {"stddev",
                 {sig12(stats.stddev[0]), sig12(stats.stddev[1]), sig12(stats.stddev[2])}}};
    json warnings = json::array();
    json inputs{{"data", path}};
    if (rho) {
        inputs["rho"] = sig12(*rho);
        json items = json::array();
        for (const tri::CaseRecord& c : cases) {
            const tri::CasePrecision cp = tri::case_implied_precisions(c, *rho);
            json item{{"name", c.name}, {"year", c.year}};
            if (cp.skipped()) {
                item["skipped"] = cp.skip_reason;
                warnings.push_back("skipped '" + c.name + "': " + cp.skip_reason);
            } else {
                item["ratio_c"] = sig12(cp.precisions->ratio_c);
                item["ratio_i"] = sig12(cp.precisions->ratio_i);
            }
            items.push_back(std::move(item));
        }
        result["implied_precisions"] = std::move(items);
    }
    emit("cases", inputs, result, warnings);
}

struct CombineArgs {
    std::string data;
    bool intercept = false;
    bool sum_to_one = false;
    std::optional<Eigen::Index> window;
    std::optional<double> shrink_lambda;
    std::string prior;
};

void run_combine(const CombineArgs& a) {
    const tri::ForecastPanel panel = tri::load_panel_file(a.data);
    tri::CombineOptions opts;
    opts.include_intercept = a.intercept;
    opts.constrain_sum_to_one = a.sum_to_one;
    json warnings = json::array();
    json inputs{{"data", a.data}, {"intercept", a.intercept}, {"sum_to_one", a.sum_to_one}};

    const tri::CombineFit fit = tri::combining_regression(panel, opts);
    json result{{"forecasters", panel.forecaster_names},
                {"weights", vector_json(fit.weights)},
                {"residual_ss", sig12(fit.residual_ss)}};
    if (fit.has_intercept) result["intercept"] = sig12(fit.intercept);

    if (panel.forecasts.cols() == 2) {
        // Two forecasters: also report the variance-covariance weight
        // estimated from the forecast errors.
        const Eigen::Index n = panel.forecasts.rows();
        std::vector<double> e1(n), e2(n);
        for (Eigen::Index t = 0; t < n; ++t) {
            e1[t] = panel.realizations(t) - panel.forecasts(t, 0);
            e2[t] = panel.realizations(t) - panel.forecasts(t, 1);
        }
        try {
            const double omega = tri::estimate_vc_weight(e1, e2);
            result["vc_weight"] = sig12(omega);
            if (omega < 0.0 || omega > 1.0)
                warnings.push_back("estimated vc weight lies outside [0, 1]; reported unclipped");
        } catch (const tri::DegenerateDenominator& e) {
            warnings.push_back(std::string("vc weight unavailable: ") + e.what());
        }
    }

    if (a.shrink_lambda) {
        inputs["shrink_lambda"] = sig12(*a.shrink_lambda);
        Eigen::VectorXd prior;
        if (!a.prior.empty()) {
            prior = parse_weight_list(a.prior);
            inputs["prior"] = vector_json(prior);
        } else {
            prior = Eigen::VectorXd::Constant(fit.weights.size(),
                                              1.0 / static_cast<double>(fit.weights.size()));
        }
        result["shrunk_weights"] =
            vector_json(tri::shrink_weights(fit.weights, prior, *a.shrink_lambda));
    }

    if (a.window) {
        inputs["window"] = static_cast<long long>(*a.window);
        tri::CombineOptions roll_opts = opts;
        roll_opts.window = a.window;
        json rolled = json::array();
        for (const tri::RollingFit& rf : tri::rolling_weights(panel, roll_opts)) {
            json item{{"end_index", static_cast<long long>(rf.end_index)}};
            if (rf.end_index < static_cast<Eigen::Index>(panel.dates.size()))
                item["date"] = panel.dates[static_cast<std::size_t>(rf.end_index)];
            if (rf.fit) {
                item["weights"] = vector_json(rf.fit->weights);
                if (rf.fit->has_intercept) item["intercept"] = sig12(rf.fit->intercept);
            } else {
                item["error"] = rf.error;
                warnings.push_back("window ending at row " + std::to_string(rf.end_index) +
                                   ": " + rf.error);
            }
            rolled.push_back(std::move(item));
        }
        result["rolling"] = std::move(rolled);
    }
    emit("combine", inputs, result, warnings);
}

struct BacktestArgs {
    std::string data;
    bool sum_to_one = false;
    std::optional<Eigen::Index> window;
    double threshold = 0.05;
};

json valuation_fit_json(const tri::ValuationFit& fit) {
    return json{{"a_price", sig12(fit.a_price)},
                {"a_asset", sig12(fit.a_asset)},
                {"a_earnings", sig12(fit.a_earnings)},
                {"coefficient_sum", sig12(fit.coefficient_sum)},
                {"bias_flagged", fit.bias_flagged}};
}

void run_backtest(const BacktestArgs& a) {
    const tri::ValuationPanel panel = tri::load_valuation_panel_file(a.data);
    tri::CombineOptions opts;
    opts.constrain_sum_to_one = a.sum_to_one;
    json inputs{{"data", a.data}, {"sum_to_one", a.sum_to_one}, {"threshold", sig12(a.threshold)}};
    json warnings = json::array();
    json result;

    const tri::ValuationFit fit = tri::valuation_regression(
        panel.prices_next, panel.prices, panel.net_assets, panel.cap_earnings, opts, a.threshold);
    result = valuation_fit_json(fit);
    if (fit.bias_flagged)
        warnings.push_back("coefficient sum deviates from 1 beyond threshold: one or more "
                           "input columns looks systematically biased");

    if (a.window) {
        inputs["window"] = static_cast<long long>(*a.window);
        const Eigen::Index w = *a.window;
        const Eigen::Index n = static_cast<Eigen::Index>(panel.prices_next.size());
        if (w < 5 || w > n)
            throw tri::InvalidParam("window must lie in [5, panel length]");
        json rolled = json::array();
        for (Eigen::Index end = w - 1; end < n; ++end) {
            const std::size_t lo = static_cast<std::size_t>(end - w + 1);
            const auto slice = [&](const std::vector<double>& col) {
                return std::vector<double>(col.begin() + lo, col.begin() + lo + w);
            };
            json item{{"end_index", static_cast<long long>(end)},
                      {"date", panel.dates[static_cast<std::size_t>(end)]}};
            try {
                const tri::ValuationFit wf =
                    tri::valuation_regression(slice(panel.prices_next), slice(panel.prices),
                                              slice(panel.net_assets), slice(panel.cap_earnings),
                                              opts, a.threshold);
                item.update(valuation_fit_json(wf));
            } catch (const tri::Error& e) {
                item["error"] = e.what();
                warnings.push_back("window ending at row " + std::to_string(end) + ": " +
                                   e.what());
            }
            rolled.push_back(std::move(item));
        }
        result["rolling"] = std::move(rolled);
    }
    emit("backtest", inputs, result, warnings);
}

struct SimulateArgs {
    tri::SimConfig config;
    std::string dump;
    int resolution = 61;
};

void run_simulate(const SimulateArgs& a) {
    const tri::SampleTable samples = tri::generate(a.config);
    const tri::Weights analytic = tri::generalized_weights(a.config.params);
    const tri::Weights oracle = tri::oracle_min_weights(a.config.params, a.resolution);
    json inputs{{"sigma", sig12(a.config.params.sigma_p)},
                {"sigma_i", sig12(a.config.params.sigma_i)},
                {"sigma_c", sig12(a.config.params.sigma_c)},
                {"rho", sig12(a.config.params.rho)},
                {"rho_i", sig12(a.config.params.rho_i)},
                {"true_value", sig12(a.config.true_value)},
                {"n", a.config.n},
                {"seed", a.config.seed}};
    json result{{"weights", weights_json(analytic)},
                {"oracle_weights", weights_json(oracle)},
                {"analytic_variance", sig12(tri::combined_variance(analytic, a.config.params))},
                {"empirical_variance", sig12(tri::empirical_variance(samples, analytic))}};
    if (!a.dump.empty()) {
        std::ofstream out(a.dump);
        if (!out)
            throw tri::InputError("cannot open dump file: " + a.dump);
        tri::write_samples(out, samples);
        result["dump"] = a.dump;
    }
    emit("simulate", inputs, result);
}

void print_error(const std::string& kind, const std::string& message) {
    json doc{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Combines noisy value estimates into minimum-variance weighted averages"};
    app.require_subcommand(1);

    TriangulateArgs tri_args;
    auto* cmd_tri = app.add_subcommand("triangulate", "Optimal combining weights and value");
    cmd_tri->add_option("--sigma", tri_args.params.sigma_p, "Std error of market price")->required();
    cmd_tri->add_option("--sigma-i", tri_args.params.sigma_i, "Std error of intrinsic estimate")->required();
    cmd_tri->add_option("--sigma-c", tri_args.params.sigma_c, "Std error of comparables estimate")->required();
    cmd_tri->add_option("--rho", tri_args.params.rho, "corr(market noise, comparables error)")->required();
    cmd_tri->add_option("--rho-i", tri_args.params.rho_i, "corr(market noise, intrinsic error)");
    cmd_tri->add_option("--p", tri_args.p, "Observed market price");
    cmd_tri->add_option("--vi", tri_args.vi, "Intrinsic value estimate");
    cmd_tri->add_option("--vc", tri_args.vc, "Comparables value estimate");

    double inv_ki = 0.0, inv_kc = 0.0, inv_rho = 0.0;
    auto* cmd_inv = app.add_subcommand("invert", "Implied precision ratios from observed weights");
    cmd_inv->add_option("--ki", inv_ki, "Weight on the intrinsic estimate")->required();
    cmd_inv->add_option("--kc", inv_kc, "Weight on the comparables estimate")->required();
    cmd_inv->add_option("--rho", inv_rho, "corr(market noise, comparables error)")->required();

    tri::BlockInputs block_in;
    tri::CaseRecord block_w;
    auto* cmd_block = app.add_subcommand("block", "Delaware Block weighted value");
    cmd_block->add_option("--p", block_in.price, "Market price")->required();
    cmd_block->add_option("--b", block_in.net_asset, "Net asset value")->required();
    cmd_block->add_option("--ebar", block_in.avg_earnings, "Trailing earnings average")->required();
    cmd_block->add_option("--phi", block_in.cap_factor, "Earnings capitalization factor")->required();
    cmd_block->add_option("--w-market", block_w.w_market, "Weight on market price")->required();
    cmd_block->add_option("--w-asset", block_w.w_asset, "Weight on net asset value")->required();
    cmd_block->add_option("--w-earnings", block_w.w_earnings, "Weight on capitalized earnings")->required();

    std::string cases_path = default_cases_path();
    std::optional<double> cases_rho;
    auto* cmd_cases = app.add_subcommand("cases", "Case table statistics and implied precisions");
    cmd_cases->add_option("--data", cases_path, "Case CSV (name,year,w_market,w_asset,w_earnings)");
    cmd_cases->add_option("--rho", cases_rho, "Report per-case implied precisions at this rho");

    CombineArgs comb;
    auto* cmd_comb = app.add_subcommand("combine", "Forecast-combination estimators over a panel");
    cmd_comb->add_option("--data", comb.data, "Panel CSV (date,realization,forecast_<name>...)")->required();
    cmd_comb->add_flag("--intercept", comb.intercept, "Include an intercept");
    cmd_comb->add_flag("--sum-to-one", comb.sum_to_one, "Constrain weights to sum to one");
    cmd_comb->add_option("--window", comb.window, "Rolling window length");
    cmd_comb->add_option("--shrink-lambda", comb.shrink_lambda, "Shrink toward prior weights, lambda in [0,1]");
    cmd_comb->add_option("--prior", comb.prior, "Comma-separated prior weights (default equal)");

    BacktestArgs back;
    auto* cmd_back = app.add_subcommand("backtest", "Next-period-price valuation regression");
    cmd_back->add_option("--data", back.data, "Panel CSV (date,price_next,price,net_asset,cap_earnings)")->required();
    cmd_back->add_flag("--sum-to-one", back.sum_to_one, "Constrain coefficients to sum to one");
    cmd_back->add_option("--window", back.window, "Rolling window length");
    cmd_back->add_option("--threshold", back.threshold, "Bias flag threshold on |sum - 1|");

    SimulateArgs sim;
    sim.config.true_value = 100.0;
    sim.config.n = 10000;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo run plus oracle comparison");
    cmd_sim->add_option("--sigma", sim.config.params.sigma_p, "Std error of market price")->required();
    cmd_sim->add_option("--sigma-i", sim.config.params.sigma_i, "Std error of intrinsic estimate")->required();
    cmd_sim->add_option("--sigma-c", sim.config.params.sigma_c, "Std error of comparables estimate")->required();
    cmd_sim->add_option("--rho", sim.config.params.rho, "corr(market noise, comparables error)")->required();
    cmd_sim->add_option("--rho-i", sim.config.params.rho_i, "corr(market noise, intrinsic error)");
    cmd_sim->add_option("--true-value", sim.config.true_value, "True value V");
    cmd_sim->add_option("--n", sim.config.n, "Number of draws");
    cmd_sim->add_option("--seed", sim.config.seed, "RNG seed");
    cmd_sim->add_option("--dump", sim.dump, "Write samples as CSV (v,price,v_i,v_c)");
    cmd_sim->add_option("--resolution", sim.resolution, "Oracle grid points per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 1;
    }

    try {
        if (cmd_tri->parsed()) run_triangulate(tri_args);
        else if (cmd_inv->parsed()) run_invert(inv_ki, inv_kc, inv_rho);
        else if (cmd_block->parsed()) run_block(block_in, block_w);
        else if (cmd_cases->parsed()) run_cases(cases_path, cases_rho);
        else if (cmd_comb->parsed()) run_combine(comb);
        else if (cmd_back->parsed()) run_backtest(back);
        else if (cmd_sim->parsed()) run_simulate(sim);
    } catch (const tri::InputError& e) {
        print_error("input", e.what());
        return 1;
    } catch (const tri::NumericError& e) {
        print_error("numeric", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 2;
    }
    return 0;
}
