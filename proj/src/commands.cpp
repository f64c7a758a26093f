#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fprw/cli.hpp"
#include "fprw/selftest.hpp"

namespace fprw {

using nlohmann::json;

namespace {

ClassifyOptions classify_options(const RunOptions& o) { return {o.critical_tol, o.warning_band}; }

json optional_number(const std::optional<double>& x) { return x ? json_number(*x) : json(nullptr); }

json law_to_json(const AsymptoticLaw& law) {
    json j;
    j["kind"] = law_kind_name(law.kind);
    j["label"] = law.label();
    j["factor"] = law.kind == LawKind::Inherited ? json(law.factor_index) : json(nullptr);
    j["lambda"] = json_number(law.lambda);
    j["kappa"] = law.kappa;
    j["confidence"] = law.confidence == Confidence::Exact ? "exact" : "near_critical";
    return j;
}

json singularity_to_json(const std::optional<Singularity>& s) {
    if (!s) return nullptr;
    return json{{"q", json_number(s->q)}, {"k", s->k}, {"lambda", json_number(s->lambda)}, {"kappa", s->kappa}};
}

std::string factor_type(const FactorSpec& spec) {
    static const char* names[] = {"lattice", "finite_group", "tree", "explicit"};
    return names[spec.index()];
}

}  // namespace

json cmd_analyze(const Config& cfg) {
    const FreeProduct fp = FreeProduct::from_spec(cfg.product);
    const ProductAnalytics pa = analyze_product(fp);
    const AsymptoticLaw law = classify_from(fp, pa, classify_options(cfg.options));

    json r;
    json factors = json::array();
    for (std::size_t i = 0; i < fp.size(); ++i) {
        const GreenModel& f = fp.factor(i);
        const ExtReal theta = f.theta();
        json jf;
        jf["index"] = i;
        jf["type"] = factor_type(cfg.product.factors[i]);
        jf["description"] = describe(cfg.product.factors[i]);
        jf["radius"] = json_number(f.radius());
        jf["g_at_r"] = json_number(f.g_at_radius());
        jf["gprime_at_r"] = json_number(f.g_at_radius().is_finite() ? f.gprime_at_radius() : ExtReal::infinity());
        jf["theta"] = json_number(theta);
        jf["period"] = f.period();
        jf["psi_at_theta"] = json_number(f.psi_w(theta.ieee()));
        jf["singularity"] = singularity_to_json(f.singularity());
        factors.push_back(std::move(jf));
    }
    r["factors"] = std::move(factors);
    json w = json::array();
    for (double a : fp.alphas()) w.push_back(json_number(a));
    r["weights"] = std::move(w);
    r["theta_bar"] = json_number(pa.theta_bar);
    r["argmin"] = pa.argmin;
    r["psi_bar"] = json_number(pa.psi_bar);
    r["phi_bar"] = json_number(pa.phi_bar);
    r["radius"] = json_number(pa.radius);
    r["g_at_radius"] = json_number(pa.g_at_radius);
    r["gprime_at_radius"] = json_number(pa.gprime_at_radius);
    r["spectral_radius"] = json_number(1.0 / pa.radius);
    r["period"] = pa.period;
    r["law"] = law_to_json(law);
    r["degenerate"] = pa.degenerate;
    std::optional<double> ac;
    if (fp.size() == 2) ac = critical_alpha(FactorPair(fp.factor_ptr(0), fp.factor_ptr(1)));
    r["alpha_c"] = optional_number(ac);

    std::vector<std::string> warnings = cfg.warnings;
    if (law.confidence == Confidence::NearCritical)
        warnings.push_back("|Psi(theta_bar)| = " + format_number(std::abs(pa.psi_bar)) +
                           " lies inside the warning band; the law may be misclassified");
    r["warnings"] = warnings;
    return r;
}

std::string cmd_series(const Config& cfg, std::size_t N) {
    const FreeProduct fp = FreeProduct::from_spec(cfg.product);
    const ProductAnalytics pa = analyze_product(fp);
    const PowerSeries c = product_green_series(fp, N);
    const PowerSeries scaled = product_green_series_scaled(fp, N, pa.radius);
    std::ostringstream os;
    os << "# rho=" << format_number(pa.radius) << "\n# period=" << pa.period << "\nn,mu_n,mu_n_rho_n\n";
    for (std::size_t n = 0; n <= N; ++n)
        os << n << ',' << format_number(c[n]) << ',' << format_number(scaled[n]) << '\n';
    return os.str();
}

PhaseDiagram cmd_phase(const Config& cfg, std::size_t grid) {
    if (cfg.product.factors.size() != 2)
        throw Error(ErrorCode::UnsupportedFactorCount,
                    "the phase diagram in alpha_1 is defined for two factors only, got " +
                        std::to_string(cfg.product.factors.size()));
    const FactorPair pair = FactorPair::from_specs(cfg.product.factors[0], cfg.product.factors[1]);
    PhaseOptions opt;
    opt.grid = grid;
    opt.classify = classify_options(cfg.options);
    return sweep(pair, opt);
}

json phase_to_json(const PhaseDiagram& pd) {
    json j;
    json g = json::array();
    for (const auto& p : pd.grid)
        g.push_back({{"alpha1", json_number(p.alpha1)},
                     {"upsilon", json_number(p.upsilon)},
                     {"law", p.law.label()},
                     {"kind", law_kind_name(p.law.kind)},
                     {"warning", p.warning}});
    j["grid"] = std::move(g);
    j["alpha_c"] = optional_number(pd.alpha_c);
    j["alpha_low"] = optional_number(pd.alpha_low);
    j["alpha_high"] = optional_number(pd.alpha_high);
    j["upsilon_0"] = json_number(pd.upsilon_0);
    j["upsilon_c"] = json_number(pd.upsilon_c);
    j["upsilon_1"] = json_number(pd.upsilon_1);
    j["case"] = std::string(1, pd.case_label);
    j["ambiguous"] = pd.ambiguous;
    json cand = json::array();
    for (char c : pd.candidates) cand.push_back(std::string(1, c));
    j["candidates"] = std::move(cand);
    j["degenerate"] = pd.degenerate;
    return j;
}

std::string phase_to_csv(const PhaseDiagram& pd) {
    std::ostringstream os;
    os << "# case=" << pd.case_label << "\nalpha1,upsilon,law,warning\n";
    for (const auto& p : pd.grid)
        os << format_number(p.alpha1) << ',' << format_number(p.upsilon) << ',' << p.law.label() << ','
           << (p.warning ? 1 : 0) << '\n';
    return os.str();
}

std::string cmd_simulate(const Config& cfg, std::size_t steps, std::uint64_t walks, std::uint64_t seed) {
    if (walks == 0) throw Error(ErrorCode::ConfigError, "walks must be positive");
    std::ostringstream os;
    os << "n,empirical,exact,z_score\n";
    if (steps == 0) return os.str();
    const FreeProduct fp = FreeProduct::from_spec(cfg.product);
    const PowerSeries exact = product_green_series(fp, steps);
    const ReturnProfile prof = simulate(cfg.product, steps, walks, seed);
    for (std::size_t n = 1; n <= steps; ++n) {
        const double emp = prof.frequency(n);
        const double p = exact[n];
        const double var = p * (1.0 - p) / static_cast<double>(walks);
        double z = 0.0;
        if (var > 0.0) z = (emp - p) / std::sqrt(var);
        else if (emp != p) z = std::numeric_limits<double>::infinity();
        os << n << ',' << format_number(emp) << ',' << format_number(p) << ',' << format_number(z) << '\n';
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random walks on free products: spectral radius, return laws and phase diagrams", "fprw"};
    app.require_subcommand(1);
    std::string config_path, out_path, format;
    std::optional<std::size_t> order, grid, steps;
    std::optional<std::uint64_t> walks, seed;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON description of the free product")->required();
        sub->add_option("--out", out_path, "write output here instead of stdout");
    };
    auto* analyze = app.add_subcommand("analyze", "JSON report: radius, Psi(theta_bar), law");
    common(analyze);
    analyze->add_option("--format", format)->check(CLI::IsMember({"json"}));
    auto* series = app.add_subcommand("series", "CSV of return probabilities");
    common(series);
    series->add_option("--order", order, "last n to print");
    series->add_option("--format", format)->check(CLI::IsMember({"csv"}));
    auto* phase = app.add_subcommand("phase", "phase diagram in alpha_1 (two factors)");
    common(phase);
    phase->add_option("--grid", grid, "number of logit-spaced grid points");
    phase->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    auto* sim = app.add_subcommand("simulate", "Monte Carlo return frequencies against the exact series");
    common(sim);
    sim->add_option("--steps", steps);
    sim->add_option("--walks", walks);
    sim->add_option("--seed", seed);
    sim->add_option("--format", format)->check(CLI::IsMember({"csv"}));
    app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    if (app.got_subcommand("selftest")) return selftest::run_all(out) ? 0 : 1;

    try {
        Config cfg = load_config(config_path);
        for (const auto& w : cfg.warnings) err << "warning: " << w << '\n';
        if (order) cfg.options.order = *order;
        if (grid) cfg.options.grid = *grid;
        if (steps) cfg.options.steps = *steps;
        if (walks) cfg.options.walks = *walks;
        if (seed) cfg.options.seed = *seed;

        std::string text;
        if (analyze->parsed()) {
            text = cmd_analyze(cfg).dump(2) + "\n";
        } else if (series->parsed()) {
            text = cmd_series(cfg, cfg.options.order);
        } else if (phase->parsed()) {
            if (cfg.options.grid < 3) throw Error(ErrorCode::ConfigError, "grid must be at least 3");
            const PhaseDiagram pd = cmd_phase(cfg, cfg.options.grid);
            text = format == "csv" ? phase_to_csv(pd) : phase_to_json(pd).dump(2) + "\n";
        } else {
            text = cmd_simulate(cfg, cfg.options.steps, cfg.options.walks, cfg.options.seed);
        }

        if (out_path.empty()) {
            out << text;
        } else {
            std::ofstream f(out_path);
            if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + out_path + "'");
            f << text;
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == ErrorCode::ConfigError) return 2;
        if (e.code() == ErrorCode::UnsupportedFactorCount) return 4;
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace fprw
