#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "ca/adjusters.hpp"
#include "ca/json_io.hpp"
#include "ca/mc.hpp"
#include "ca/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> out;
};

void apply(ca::ExperimentConfig& cfg, const Overrides& ov, const std::string& fallback_prefix) {
    if (ov.seed) cfg.mc.seed = *ov.seed;
    if (ov.paths) cfg.mc.paths = *ov.paths;
    if (ov.out) cfg.output_prefix = *ov.out;
    if (cfg.output_prefix.empty()) cfg.output_prefix = fallback_prefix;
}

ca::CaResult analytic_for(const ca::CheyetteSpec& spec, const ca::ProductSpec& product) {
    return std::visit(
        [&](const auto& p) -> ca::CaResult {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ca::Future>) return ca::ca_future(spec, p);
            if constexpr (std::is_same_v<T, ca::OisFuture>) return ca::ca_ois_future(spec, p);
            if constexpr (std::is_same_v<T, ca::FraInArrears>) return ca::ca_fra_arrears(spec, p);
            if constexpr (std::is_same_v<T, ca::Cms>) return ca::ca_cms(spec, p);
        },
        product);
}

ca::McEstimate mc_for(const ca::CheyetteSpec& spec, const ca::McConfig& mc,
                      const ca::ProductSpec& product) {
    return std::visit(
        [&](const auto& p) -> ca::McEstimate {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ca::Future>) return ca::mc_future_rate(spec, mc, p);
            if constexpr (std::is_same_v<T, ca::OisFuture>) return ca::mc_ois_future(spec, mc, p);
            if constexpr (std::is_same_v<T, ca::FraInArrears>)
                return ca::mc_fra_arrears(spec, mc, p);
            if constexpr (std::is_same_v<T, ca::Cms>) return ca::mc_cms(spec, mc, p);
        },
        product);
}

const char* product_name(ca::ProductKind kind) {
    switch (kind) {
        case ca::ProductKind::futures: return "futures";
        case ca::ProductKind::ois_future: return "ois-future";
        case ca::ProductKind::fra_arrears: return "fra-arrears";
        case ca::ProductKind::cms: return "cms";
    }
    return "?";
}

int run_product(const std::string& config_path, const Overrides& ov, ca::ProductKind kind) {
    ca::ExperimentConfig cfg = ca::load_experiment(config_path);
    if (cfg.product.kind != kind)
        throw ca::ConfigError("product.type", std::string("config is for '") +
                                                  product_name(cfg.product.kind) +
                                                  "', subcommand expects '" +
                                                  product_name(kind) + "'");
    apply(cfg, ov, product_name(kind));

    const ca::CheyetteSpec spec = cfg.model.build(cfg.curve);
    std::vector<ca::ComparisonRow> rows;
    rows.reserve(cfg.grid.size());
    for (double expiry : cfg.grid) {
        const ca::ProductSpec product = cfg.product.at_expiry(expiry);
        const ca::CaResult analytic = analytic_for(spec, product);
        const ca::McEstimate mc = mc_for(spec, cfg.mc, product);
        rows.push_back(ca::make_row(expiry, analytic.adjustment, analytic.variant_adjustment,
                                    mc.mean - analytic.base_rate, mc.std_error));
    }

    ca::ReportMeta meta{cfg.mc.seed, cfg.mc.paths, cfg.model_hash_hex};
    const std::string csv = ca::render_csv(meta, rows);
    const std::string svg = ca::render_svg(std::string(product_name(kind)) +
                                               ": analytic vs Monte Carlo convexity adjustment",
                                           rows);
    ca::write_file_atomic(cfg.output_prefix + ".csv", csv);
    ca::write_file_atomic(cfg.output_prefix + ".svg", svg);

    std::cout << csv;
    bool all_pass = true;
    for (const auto& row : rows) all_pass = all_pass && ca::row_passes(row);
    std::cout << (all_pass ? "PASS" : "FAIL") << ": " << rows.size() << " expiries, output "
              << cfg.output_prefix << ".csv / .svg\n";
    return all_pass ? kExitOk : kExitTolerance;
}

int run_diagnostics(const std::string& config_path, const Overrides& ov) {
    ca::ExperimentConfig cfg = ca::load_experiment(config_path);
    apply(cfg, ov, "diagnostics");
    const ca::CheyetteSpec spec = cfg.model.build(cfg.curve);

    std::ostringstream out;
    out << "# seed=" << cfg.mc.seed << " paths=" << cfg.mc.paths
        << " model_hash=" << cfg.model_hash_hex << "\n";
    out << "check,arg,value,std_error,z,pass\n";
    bool all_pass = true;
    for (double t : {1.0, 5.0, 10.0}) {
        const ca::McEstimate est = ca::mc_numeraire_check(spec, cfg.mc, t);
        const double z = (est.mean - 1.0) / est.std_error;
        const bool pass = std::abs(z) < 3.0;
        all_pass = all_pass && pass;
        out << "martingale," << t << ',' << est.mean << ',' << est.std_error << ',' << z << ','
            << (pass ? "true" : "false") << "\n";
    }
    for (double t : {0.1, 0.2, 0.4, 1.0, 5.0, 30.0}) {
        const ca::McEstimate est = ca::state_approx_error(spec, cfg.mc, t);
        out << "state_approx_error," << t << ',' << est.mean << ',' << est.std_error << ",,true\n";
    }
    ca::write_file_atomic(cfg.output_prefix + ".csv", out.str());
    std::cout << out.str();
    std::cout << (all_pass ? "PASS" : "FAIL") << ": output " << cfg.output_prefix << ".csv\n";
    return all_pass ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convexity-adjustment engine: analytic approximations vs Monte Carlo"};
    app.require_subcommand(1);

    struct SubState {
        std::string config;
        Overrides ov;
        std::uint64_t seed = 0;
        std::size_t paths = 0;
        std::string out;
    };
    std::vector<std::pair<CLI::App*, SubState>> subs;
    subs.reserve(5);
    auto add_sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        subs.emplace_back(sub, SubState{});
        SubState& st = subs.back().second;
        sub->add_option("--config", st.config, "JSON experiment config")->required();
        sub->add_option("--seed", st.seed, "override the Monte Carlo seed");
        sub->add_option("--paths", st.paths, "override the Monte Carlo path count");
        sub->add_option("--out", st.out, "override the output file prefix");
        return sub;
    };
    add_sub("futures", "futures convexity vs MC");
    add_sub("ois-future", "OIS futures convexity vs MC");
    add_sub("fra-arrears", "FRA-in-arrears convexity vs MC");
    add_sub("cms", "CMS convexity vs MC");
    add_sub("diagnostics", "martingale and state-approximation diagnostics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        for (auto& [sub, st] : subs) {
            if (!sub->parsed()) continue;
            // CLI11 reports how many times each flag was given; zero means
            // keep the config value.
            if (sub->count("--seed") > 0) st.ov.seed = st.seed;
            if (sub->count("--paths") > 0) st.ov.paths = st.paths;
            if (sub->count("--out") > 0) st.ov.out = st.out;
            const std::string name = sub->get_name();
            if (name == "futures") return run_product(st.config, st.ov, ca::ProductKind::futures);
            if (name == "ois-future")
                return run_product(st.config, st.ov, ca::ProductKind::ois_future);
            if (name == "fra-arrears")
                return run_product(st.config, st.ov, ca::ProductKind::fra_arrears);
            if (name == "cms") return run_product(st.config, st.ov, ca::ProductKind::cms);
            if (name == "diagnostics") return run_diagnostics(st.config, st.ov);
        }
        std::cerr << app.help();
        return kExitUsage;
    } catch (const ca::ConfigError& e) {
        std::cerr << "config error at " << e.field() << ": " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
