#include "ca/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ca {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field, what);
}

const json& member(const json& j, const std::string& field, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(field);
    if (it == j.end()) fail(path + "." + field, "missing field");
    return *it;
}

double number(const json& j, const std::string& field, const std::string& path) {
    const json& v = member(j, field, path);
    if (!v.is_number()) fail(path + "." + field, "expected a number");
    return v.get<double>();
}

double number_or(const json& j, const std::string& field, const std::string& path, double dflt) {
    if (!j.is_object() || !j.contains(field)) return dflt;
    return number(j, field, path);
}

ModelConfig parse_model(const json& j) {
    ModelConfig m;
    if (j.contains("hull_white")) {
        const json& hw = j.at("hull_white");
        m.kind = ModelConfig::Kind::hull_white;
        m.sigma = number(hw, "sigma", "model.hull_white");
        m.k = number(hw, "k", "model.hull_white");
    } else if (j.contains("cheyette")) {
        const json& ch = j.at("cheyette");
        m.kind = ModelConfig::Kind::cheyette_tanh;
        m.sigma = number(ch, "sigma", "model.cheyette");
        m.k = number(ch, "k", "model.cheyette");
        m.c = number(ch, "c", "model.cheyette");
        if (!(std::abs(m.c) < 1.0)) fail("model.cheyette.c", "need |c| < 1");
    } else {
        fail("model", "expected a hull_white or cheyette block");
    }
    if (!(m.sigma >= 0.0)) fail("model.sigma", "need sigma >= 0");
    if (!(m.k >= 0.0)) fail("model.k", "need k >= 0");
    return m;
}

CurveSet parse_curve(const json& root) {
    const json& j = member(root, "curve", "config");
    CurveSet out;
    if (j.contains("flat_rate")) {
        out.ois = DiscountCurve::flat(number(j, "flat_rate", "curve"));
    } else if (j.contains("knots")) {
        const json& kn = j.at("knots");
        if (!kn.is_array() || kn.empty()) fail("curve.knots", "expected a nonempty array");
        std::vector<std::pair<double, double>> knots;
        for (const auto& e : kn) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                fail("curve.knots", "each knot must be [time, zero_rate]");
            knots.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        try {
            out.ois = DiscountCurve::from_knots(std::move(knots));
        } catch (const std::exception& e) {
            fail("curve.knots", e.what());
        }
    } else {
        fail("curve", "expected flat_rate or knots");
    }
    if (root.contains("basis")) {
        const json& b = root.at("basis");
        if (b.contains("constant")) {
            out.basis = BasisSpread(PiecewiseConstant(number(b, "constant", "basis")));
        } else if (b.contains("spread")) {
            const json& sp = b.at("spread");
            if (!sp.is_array() || sp.empty()) fail("basis.spread", "expected a nonempty array");
            std::vector<double> breaks, values;
            for (const auto& e : sp) {
                if (!e.is_array() || e.size() != 2) fail("basis.spread", "each entry is [tenor, spread]");
                breaks.push_back(e[0].get<double>());
                values.push_back(e[1].get<double>());
            }
            try {
                out.basis = BasisSpread(PiecewiseConstant(std::move(breaks), std::move(values)));
            } catch (const std::exception& e) {
                fail("basis.spread", e.what());
            }
        } else {
            fail("basis", "expected constant or spread");
        }
    }
    return out;
}

ProductConfig parse_product(const json& root) {
    const json& j = member(root, "product", "config");
    const json& type = member(j, "type", "product");
    if (!type.is_string()) fail("product.type", "expected a string");
    const std::string t = type.get<std::string>();
    ProductConfig p;
    if (t == "futures") {
        p.kind = ProductKind::futures;
        p.accrual = number_or(j, "accrual", "product", 0.25);
        if (!(p.accrual > 0.0)) fail("product.accrual", "need accrual > 0");
    } else if (t == "ois-future") {
        p.kind = ProductKind::ois_future;
        p.period = number_or(j, "period", "product", 0.25);
        if (!(p.period > 0.0)) fail("product.period", "need period > 0");
        const std::string mode =
            j.contains("mode") ? j.at("mode").get<std::string>() : "compounding";
        if (mode == "compounding")
            p.mode = OisMode::compounding;
        else if (mode == "average")
            p.mode = OisMode::average;
        else
            fail("product.mode", "expected compounding or average");
    } else if (t == "fra-arrears") {
        p.kind = ProductKind::fra_arrears;
        p.period = number_or(j, "period", "product", 0.5);
        if (!(p.period > 0.0)) fail("product.period", "need period > 0");
    } else if (t == "cms") {
        p.kind = ProductKind::cms;
        p.tenor = number_or(j, "tenor", "product", 5.0);
        p.funding_period = number_or(j, "funding_period", "product", 1.0);
        p.estimation_period = number_or(j, "estimation_period", "product", 1.0);
        p.payment_offset = number_or(j, "payment_offset", "product", 0.0);
        if (!(p.tenor > 0.0)) fail("product.tenor", "need tenor > 0");
        if (!(p.funding_period > 0.0 && p.estimation_period > 0.0))
            fail("product", "period lengths must be > 0");
    } else {
        fail("product.type", "unknown product type '" + t + "'");
    }
    return p;
}

McConfig parse_mc(const json& root) {
    McConfig mc;
    mc.paths = 100000;
    mc.steps_per_year = 24;
    mc.seed = 42;
    mc.antithetic = true;
    if (!root.contains("mc")) return mc;
    const json& j = root.at("mc");
    if (j.contains("paths")) mc.paths = j.at("paths").get<std::size_t>();
    if (j.contains("steps_per_year")) mc.steps_per_year = j.at("steps_per_year").get<int>();
    if (j.contains("seed")) mc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("antithetic")) mc.antithetic = j.at("antithetic").get<bool>();
    try {
        mc.validate();
    } catch (const std::exception& e) {
        fail("mc", e.what());
    }
    return mc;
}

}  // namespace

HullWhiteSpec ModelConfig::hull_white() const {
    if (kind != Kind::hull_white)
        throw std::logic_error("ModelConfig: no Hull-White closed form for this model");
    return HullWhiteSpec{sigma, k};
}

CheyetteSpec ModelConfig::build(CurveSet curve) const {
    // MeanReversion requires k > 0; the k = 0 limit is covered by the
    // closed forms only.
    const double k_eff = k > 0.0 ? k : 1e-12;
    if (kind == Kind::hull_white)
        return CheyetteSpec(MeanReversion(k_eff), Volatility::hull_white(sigma, k),
                            std::move(curve));
    return CheyetteSpec(MeanReversion(k_eff), Volatility::tanh_test(sigma, k, c),
                        std::move(curve));
}

ProductSpec ProductConfig::at_expiry(double expiry) const {
    switch (kind) {
        case ProductKind::futures:
            return Future{expiry, expiry, expiry + accrual};
        case ProductKind::ois_future:
            return OisFuture{expiry, expiry + period, mode};
        case ProductKind::fra_arrears:
            return FraInArrears{expiry, expiry + period};
        case ProductKind::cms: {
            const double tp =
                payment_offset > 0.0 ? expiry + payment_offset : expiry + funding_period;
            return Cms::from_schedule(SwapSchedule::uniform(expiry, expiry + tenor,
                                                            estimation_period, funding_period,
                                                            tp));
        }
    }
    throw std::logic_error("ProductConfig: unreachable");
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

ExperimentConfig parse_experiment(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("<document>", std::string("malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.model = parse_model(member(j, "model", "config"));
    cfg.curve = parse_curve(j);
    cfg.product = parse_product(j);
    cfg.mc = parse_mc(j);

    const json& grid = member(j, "grid", "config");
    if (!grid.is_array() || grid.empty()) fail("grid", "expected a nonempty array");
    for (const auto& e : grid) {
        if (!e.is_number()) fail("grid", "expected numbers");
        cfg.grid.push_back(e.get<double>());
    }
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (cfg.grid[i] <= 0.0) fail("grid", "expiries must be > 0");
        if (i > 0 && cfg.grid[i] <= cfg.grid[i - 1]) fail("grid", "expiries must be increasing");
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) fail("output", "expected a string");
        cfg.output_prefix = j.at("output").get<std::string>();
    }
    cfg.model_hash_hex = fnv1a_hex(j.dump());
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("<file>", "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

}  // namespace ca
