#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ca/adjusters.hpp"
#include "ca/mc.hpp"
#include "ca/model.hpp"

namespace ca {

/// Config rejection carrying the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ModelConfig {
    enum class Kind { hull_white, cheyette_tanh };
    Kind kind = Kind::hull_white;
    double sigma = 0.0;
    double k = 0.0;
    double c = 0.0;  // tanh mixing coefficient

    bool closed_form_available() const { return kind == Kind::hull_white; }
    HullWhiteSpec hull_white() const;
    CheyetteSpec build(CurveSet curve) const;
};

enum class ProductKind { futures, ois_future, fra_arrears, cms };

/// Product family evaluated over an expiry grid; at_expiry instantiates the
/// concrete product for one grid point.
struct ProductConfig {
    ProductKind kind = ProductKind::futures;
    double accrual = 0.25;            // futures: t2 - t1
    double period = 0.25;             // OIS / FRA period length
    OisMode mode = OisMode::compounding;
    double tenor = 5.0;               // CMS underlying length
    double funding_period = 1.0;      // CMS annuity leg period
    double estimation_period = 1.0;   // CMS floating leg period
    double payment_offset = 0.0;      // CMS: tp - ta; 0 means first funding date

    ProductSpec at_expiry(double expiry) const;
};

struct ExperimentConfig {
    ModelConfig model;
    CurveSet curve;
    ProductConfig product;
    std::vector<double> grid;
    McConfig mc;
    std::string output_prefix;
    std::string model_hash_hex;  // FNV-1a of the canonical config text
};

ExperimentConfig parse_experiment(const std::string& json_text);

/// Reads and parses a config file; all failures surface as ConfigError.
ExperimentConfig load_experiment(const std::string& path);

std::string fnv1a_hex(const std::string& text);

}  // namespace ca
