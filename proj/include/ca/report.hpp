#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ca {

struct ComparisonRow {
    double expiry = 0.0;
    double ca_analytic = 0.0;
    std::optional<double> ca_variant;
    double ca_mc = 0.0;
    double mc_se = 0.0;
    double abs_diff = 0.0;
    bool within_3se = false;
};

struct ReportMeta {
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::string model_hash_hex;
};

ComparisonRow make_row(double expiry, double ca_analytic, std::optional<double> ca_variant,
                       double ca_mc, double mc_se);

/// True when the row passes the figure-reproduction gate:
/// within 3 standard errors or within 5% relative of the MC value.
bool row_passes(const ComparisonRow& row);

std::string render_csv(const ReportMeta& meta, const std::vector<ComparisonRow>& rows);
std::string render_svg(const std::string& title, const std::vector<ComparisonRow>& rows);

/// Writes via a temp file plus rename, so failures leave no partial output.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ca
