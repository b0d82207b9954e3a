#include "ca/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ca {

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

}  // namespace

ComparisonRow make_row(double expiry, double ca_analytic, std::optional<double> ca_variant,
                       double ca_mc, double mc_se) {
    ComparisonRow row;
    row.expiry = expiry;
    row.ca_analytic = ca_analytic;
    row.ca_variant = ca_variant;
    row.ca_mc = ca_mc;
    row.mc_se = mc_se;
    row.abs_diff = std::abs(ca_analytic - ca_mc);
    row.within_3se = row.abs_diff <= 3.0 * mc_se;
    return row;
}

bool row_passes(const ComparisonRow& row) {
    // the absolute floor keeps zero-volatility rows (SE exactly 0, both
    // adjustments at rounding level) from tripping the relative gate
    return row.within_3se || row.abs_diff <= 0.05 * std::abs(row.ca_mc) || row.abs_diff <= 1e-12;
}

std::string render_csv(const ReportMeta& meta, const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << "# seed=" << meta.seed << " paths=" << meta.paths
        << " model_hash=" << meta.model_hash_hex << "\n";
    out << "expiry,ca_analytic,ca_variant,ca_mc,mc_se,abs_diff,within_3se\n";
    for (const auto& r : rows) {
        out << fmt(r.expiry) << ',' << fmt(r.ca_analytic) << ','
            << (r.ca_variant ? fmt(*r.ca_variant) : std::string()) << ',' << fmt(r.ca_mc) << ','
            << fmt(r.mc_se) << ',' << fmt(r.abs_diff) << ',' << (r.within_3se ? "true" : "false")
            << "\n";
    }
    return out.str();
}

std::string render_svg(const std::string& title, const std::vector<ComparisonRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("render_svg: no rows");
    const double width = 900.0, height = 540.0;
    const double ml = 90.0, mr = 30.0, mt = 50.0, mb = 60.0;

    double x_min = rows.front().expiry, x_max = rows.back().expiry;
    if (x_max <= x_min) x_max = x_min + 1.0;
    double y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const auto& r : rows) {
        const double lo = std::min({r.ca_analytic, r.ca_mc - 3.0 * r.mc_se,
                                    r.ca_variant ? *r.ca_variant : r.ca_analytic});
        const double hi = std::max({r.ca_analytic, r.ca_mc + 3.0 * r.mc_se,
                                    r.ca_variant ? *r.ca_variant : r.ca_analytic});
        y_min = first ? lo : std::min(y_min, lo);
        y_max = first ? hi : std::max(y_max, hi);
        first = false;
    }
    if (y_max <= y_min) y_max = y_min + 1e-12;
    const double pad = 0.08 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };
    auto poly = [&](auto value_of) {
        std::ostringstream pts;
        for (const auto& r : rows) pts << sx(r.expiry) << ',' << sy(value_of(r)) << ' ';
        return pts.str();
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 900 540\">\n";
    out << "<rect width=\"900\" height=\"540\" fill=\"white\"/>\n";
    out << "<text x=\"450\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"18\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        const double yp = sy(yv);
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << yp << "\" x2=\"" << ml << "\" y2=\"" << yp
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << yp + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << std::setprecision(4) << yv << "</text>\n";
    }
    for (const auto& r : rows) {
        const double xp = sx(r.expiry);
        out << "<line x1=\"" << xp << "\" y1=\"" << height - mb << "\" x2=\"" << xp << "\" y2=\""
            << height - mb + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << xp << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << std::setprecision(4) << r.expiry << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">expiry "
           "(years)</text>\n";

    // 3 SE error bars around the MC series
    for (const auto& r : rows) {
        const double xp = sx(r.expiry);
        out << "<line x1=\"" << xp << "\" y1=\"" << sy(r.ca_mc - 3.0 * r.mc_se) << "\" x2=\"" << xp
            << "\" y2=\"" << sy(r.ca_mc + 3.0 * r.mc_se)
            << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\""
        << poly([](const ComparisonRow& r) { return r.ca_analytic; }) << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\" "
           "points=\""
        << poly([](const ComparisonRow& r) { return r.ca_mc; }) << "\"/>\n";
    if (rows.front().ca_variant) {
        out << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\" "
               "stroke-dasharray=\"2 3\" points=\""
            << poly([](const ComparisonRow& r) {
                   return r.ca_variant ? *r.ca_variant : r.ca_analytic;
               })
            << "\"/>\n";
    }
    // legend
    out << "<rect x=\"" << width - 260 << "\" y=\"" << mt + 6
        << "\" width=\"225\" height=\"64\" fill=\"white\" stroke=\"#cccccc\"/>\n";
    const double lx = width - 250;
    out << "<line x1=\"" << lx << "\" y1=\"" << mt + 24 << "\" x2=\"" << lx + 30 << "\" y2=\""
        << mt + 24 << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>"
        << "<text x=\"" << lx + 38 << "\" y=\"" << mt + 28
        << "\" font-family=\"sans-serif\" font-size=\"12\">analytic</text>\n";
    out << "<line x1=\"" << lx << "\" y1=\"" << mt + 44 << "\" x2=\"" << lx + 30 << "\" y2=\""
        << mt + 44 << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>"
        << "<text x=\"" << lx + 38 << "\" y=\"" << mt + 48
        << "\" font-family=\"sans-serif\" font-size=\"12\">MC (3 SE bars)</text>\n";
    if (rows.front().ca_variant) {
        out << "<line x1=\"" << lx << "\" y1=\"" << mt + 62 << "\" x2=\"" << lx + 30 << "\" y2=\""
            << mt + 62 << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"2 3\"/>"
            << "<text x=\"" << lx + 38 << "\" y=\"" << mt + 66
            << "\" font-family=\"sans-serif\" font-size=\"12\">analytic variant</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace ca
