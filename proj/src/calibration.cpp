// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gconvplan {

EnergyModelParams FitReport::params() const {
    EnergyModelParams p;
    p.beta = beta;
    p.scale_k = scale_k;
    return p;
}

namespace {

constexpr double kBetaMargin = 1e-9;

// Average ranks (ties share the mean rank).
std::vector<double> ranks_of(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

FitReport calibrate(const std::vector<MeasurementRecord>& records,
                    const std::map<std::string, CostBreakdown>& costs) {
    FitReport report;

    struct Point {
        const MeasurementRecord* record;
        double log_ratio;  // ln((A+P)/macs)
        double log_y;      // ln(EPF) - ln(macs)
        double log_macs;
        double log_footprint;
    };
    std::vector<Point> points;
    for (const auto& record : records) {
        const auto it = costs.find(record.config_id);
        if (it == costs.end()) {
            report.notes.push_back("dropped '" + record.config_id + "': no cost entry");
            continue;
        }
        if (!(record.epf_millijoule > 0.0)) {
            report.notes.push_back("dropped '" + record.config_id + "': non-positive EPF");
            continue;
        }
        const CostBreakdown& cost = it->second;
        if (cost.macs <= 0 || cost.footprint() <= 0) {
            report.notes.push_back("dropped '" + record.config_id + "': degenerate cost");
            continue;
        }
        Point p;
        p.record = &record;
        p.log_macs = std::log(static_cast<double>(cost.macs));
        p.log_footprint = std::log(static_cast<double>(cost.footprint()));
        p.log_ratio = p.log_footprint - p.log_macs;
        p.log_y = std::log(record.epf_millijoule) - p.log_macs;
        points.push_back(p);
    }

    if (points.size() < 3)
        throw CalibrationError("calibration needs at least 3 usable records, got " +
                               std::to_string(points.size()));

    // ln EPF = ln k + (1-beta) ln macs + beta ln(A+P)
    //        = ln k + ln macs + beta * ln((A+P)/macs)
    // which is an ordinary least-squares line in (log_ratio, log_y).
    const double n = static_cast<double>(points.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& p : points) {
        mean_x += p.log_ratio;
        mean_y += p.log_y;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.log_ratio - mean_x) * (p.log_ratio - mean_x);
        sxy += (p.log_ratio - mean_x) * (p.log_y - mean_y);
    }
    if (sxx <= 1e-12)
        throw CalibrationError(
            "degenerate design matrix: all configs share the same macs-to-footprint ratio");

    double beta = sxy / sxx;
    if (beta <= 0.0 || beta >= 1.0) {
        report.beta_clamped = true;
        const double clamped = std::clamp(beta, kBetaMargin, 1.0 - kBetaMargin);
        std::ostringstream note;
        note << "unconstrained beta " << beta << " outside (0,1); clamped to " << clamped;
        report.notes.push_back(note.str());
        report.notes.push_back(
            "a fixed-exponent proxy is monotone along a constant-group-count sweep, so it "
            "cannot follow a U-shaped EPF curve; treat the clamped fit as diagnostic only");
        beta = clamped;
    }
    // Intercept (refit when beta was clamped).
    double intercept = 0.0;
    for (const auto& p : points) intercept += p.log_y - beta * p.log_ratio;
    intercept /= n;

    report.beta = beta;
    report.scale_k = std::exp(intercept);

    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& p : points) {
        const double fitted = intercept + beta * p.log_ratio;
        ss_res += (p.log_y - fitted) * (p.log_y - fitted);
        ss_tot += (p.log_y - mean_y) * (p.log_y - mean_y);
    }
    if (ss_tot > 0.0)
        report.r_squared = 1.0 - ss_res / ss_tot;
    else
        report.r_squared = ss_res < 1e-15 ? 1.0 : 0.0;

    std::vector<double> measured, predicted;
    for (const auto& p : points) {
        FitResidual residual;
        residual.config_id = p.record->config_id;
        residual.device = p.record->device;
        residual.batch_size = p.record->batch_size;
        residual.measured_epf_mj = p.record->epf_millijoule;
        residual.predicted = report.scale_k * std::exp((1.0 - beta) * p.log_macs) *
                             std::exp(beta * p.log_footprint);
        residual.log_residual = std::log(residual.measured_epf_mj) - std::log(residual.predicted);
        report.residuals.push_back(residual);
        measured.push_back(residual.measured_epf_mj);
        predicted.push_back(residual.predicted);
    }
    report.spearman_rho = pearson(ranks_of(predicted), ranks_of(measured));

    report.notes.push_back(
        "scale_k absorbs the platform reuse factor: the fit identifies k*alpha^beta only");
    return report;
}

}  // namespace gconvplan
