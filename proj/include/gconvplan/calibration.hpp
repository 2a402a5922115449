// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gconvplan/cost.hpp"
#include "gconvplan/planner.hpp"

namespace gconvplan {

/// One measured energy-per-frame observation.
struct MeasurementRecord {
    std::string config_id;  // e.g. "mobilenet_v1/e2gc/G=8"
    int batch_size = 1;
    std::string device;
    double epf_millijoule = 0.0;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitResidual {
    std::string config_id;
    std::string device;
    int batch_size = 1;
    double measured_epf_mj = 0.0;
    double predicted = 0.0;
    double log_residual = 0.0;  // ln(measured) - ln(predicted)
};

struct FitReport {
    double beta = 0.5;
    double scale_k = 1.0;
    bool beta_clamped = false;
    double r_squared = 0.0;     // in the log domain of the fit
    double spearman_rho = 0.0;  // rank correlation, predicted vs measured
    std::vector<FitResidual> residuals;
    std::vector<std::string> notes;

    EnergyModelParams params() const;
};

/// Fit (beta, scale_k) of the energy proxy to measured EPF data by linear
/// least squares in the log domain:
///
///   min over (ln k, beta) of
///     sum ( ln EPF - ln k - (1-beta) ln macs - beta ln(activations+params) )^2
///
/// beta is clamped into (0,1) (with a report flag and intercept refit) when
/// the unconstrained optimum falls outside. Needs at least 3 usable records
/// over at least 2 distinct cost ratios; otherwise throws CalibrationError.
/// Records whose config_id has no cost entry or whose EPF is not positive
/// are dropped with a note.
FitReport calibrate(const std::vector<MeasurementRecord>& records,
                    const std::map<std::string, CostBreakdown>& costs);

}  // namespace gconvplan
