// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gconvplan/calibration.hpp"
#include "gconvplan/cost.hpp"

namespace gconvplan {

/// One line of a cost report. CSV columns are fixed as
///   config_id, strategy, layer_id, mc, params, activations, ai,
///   energy_proxy, epf_measured_mj
/// with counts printed as exact integers, floats with 6 significant digits
/// and optional fields left empty.
struct ReportRow {
    std::string config_id;
    std::string strategy;
    std::string layer_id;  // "TOTAL" for aggregate rows
    std::int64_t macs = 0;
    std::int64_t params = 0;
    std::int64_t activations = 0;
    double arithmetic_intensity = 0.0;
    std::optional<double> energy_proxy;
    std::optional<double> epf_measured_mj;
};

/// Fixed-format float printing: 6 significant digits.
std::string format_sig6(double value);

std::string report_to_csv(const std::vector<ReportRow>& rows,
                          const std::vector<std::string>& header_comments = {});
std::vector<ReportRow> report_from_csv(const std::string& text);
std::string report_to_json_text(const std::vector<ReportRow>& rows,
                                const std::vector<std::string>& notes = {});

/// One row of the group-size sweep. All three series are normalized to the
/// depthwise point (group size 1); normalized memory access is defined as
/// the reciprocal of normalized intensity.
struct SweepRow {
    int group_size = 1;  // G = in_channels / groups
    double macs_normalized = 1.0;
    double intensity_normalized = 1.0;
    double mem_access_normalized = 1.0;
};

/// Sweep a single layer shape over every divisor group size of in_channels.
std::vector<SweepRow> group_size_sweep(int out_channels, int in_channels, int kernel, int out_h,
                                       int out_w);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json_text(const std::vector<SweepRow>& rows);

/// Measurement CSV: header "config_id,batch_size,device,epf_millijoule"
/// required; '#' lines are comments. Throws ParseError on malformed input.
std::vector<MeasurementRecord> measurements_from_csv(const std::string& text);
std::vector<MeasurementRecord> parse_measurement_csv(const std::filesystem::path& path);
std::string measurements_to_csv(const std::vector<MeasurementRecord>& records,
                                const std::vector<std::string>& header_comments = {});

std::string fit_report_to_json_text(const FitReport& report);
std::string fit_report_to_csv(const FitReport& report,
                              const std::map<std::string, CostBreakdown>& costs);

}  // namespace gconvplan
