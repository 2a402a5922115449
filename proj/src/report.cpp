// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gconvplan/json_io.hpp"

namespace gconvplan {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

std::int64_t parse_count(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const std::int64_t value = std::stoll(text, &pos);
        if (pos != text.size() || value < 0) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError("invalid " + what + ": '" + text + "'");
    }
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ParseError("invalid " + what + ": '" + text + "'");
    }
}

constexpr const char* kReportHeader =
    "config_id,strategy,layer_id,mc,params,activations,ai,energy_proxy,epf_measured_mj";
constexpr const char* kMeasurementHeader = "config_id,batch_size,device,epf_millijoule";

}  // namespace

std::string format_sig6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

std::string report_to_csv(const std::vector<ReportRow>& rows,
                          const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    out << kReportHeader << "\n";
    for (const auto& row : rows) {
        out << row.config_id << ',' << row.strategy << ',' << row.layer_id << ',' << row.macs
            << ',' << row.params << ',' << row.activations << ','
            << format_sig6(row.arithmetic_intensity) << ',';
        if (row.energy_proxy) out << format_sig6(*row.energy_proxy);
        out << ',';
        if (row.epf_measured_mj) out << format_sig6(*row.epf_measured_mj);
        out << '\n';
    }
    return out.str();
}

std::vector<ReportRow> report_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<ReportRow> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (split_csv_line(line) != split_csv_line(kReportHeader))
                throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                                 kReportHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 9)
            throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                             std::to_string(fields.size()));
        ReportRow row;
        row.config_id = fields[0];
        row.strategy = fields[1];
        row.layer_id = fields[2];
        row.macs = parse_count(fields[3], "mc");
        row.params = parse_count(fields[4], "params");
        row.activations = parse_count(fields[5], "activations");
        row.arithmetic_intensity = parse_real(fields[6], "ai");
        if (!fields[7].empty()) row.energy_proxy = parse_real(fields[7], "energy_proxy");
        if (!fields[8].empty()) row.epf_measured_mj = parse_real(fields[8], "epf_measured_mj");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError("missing report header row");
    return rows;
}

std::string report_to_json_text(const std::vector<ReportRow>& rows,
                                const std::vector<std::string>& notes) {
    ordered_json doc;
    doc["rows"] = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r;
        r["config_id"] = row.config_id;
        r["strategy"] = row.strategy;
        r["layer_id"] = row.layer_id;
        r["mc"] = row.macs;
        r["params"] = row.params;
        r["activations"] = row.activations;
        r["ai"] = row.arithmetic_intensity;
        if (row.energy_proxy)
            r["energy_proxy"] = *row.energy_proxy;
        else
            r["energy_proxy"] = nullptr;
        if (row.epf_measured_mj)
            r["epf_measured_mj"] = *row.epf_measured_mj;
        else
            r["epf_measured_mj"] = nullptr;
        doc["rows"].push_back(std::move(r));
    }
    if (!notes.empty()) doc["notes"] = notes;
    return doc.dump(2) + "\n";
}

std::vector<SweepRow> group_size_sweep(int out_channels, int in_channels, int kernel, int out_h,
                                       int out_w) {
    if (in_channels < 1 || out_channels < 1 || kernel < 1 || out_h < 1 || out_w < 1)
        throw std::invalid_argument("sweep dimensions must be >= 1");

    LayerSpec layer;
    layer.id = "sweep";
    layer.in_channels = in_channels;
    layer.out_channels = out_channels;
    layer.kernel_h = layer.kernel_w = kernel;
    layer.out_h = out_h;
    layer.out_w = out_w;

    // Depthwise anchor: group size 1, i.e. groups = in_channels.
    layer.groups = in_channels;
    const CostBreakdown anchor = layer_cost(layer);

    std::vector<SweepRow> rows;
    for (int group_size = 1; group_size <= in_channels; ++group_size) {
        if (in_channels % group_size != 0) continue;
        const int groups = in_channels / group_size;
        if (out_channels % groups != 0) continue;
        layer.groups = groups;
        const CostBreakdown cost = layer_cost(layer);
        SweepRow row;
        row.group_size = group_size;
        row.macs_normalized = static_cast<double>(cost.macs) / static_cast<double>(anchor.macs);
        row.intensity_normalized = cost.arithmetic_intensity / anchor.arithmetic_intensity;
        row.mem_access_normalized = 1.0 / row.intensity_normalized;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "G,mc_normalized,ai_normalized,mem_access_normalized\n";
    for (const auto& row : rows) {
        out << row.group_size << ',' << format_sig6(row.macs_normalized) << ','
            << format_sig6(row.intensity_normalized) << ','
            << format_sig6(row.mem_access_normalized) << '\n';
    }
    return out.str();
}

std::string sweep_to_json_text(const std::vector<SweepRow>& rows) {
    ordered_json doc;
    doc["rows"] = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r;
        r["G"] = row.group_size;
        r["mc_normalized"] = row.macs_normalized;
        r["ai_normalized"] = row.intensity_normalized;
        r["mem_access_normalized"] = row.mem_access_normalized;
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

std::vector<MeasurementRecord> measurements_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<MeasurementRecord> records;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (split_csv_line(line) != split_csv_line(kMeasurementHeader))
                throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                                 kMeasurementHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        MeasurementRecord record;
        record.config_id = fields[0];
        record.batch_size = static_cast<int>(parse_count(fields[1], "batch_size"));
        if (record.batch_size < 1)
            throw ParseError("line " + std::to_string(line_no) + ": batch_size must be >= 1");
        record.device = fields[2];
        record.epf_millijoule = parse_real(fields[3], "epf_millijoule");
        records.push_back(std::move(record));
    }
    if (!header_seen) throw ParseError("missing measurement header row");
    return records;
}

std::vector<MeasurementRecord> parse_measurement_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return measurements_from_csv(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string measurements_to_csv(const std::vector<MeasurementRecord>& records,
                                const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    out << kMeasurementHeader << "\n";
    for (const auto& record : records) {
        out << record.config_id << ',' << record.batch_size << ',' << record.device << ','
            << format_sig6(record.epf_millijoule) << '\n';
    }
    return out.str();
}

std::string fit_report_to_json_text(const FitReport& report) {
    ordered_json doc;
    doc["beta"] = report.beta;
    doc["scale_k"] = report.scale_k;
    doc["beta_clamped"] = report.beta_clamped;
    doc["r_squared"] = report.r_squared;
    doc["spearman_rho"] = report.spearman_rho;
    doc["residuals"] = ordered_json::array();
    for (const auto& residual : report.residuals) {
        ordered_json r;
        r["config_id"] = residual.config_id;
        r["device"] = residual.device;
        r["batch_size"] = residual.batch_size;
        r["epf_measured_mj"] = residual.measured_epf_mj;
        r["predicted"] = residual.predicted;
        r["log_residual"] = residual.log_residual;
        doc["residuals"].push_back(std::move(r));
    }
    doc["notes"] = report.notes;
    return doc.dump(2) + "\n";
}

std::string fit_report_to_csv(const FitReport& report,
                              const std::map<std::string, CostBreakdown>& costs) {
    std::vector<std::string> comments;
    comments.push_back("beta=" + format_sig6(report.beta) +
                       " scale_k=" + format_sig6(report.scale_k) +
                       " beta_clamped=" + (report.beta_clamped ? "true" : "false"));
    comments.push_back("r_squared=" + format_sig6(report.r_squared) +
                       " spearman_rho=" + format_sig6(report.spearman_rho));
    for (const auto& note : report.notes) comments.push_back(note);

    std::vector<ReportRow> rows;
    for (const auto& residual : report.residuals) {
        ReportRow row;
        row.config_id = residual.config_id;
        const auto slash = residual.config_id.find('/');
        row.strategy = "baseline";
        if (slash != std::string::npos) {
            try {
                row.strategy =
                    GroupingStrategy::parse_config_suffix(residual.config_id.substr(slash + 1))
                        .flag_label();
            } catch (const std::invalid_argument&) {
                row.strategy = residual.config_id.substr(slash + 1);
            }
        }
        row.layer_id = "TOTAL";
        if (const auto it = costs.find(residual.config_id); it != costs.end()) {
            row.macs = it->second.macs;
            row.params = it->second.params;
            row.activations = it->second.activations;
            row.arithmetic_intensity = it->second.arithmetic_intensity;
        }
        row.energy_proxy = residual.predicted;
        row.epf_measured_mj = residual.measured_epf_mj;
        rows.push_back(std::move(row));
    }
    return report_to_csv(rows, comments);
}

}  // namespace gconvplan
