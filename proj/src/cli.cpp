// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gconvplan/blueprints.hpp"
#include "gconvplan/calibration.hpp"
#include "gconvplan/cost.hpp"
#include "gconvplan/json_io.hpp"
#include "gconvplan/planner.hpp"
#include "gconvplan/report.hpp"
#include "gconvplan/verify.hpp"

namespace gconvplan::cli {

namespace {

constexpr std::uint64_t kDefaultVerifySeed = 20250813;

// Errors in flag grammar (as opposed to the referenced data) exit with the
// usage code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GroupingStrategy parse_strategy_flag(const std::string& text) {
    try {
        return GroupingStrategy::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

struct OutputOptions {
    std::string format = "csv";
    std::string out_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts, const std::string& default_format) {
    opts.format = default_format;
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opts.out_path, "Write output to a file instead of stdout");
}

void write_output(const std::string& text, const OutputOptions& opts, std::ostream& out) {
    if (opts.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(opts.out_path);
    if (!file) throw ParseError("cannot open file for writing: " + opts.out_path);
    file << text;
}

// A --net value is either a built-in blueprint name or a path to a network
// JSON file.
NetworkSpec load_network(const std::string& net_arg) {
    if (net_arg == "mobilenet_v1" || net_arg == "resnext50_32x4d") {
        BlueprintId id;
        id.name = blueprint_name_from_string(net_arg);
        return generate(id);
    }
    if (std::filesystem::exists(net_arg)) return parse_network_json(net_arg);
    throw ParseError("--net '" + net_arg +
                     "' is neither a built-in blueprint (mobilenet_v1, resnext50_32x4d) nor an "
                     "existing file");
}

std::vector<ReportRow> cost_rows(const NetworkSpec& net, const std::string& strategy_label,
                                 const EnergyModelParams& proxy_params, bool totals_only) {
    const NetworkCost cost = network_cost(net);
    std::vector<ReportRow> rows;
    double total_proxy = 0.0;
    for (const auto& [layer_id, layer] : cost.per_layer) {
        const double proxy = energy_proxy(layer, proxy_params);
        total_proxy += proxy;
        if (totals_only) continue;
        ReportRow row;
        row.config_id = net.name;
        row.strategy = strategy_label;
        row.layer_id = layer_id;
        row.macs = layer.macs;
        row.params = layer.params;
        row.activations = layer.activations;
        row.arithmetic_intensity = layer.arithmetic_intensity;
        row.energy_proxy = proxy;
        rows.push_back(std::move(row));
    }
    ReportRow total;
    total.config_id = net.name;
    total.strategy = strategy_label;
    total.layer_id = "TOTAL";
    total.macs = cost.total.macs;
    total.params = cost.total.params;
    total.activations = cost.total.activations;
    total.arithmetic_intensity = cost.total.arithmetic_intensity;
    total.energy_proxy = total_proxy;  // network proxy: sum of per-layer proxies
    rows.push_back(std::move(total));
    return rows;
}

const std::vector<std::string> kReportNotes = {
    "built-in blueprints declare conv layers without bias or batch-norm, so params count "
    "conv/fc weights plus the classifier bias; declared bias/batch-norm fields do count",
    "network energy_proxy is the sum of per-layer proxies",
};

int run_analyze(const std::string& net_arg, const std::string& strategy_arg, double beta,
                double scale_k, bool totals_only, const OutputOptions& opts, std::ostream& out) {
    NetworkSpec net = load_network(net_arg);
    std::string label = "baseline";
    if (!strategy_arg.empty()) {
        const GroupingStrategy strategy = parse_strategy_flag(strategy_arg);
        net = plan(net, strategy);
        label = strategy.flag_label();
    }
    EnergyModelParams proxy_params;
    proxy_params.beta = beta;
    proxy_params.scale_k = scale_k;
    const auto rows = cost_rows(net, label, proxy_params, totals_only);
    write_output(opts.format == "json" ? report_to_json_text(rows, kReportNotes)
                                       : report_to_csv(rows, kReportNotes),
                 opts, out);
    return exit_ok;
}

int run_tables(const std::string& net_arg, const OutputOptions& opts, std::ostream& out) {
    BlueprintId id;
    id.name = blueprint_name_from_string(net_arg);
    std::vector<ReportRow> rows;
    for (const VariantRow& variant : variant_table(id)) {
        ReportRow row;
        row.config_id = to_string(id.name) + "/" + variant.strategy.config_suffix();
        row.strategy = variant.strategy.flag_label();
        row.layer_id = "TOTAL";
        row.macs = variant.total.macs;
        row.params = variant.total.params;
        row.activations = variant.total.activations;
        row.arithmetic_intensity = variant.total.arithmetic_intensity;
        rows.push_back(std::move(row));
    }
    write_output(opts.format == "json" ? report_to_json_text(rows, kReportNotes)
                                       : report_to_csv(rows, kReportNotes),
                 opts, out);
    return exit_ok;
}

int run_transform(const std::string& net_arg, const std::string& strategy_arg,
                  const OutputOptions& opts, std::ostream& out) {
    const GroupingStrategy strategy = parse_strategy_flag(strategy_arg);
    const NetworkSpec rewritten = plan(load_network(net_arg), strategy);
    write_output(network_to_json_text(rewritten), opts, out);
    return exit_ok;
}

int run_optimize(const std::string& net_arg, double beta, std::optional<double> gamma,
                 std::optional<int> target_group_size, const OutputOptions& opts,
                 std::ostream& out) {
    const NetworkSpec net = load_network(net_arg);
    if (auto diags = validate(net); !diags.empty()) throw ValidationError(std::move(diags));
    if (net.substitution_sites.empty())
        throw ValidationError({{net.name, "network has no substitution sites to optimize"}});

    EnergyModelParams params;
    params.beta = beta;
    if (gamma) {
        params.gamma = *gamma;
    } else {
        // Derive the balance level from the first substitution site so that
        // its continuous solution lands on the requested group size.
        const LayerSpec* first = net.find_layer(net.substitution_sites.front().first);
        params.target_group_size = *target_group_size;
        params.gamma = 1.0;
        const double g_star = balanced_groups(*first, params);
        params.gamma = g_star * *target_group_size / first->in_channels;
    }

    std::ostringstream csv;
    nlohmann::ordered_json doc;
    doc["beta"] = params.beta;
    doc["gamma"] = params.gamma;
    doc["rows"] = nlohmann::ordered_json::array();
    csv << "# beta=" << format_sig6(params.beta) << " gamma=" << format_sig6(params.gamma) << "\n";
    csv << "layer_id,in_channels,g_star,g_rounded,group_size_star,group_size_rounded\n";
    for (const BalancePoint& point : balance_profile(net, params)) {
        const LayerSpec* layer = net.find_layer(point.layer_id);
        const int rounded = round_to_valid(point.g_star, layer->in_channels, layer->out_channels);
        csv << point.layer_id << ',' << layer->in_channels << ',' << format_sig6(point.g_star)
            << ',' << rounded << ',' << format_sig6(point.group_size_star) << ','
            << layer->in_channels / rounded << '\n';
        nlohmann::ordered_json row;
        row["layer_id"] = point.layer_id;
        row["in_channels"] = layer->in_channels;
        row["g_star"] = point.g_star;
        row["g_rounded"] = rounded;
        row["group_size_star"] = point.group_size_star;
        row["group_size_rounded"] = layer->in_channels / rounded;
        doc["rows"].push_back(std::move(row));
    }
    write_output(opts.format == "json" ? doc.dump(2) + "\n" : csv.str(), opts, out);
    return exit_ok;
}

int run_sweep(int out_c, int in_c, int kernel, int h, int w, const OutputOptions& opts,
              std::ostream& out) {
    const auto rows = group_size_sweep(out_c, in_c, kernel, h, w);
    write_output(opts.format == "json" ? sweep_to_json_text(rows) : sweep_to_csv(rows), opts, out);
    return exit_ok;
}

int run_calibrate(const std::string& measurements_path, const std::string& device_filter,
                  int batch_filter, const std::string& prefix_filter, const OutputOptions& opts,
                  std::ostream& out) {
    std::vector<MeasurementRecord> records = parse_measurement_csv(measurements_path);
    std::erase_if(records, [&](const MeasurementRecord& r) {
        if (!device_filter.empty() && r.device != device_filter) return true;
        if (batch_filter > 0 && r.batch_size != batch_filter) return true;
        if (!prefix_filter.empty() && r.config_id.rfind(prefix_filter, 0) != 0) return true;
        return false;
    });

    std::map<std::string, CostBreakdown> costs;
    std::vector<std::string> unresolved;
    for (const MeasurementRecord& record : records) {
        if (costs.contains(record.config_id)) continue;
        try {
            costs[record.config_id] = network_cost(resolve_config(record.config_id)).total;
        } catch (const std::exception&) {
            unresolved.push_back(record.config_id);
        }
    }

    FitReport report = calibrate(records, costs);
    for (const std::string& config : unresolved)
        report.notes.push_back("could not resolve config '" + config + "' to a network variant");
    write_output(opts.format == "json" ? fit_report_to_json_text(report)
                                       : fit_report_to_csv(report, costs),
                 opts, out);
    return exit_ok;
}

int run_verify_kernels(std::uint64_t seed, int configs, const OutputOptions& opts,
                       std::ostream& out) {
    const VerificationResult result = run_kernel_verification(seed, configs);
    if (opts.format == "json") {
        nlohmann::ordered_json doc;
        doc["seed"] = seed;
        doc["configs_run"] = result.configs_run;
        doc["all_passed"] = result.all_passed();
        doc["checks"] = nlohmann::ordered_json::array();
        for (const auto& check : result.checks) {
            nlohmann::ordered_json c;
            c["name"] = check.name;
            c["passed"] = check.passed;
            c["detail"] = check.detail;
            doc["checks"].push_back(std::move(c));
        }
        write_output(doc.dump(2) + "\n", opts, out);
    } else {
        std::ostringstream csv;
        csv << "# seed=" << seed << " configs_run=" << result.configs_run << "\n";
        csv << "check,status,detail\n";
        for (const auto& check : result.checks)
            csv << check.name << ',' << (check.passed ? "PASS" : "FAIL") << ',' << check.detail
                << '\n';
        write_output(csv.str(), opts, out);
    }
    return result.all_passed() ? exit_ok : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grouped-convolution cost, group-size planning and energy-proxy toolkit"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Per-layer and total cost table for a network");
    std::string analyze_net, analyze_strategy;
    double analyze_beta = 0.5, analyze_scale_k = 1.0;
    bool analyze_totals_only = false;
    OutputOptions analyze_out;
    analyze->add_option("--net", analyze_net, "Built-in blueprint name or network JSON file")
        ->required();
    analyze->add_option("--strategy", analyze_strategy,
                        "e2gc:G=<int>, fggc:g=<int>, sconv or dwconv");
    analyze->add_option("--beta", analyze_beta, "Proxy exponent")->capture_default_str();
    analyze->add_option("--scale-k", analyze_scale_k, "Proxy scale")->capture_default_str();
    analyze->add_flag("--totals-only", analyze_totals_only, "Emit only the TOTAL row");
    add_output_options(analyze, analyze_out, "csv");

    // tables
    auto* tables = app.add_subcommand("tables", "Cost totals of the standard variant family");
    std::string tables_net;
    OutputOptions tables_out;
    tables->add_option("--net", tables_net, "Built-in blueprint name")->required();
    add_output_options(tables, tables_out, "csv");

    // transform
    auto* transform = app.add_subcommand("transform", "Rewrite group counts and emit network JSON");
    std::string transform_net, transform_strategy;
    OutputOptions transform_out;
    transform->add_option("--net", transform_net, "Built-in blueprint name or network JSON file")
        ->required();
    transform
        ->add_option("--strategy", transform_strategy, "e2gc:G=<int>, fggc:g=<int>, sconv or dwconv")
        ->required();
    add_output_options(transform, transform_out, "json");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Balanced group count per substitution site");
    std::string optimize_net;
    double optimize_beta = 0.5;
    std::optional<double> optimize_gamma;
    std::optional<int> optimize_target;
    OutputOptions optimize_out;
    optimize->add_option("--net", optimize_net, "Built-in blueprint name or network JSON file")
        ->required();
    optimize->add_option("--beta", optimize_beta, "Balance exponent")->capture_default_str();
    auto* gamma_opt = optimize->add_option("--gamma", optimize_gamma, "Balance level");
    auto* target_opt = optimize->add_option(
        "--target-G", optimize_target,
        "Derive the balance level so the first site's solution hits this group size");
    gamma_opt->excludes(target_opt);
    add_output_options(optimize, optimize_out, "csv");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Normalized cost curves over every divisor group size");
    int sweep_n = 512, sweep_m = 512, sweep_dk = 3, sweep_h = 14, sweep_w = 14;
    OutputOptions sweep_out;
    sweep->set_help_flag("--help", "Print help");  // frees -h for the ofmap height flag
    sweep->add_option("--n", sweep_n, "Output channels")->capture_default_str();
    sweep->add_option("--m", sweep_m, "Input channels")->capture_default_str();
    sweep->add_option("--dk", sweep_dk, "Kernel size")->capture_default_str();
    sweep->add_option("--h", sweep_h, "Ofmap height")->capture_default_str();
    sweep->add_option("--w", sweep_w, "Ofmap width")->capture_default_str();
    add_output_options(sweep, sweep_out, "csv");

    // calibrate
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit proxy constants to measured EPF data");
    std::string calibrate_measurements, calibrate_device, calibrate_prefix;
    int calibrate_batch = 0;
    OutputOptions calibrate_out;
    calibrate_cmd
        ->add_option("--measurements", calibrate_measurements, "Measurement CSV file")
        ->required();
    calibrate_cmd->add_option("--device", calibrate_device, "Keep records of this device only");
    calibrate_cmd->add_option("--batch-size", calibrate_batch, "Keep records of this batch size only");
    calibrate_cmd->add_option("--config-prefix", calibrate_prefix,
                              "Keep records whose config id starts with this prefix");
    add_output_options(calibrate_cmd, calibrate_out, "json");

    // verify-kernels
    auto* verify = app.add_subcommand("verify-kernels",
                                      "Check the grouped kernel against the dense reference");
    std::uint64_t verify_seed = kDefaultVerifySeed;
    int verify_configs = 120;
    OutputOptions verify_out;
    verify->add_option("--seed", verify_seed, "Generator seed")->capture_default_str();
    verify->add_option("--configs", verify_configs, "Number of random configurations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_output_options(verify, verify_out, "csv");

    std::vector<const char*> argv;
    argv.push_back("gconvplan");
    for (const std::string& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (analyze->parsed())
            return run_analyze(analyze_net, analyze_strategy, analyze_beta, analyze_scale_k,
                               analyze_totals_only, analyze_out, out);
        if (tables->parsed()) return run_tables(tables_net, tables_out, out);
        if (transform->parsed()) {
            if (transform_out.format != "json") {
                err << "transform emits network JSON only; use --format json\n";
                return exit_usage;
            }
            return run_transform(transform_net, transform_strategy, transform_out, out);
        }
        if (optimize->parsed()) {
            if (!optimize_gamma && !optimize_target) {
                err << "optimize needs --gamma or --target-G\n";
                return exit_usage;
            }
            return run_optimize(optimize_net, optimize_beta, optimize_gamma, optimize_target,
                                optimize_out, out);
        }
        if (sweep->parsed())
            return run_sweep(sweep_n, sweep_m, sweep_dk, sweep_h, sweep_w, sweep_out, out);
        if (calibrate_cmd->parsed())
            return run_calibrate(calibrate_measurements, calibrate_device, calibrate_batch,
                                 calibrate_prefix, calibrate_out, out);
        if (verify->parsed()) return run_verify_kernels(verify_seed, verify_configs, verify_out, out);
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return exit_usage;
    } catch (const CalibrationError& e) {
        err << "calibration error: " << e.what() << "\n";
        return exit_calibration;
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return exit_validation;
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return exit_validation;
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return exit_validation;
    }
    err << "no subcommand given\n" << app.help();
    return exit_usage;
}

}  // namespace gconvplan::cli
