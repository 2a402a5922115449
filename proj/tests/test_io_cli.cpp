// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gconvplan/blueprints.hpp"
#include "gconvplan/cli.hpp"
#include "gconvplan/json_io.hpp"
#include "gconvplan/report.hpp"
#include "test_helpers.hpp"

using namespace gconvplan;

namespace {

std::string data_file(const std::string& name) {
    return std::string(GCONVPLAN_DATA_DIR) + "/" + name;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

NetworkSpec mobilenet() {
    BlueprintId id;
    id.name = BlueprintName::mobilenet_v1;
    return generate(id);
}

}  // namespace

TEST_CASE("network json: emit then parse is the identity") {
    const NetworkSpec net = mobilenet();
    const std::string text = network_to_json_text(net);
    const NetworkSpec parsed = network_from_json_text(text);
    CHECK(parsed == net);
    // Emit -> parse -> emit is byte-identical.
    CHECK(network_to_json_text(parsed) == text);
}

TEST_CASE("network json: unknown fields are rejected with the key path") {
    std::string text = network_to_json_text(mobilenet());
    text.insert(text.find("\"kind\""), "\"fubar\": 3, ");
    try {
        network_from_json_text(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("layers[0].fubar") != std::string::npos);
    }
}

TEST_CASE("network json: missing layers key is named") {
    try {
        network_from_json_text(R"({"schema_version": 1, "name": "x", "substitution_sites": []})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("layers") != std::string::npos);
    }
}

TEST_CASE("network json: schema_version is required") {
    CHECK_THROWS_AS(
        network_from_json_text(R"({"name": "x", "layers": [], "substitution_sites": []})"),
        ParseError);
}

TEST_CASE("network json: duplicate layer ids are a parse error") {
    NetworkSpec net;
    net.name = "dup";
    net.layers = {testing::make_conv("a", 4, 4, 3, 8), testing::make_conv("a", 4, 4, 3, 8)};
    const std::string text = network_to_json_text(net);
    CHECK_THROWS_AS(network_from_json_text(text), ParseError);
}

TEST_CASE("network json: malformed text is a parse error") {
    CHECK_THROWS_AS(network_from_json_text("{nope"), ParseError);
    CHECK_THROWS_AS(network_from_json_text("[]"), ParseError);
}

TEST_CASE("network json: mutated documents fail cleanly") {
    const std::string base = network_to_json_text(mobilenet());
    std::mt19937 rng(31);
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> printable(32, 126);
    for (int i = 0; i < 200; ++i) {
        std::string mutated = base;
        mutated[pos(rng)] = static_cast<char>(printable(rng));
        // Any outcome but a crash is acceptable: a clean parse, a parse
        // error, or a spec that later fails validation.
        try {
            const NetworkSpec net = network_from_json_text(mutated);
            (void)validate(net);
        } catch (const ParseError&) {
        } catch (const std::invalid_argument&) {
        }
    }
    CHECK(true);
}

TEST_CASE("network json: invalid group counts parse but fail validation") {
    NetworkSpec net;
    net.name = "g3";
    LayerSpec layer = testing::make_conv("l", 64, 64, 3, 8);
    layer.groups = 3;
    net.layers = {layer};
    const NetworkSpec parsed = network_from_json_text(network_to_json_text(net));
    const auto diags = validate(parsed);
    REQUIRE(!diags.empty());
    CHECK(diags[0].message == "groups does not divide in_channels");
}

TEST_CASE("report rows round trip through csv") {
    std::vector<ReportRow> rows;
    ReportRow a;
    a.config_id = "mobilenet_v1/e2gc/G=8";
    a.strategy = "e2gc:G=8";
    a.layer_id = "TOTAL";
    a.macs = 690'442'240;
    a.params = 4'522'568;
    a.activations = 10'187'752;
    a.arithmetic_intensity = 46.9359;
    a.energy_proxy = 430617.26;
    rows.push_back(a);
    ReportRow b = a;
    b.layer_id = "conv1";
    b.energy_proxy.reset();
    b.epf_measured_mj = 302.0;
    rows.push_back(b);

    const std::string csv = report_to_csv(rows);
    const auto parsed = report_from_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].config_id == a.config_id);
    CHECK(parsed[0].macs == a.macs);
    CHECK(parsed[0].energy_proxy.has_value());
    CHECK(!parsed[0].epf_measured_mj.has_value());
    CHECK(!parsed[1].energy_proxy.has_value());
    CHECK(parsed[1].epf_measured_mj == 302.0);
    // Serialization is stable after one round trip.
    CHECK(report_to_csv(parsed) == csv);
}

TEST_CASE("measurement csv parses the bundled data") {
    const auto records = parse_measurement_csv(data_file("epf_measurements.csv"));
    CHECK(records.size() == 132);
    int p100 = 0, b16 = 0;
    for (const auto& r : records) {
        CHECK(r.epf_millijoule > 0.0);
        p100 += r.device == "P100";
        b16 += r.batch_size == 16;
    }
    CHECK(p100 == 66);
    CHECK(b16 == 44);
}

TEST_CASE("measurement csv round trips through the writer") {
    const auto records = parse_measurement_csv(data_file("epf_measurements.csv"));
    const std::string text = measurements_to_csv(records, {"round trip"});
    const auto reparsed = measurements_from_csv(text);
    REQUIRE(reparsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(reparsed[i].config_id == records[i].config_id);
        CHECK(reparsed[i].batch_size == records[i].batch_size);
        CHECK(reparsed[i].device == records[i].device);
        CHECK(reparsed[i].epf_millijoule == records[i].epf_millijoule);
    }
}

TEST_CASE("measurement csv rejects malformed input") {
    CHECK_THROWS_AS(measurements_from_csv("nope,nope\n"), ParseError);
    CHECK_THROWS_AS(measurements_from_csv("config_id,batch_size,device,epf_millijoule\nx,0,d,1\n"),
                    ParseError);
    CHECK_THROWS_AS(measurements_from_csv("config_id,batch_size,device,epf_millijoule\nx,1,d\n"),
                    ParseError);
}

TEST_CASE("cli: unknown subcommand exits with the usage code") {
    const CliResult r = run_cli({"frobnicate"});
    CHECK(r.code == cli::exit_usage);
}

TEST_CASE("cli: malformed strategy flag exits with the usage code") {
    const CliResult r = run_cli({"analyze", "--net", "mobilenet_v1", "--strategy", "e2gc:8"});
    CHECK(r.code == cli::exit_usage);
}

TEST_CASE("cli: indivisible group count exits with the validation code") {
    const CliResult r = run_cli({"transform", "--net", "mobilenet_v1", "--strategy", "fggc:g=3"});
    CHECK(r.code == cli::exit_validation);
    CHECK(r.err.find("does not divide") != std::string::npos);
}

TEST_CASE("cli: tables emits 11 total rows and is stable across runs") {
    const CliResult r = run_cli({"tables", "--net", "mobilenet_v1"});
    REQUIRE(r.code == cli::exit_ok);
    const auto rows = report_from_csv(r.out);
    CHECK(rows.size() == 11);
    for (const auto& row : rows) CHECK(row.layer_id == "TOTAL");
    CHECK(run_cli({"tables", "--net", "mobilenet_v1"}).out == r.out);
}

TEST_CASE("cli: unknown network names exit with the validation code") {
    CHECK(run_cli({"analyze", "--net", "alexnet"}).code == cli::exit_validation);
    CHECK(run_cli({"tables", "--net", "/no/such/file.json"}).code == cli::exit_validation);
}

TEST_CASE("cli: analyze total matches the library cost") {
    const CliResult r =
        run_cli({"analyze", "--net", "resnext50_32x4d", "--strategy", "e2gc:G=8", "--totals-only"});
    REQUIRE(r.code == cli::exit_ok);
    const auto rows = report_from_csv(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].params == 24'089'768);
    CHECK(rows[0].macs == 4'197'965'824);
}

TEST_CASE("cli: transform output parses back and applies the strategy") {
    const CliResult r = run_cli({"transform", "--net", "mobilenet_v1", "--strategy", "e2gc:G=4"});
    REQUIRE(r.code == cli::exit_ok);
    const NetworkSpec net = network_from_json_text(r.out);
    CHECK(net.name == "mobilenet_v1/e2gc/G=4");
    CHECK(validate(net).empty());
    const LayerSpec* dw1 = net.find_layer("block1_dw");
    CHECK(dw1->groups == 8);  // 32 channels / group size 4
}

TEST_CASE("cli: transform rejects csv format") {
    const CliResult r =
        run_cli({"transform", "--net", "mobilenet_v1", "--strategy", "sconv", "--format", "csv"});
    CHECK(r.code == cli::exit_usage);
}

TEST_CASE("cli: sweep emits the normalization anchor and reciprocal identity") {
    const CliResult r = run_cli({"sweep"});
    REQUIRE(r.code == cli::exit_ok);
    std::istringstream in(r.out);
    std::string header, first;
    std::getline(in, header);
    CHECK(header == "G,mc_normalized,ai_normalized,mem_access_normalized");
    std::getline(in, first);
    CHECK(first == "1,1,1,1");
}

TEST_CASE("sweep rows: every divisor present, reciprocal exact, 512-point value") {
    const auto rows = group_size_sweep(512, 512, 3, 14, 14);
    REQUIRE(rows.size() == 10);
    for (const auto& row : rows) {
        CHECK(row.macs_normalized == static_cast<double>(row.group_size));
        CHECK(row.mem_access_normalized == 1.0 / row.intensity_normalized);
    }
    // Intensity ratio at full group size, re-derived from the exact counts:
    // AI(512) = 462422016 / 2560000, AI(1) = 903168 / 205312.
    const double expected = (462'422'016.0 / 2'560'000.0) / (903'168.0 / 205'312.0);
    CHECK(rows.back().group_size == 512);
    CHECK(rows.back().intensity_normalized == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rows.back().intensity_normalized == doctest::Approx(41.06).epsilon(1e-3));
}

TEST_CASE("sweep covers every divisor group size for rectangular channel counts") {
    const auto rows = group_size_sweep(16, 8, 3, 4, 4);
    REQUIRE(rows.size() == 4);  // G = 1, 2, 4, 8
    CHECK(rows.front().group_size == 1);
    CHECK(rows.back().group_size == 8);
    // A shape whose depthwise anchor is invalid (groups would not divide
    // out_channels) is rejected outright.
    CHECK_THROWS_AS(group_size_sweep(12, 8, 3, 4, 4), ValidationError);
}

TEST_CASE("cli: optimize derives gamma from a target group size") {
    const CliResult r = run_cli({"optimize", "--net", "resnext50_32x4d", "--target-G", "8",
                                 "--format", "json"});
    REQUIRE(r.code == cli::exit_ok);
    // First site lands exactly on the target; remaining sites stay constant
    // under the doubling pattern at beta 0.5.
    CHECK(r.out.find("\"group_size_rounded\": 8") != std::string::npos);
    const CliResult missing = run_cli({"optimize", "--net", "resnext50_32x4d"});
    CHECK(missing.code == cli::exit_usage);
}

TEST_CASE("cli: optimize accepts an explicit balance level") {
    const CliResult r =
        run_cli({"optimize", "--net", "mobilenet_v1", "--gamma", "1032192", "--beta", "0.5"});
    REQUIRE(r.code == cli::exit_ok);
    // The 512-channel 14x14 sites solve to exactly 32 groups at this level.
    CHECK(r.out.find("block7_dw,512,32,32,16,16") != std::string::npos);
    const CliResult both = run_cli({"optimize", "--net", "mobilenet_v1", "--gamma", "10",
                                    "--target-G", "4"});
    CHECK(both.code == cli::exit_usage);  // mutually exclusive flags
}

TEST_CASE("cli: analyze json output carries rows and convention notes") {
    const CliResult r = run_cli({"analyze", "--net", "mobilenet_v1", "--strategy", "dwconv",
                                 "--totals-only", "--format", "json"});
    REQUIRE(r.code == cli::exit_ok);
    CHECK(r.out.find("\"rows\"") != std::string::npos);
    CHECK(r.out.find("\"params\": 4210088") != std::string::npos);
    CHECK(r.out.find("without bias or batch-norm") != std::string::npos);
}

TEST_CASE("cli: calibrate csv output parses as a report") {
    const CliResult r = run_cli({"calibrate", "--measurements", data_file("epf_measurements.csv"),
                                 "--device", "P4000", "--batch-size", "4", "--format", "csv"});
    REQUIRE(r.code == cli::exit_ok);
    const auto rows = report_from_csv(r.out);
    CHECK(rows.size() == 22);
    for (const auto& row : rows) {
        CHECK(row.layer_id == "TOTAL");
        CHECK(row.energy_proxy.has_value());
        CHECK(row.epf_measured_mj.has_value());
        CHECK(row.macs > 0);
    }
}

TEST_CASE("cli: verify-kernels json output") {
    const CliResult r = run_cli({"verify-kernels", "--configs", "10", "--format", "json"});
    REQUIRE(r.code == cli::exit_ok);
    CHECK(r.out.find("\"all_passed\": true") != std::string::npos);
}

TEST_CASE("cli: calibrate fits the bundled measurements") {
    const CliResult r = run_cli({"calibrate", "--measurements", data_file("epf_measurements.csv"),
                                 "--device", "P100", "--batch-size", "16", "--config-prefix",
                                 "mobilenet_v1/fggc"});
    REQUIRE(r.code == cli::exit_ok);
    CHECK(r.out.find("\"beta\"") != std::string::npos);
    CHECK(r.out.find("\"spearman_rho\"") != std::string::npos);
    CHECK(r.out.find("\"residuals\"") != std::string::npos);
}

TEST_CASE("cli: calibrate with too few records exits with the calibration code") {
    const std::string path = (std::filesystem::temp_directory_path() / "two_records.csv").string();
    {
        std::ofstream f(path);
        f << "config_id,batch_size,device,epf_millijoule\n";
        f << "mobilenet_v1/e2gc/G=1,1,P100,689\n";
        f << "mobilenet_v1/e2gc/G=2,1,P100,538\n";
    }
    const CliResult r = run_cli({"calibrate", "--measurements", path});
    CHECK(r.code == cli::exit_calibration);
    std::filesystem::remove(path);
}

TEST_CASE("cli: missing measurement file exits with the validation code") {
    const CliResult r = run_cli({"calibrate", "--measurements", "/nonexistent/epf.csv"});
    CHECK(r.code == cli::exit_validation);
}

TEST_CASE("cli: verify-kernels runs the oracle suite") {
    const CliResult r = run_cli({"verify-kernels", "--configs", "20"});
    CHECK(r.code == cli::exit_ok);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: --out writes the report to a file") {
    const std::string path = (std::filesystem::temp_directory_path() / "tables_out.csv").string();
    const CliResult r = run_cli({"tables", "--net", "resnext50_32x4d", "--out", path});
    REQUIRE(r.code == cli::exit_ok);
    CHECK(r.out.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream buffer;
    buffer << f.rdbuf();
    CHECK(report_from_csv(buffer.str()).size() == 11);
    std::filesystem::remove(path);
}

TEST_CASE("cli: transformed files feed back into optimize") {
    const std::string path = (std::filesystem::temp_directory_path() / "resnext_dw.json").string();
    const CliResult t = run_cli({"transform", "--net", "resnext50_32x4d", "--strategy", "dwconv",
                                 "--out", path});
    REQUIRE(t.code == cli::exit_ok);
    const CliResult o = run_cli({"optimize", "--net", path, "--target-G", "4"});
    REQUIRE(o.code == cli::exit_ok);
    // Substitution sites survive the round trip: one row per bottleneck.
    int data_lines = 0;
    std::istringstream in(o.out);
    for (std::string line; std::getline(in, line);)
        data_lines += !line.empty() && line[0] != '#' && line.find("layer_id") == std::string::npos;
    CHECK(data_lines == 16);
    std::filesystem::remove(path);
}

TEST_CASE("cli: analyze accepts a network json file") {
    const std::string path = (std::filesystem::temp_directory_path() / "net_in.json").string();
    emit_network_json(mobilenet(), path);
    const CliResult r = run_cli({"analyze", "--net", path, "--strategy", "fggc:g=2",
                                 "--totals-only"});
    REQUIRE(r.code == cli::exit_ok);
    const auto rows = report_from_csv(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].params == 16'722'248);
    std::filesystem::remove(path);
}
