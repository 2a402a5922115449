// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/json_io.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gconvplan {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path.empty() ? what : path + ": " + what);
}

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key))
            fail(path.empty() ? key : path + "." + key, "unknown field");
    }
}

const ordered_json& require_key(const ordered_json& obj, const std::string& key,
                                const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

int require_int(const ordered_json& value, const std::string& path) {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    const std::int64_t v = value.get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        fail(path, "integer out of range");
    return static_cast<int>(v);
}

std::string require_string(const ordered_json& value, const std::string& path) {
    if (!value.is_string()) fail(path, "expected a string");
    return value.get<std::string>();
}

bool require_bool(const ordered_json& value, const std::string& path) {
    if (!value.is_boolean()) fail(path, "expected a boolean");
    return value.get<bool>();
}

std::pair<int, int> require_int_pair(const ordered_json& value, const std::string& path) {
    if (!value.is_array() || value.size() != 2) fail(path, "expected an array of two integers");
    return {require_int(value[0], path + "[0]"), require_int(value[1], path + "[1]")};
}

LayerSpec layer_from_json(const ordered_json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj,
                        {"id", "kind", "in_channels", "out_channels", "kernel", "stride",
                         "padding", "ofmap", "groups", "bias", "batchnorm"},
                        path);
    LayerSpec layer;
    layer.id = require_string(require_key(obj, "id", path), path + ".id");
    const std::string kind = require_string(require_key(obj, "kind", path), path + ".kind");
    try {
        layer.kind = layer_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
        fail(path + ".kind", e.what());
    }
    layer.in_channels = require_int(require_key(obj, "in_channels", path), path + ".in_channels");
    layer.out_channels =
        require_int(require_key(obj, "out_channels", path), path + ".out_channels");
    std::tie(layer.kernel_h, layer.kernel_w) =
        require_int_pair(require_key(obj, "kernel", path), path + ".kernel");
    layer.stride = require_int(require_key(obj, "stride", path), path + ".stride");
    layer.padding = require_int(require_key(obj, "padding", path), path + ".padding");
    std::tie(layer.out_h, layer.out_w) =
        require_int_pair(require_key(obj, "ofmap", path), path + ".ofmap");
    layer.groups = require_int(require_key(obj, "groups", path), path + ".groups");
    layer.has_bias = require_bool(require_key(obj, "bias", path), path + ".bias");
    layer.has_batchnorm = require_bool(require_key(obj, "batchnorm", path), path + ".batchnorm");
    return layer;
}

}  // namespace

std::string network_to_json_text(const NetworkSpec& net) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["name"] = net.name;
    doc["layers"] = ordered_json::array();
    for (const LayerSpec& layer : net.layers) {
        ordered_json l;
        l["id"] = layer.id;
        l["kind"] = to_string(layer.kind);
        l["in_channels"] = layer.in_channels;
        l["out_channels"] = layer.out_channels;
        l["kernel"] = {layer.kernel_h, layer.kernel_w};
        l["stride"] = layer.stride;
        l["padding"] = layer.padding;
        l["ofmap"] = {layer.out_h, layer.out_w};
        l["groups"] = layer.groups;
        l["bias"] = layer.has_bias;
        l["batchnorm"] = layer.has_batchnorm;
        doc["layers"].push_back(std::move(l));
    }
    doc["substitution_sites"] = ordered_json::array();
    for (const auto& [first, second] : net.substitution_sites)
        doc["substitution_sites"].push_back({first, second});
    return doc.dump(2) + "\n";
}

NetworkSpec network_from_json_text(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top-level value must be an object");
    reject_unknown_keys(doc, {"schema_version", "name", "layers", "substitution_sites"}, "");

    const int version = require_int(require_key(doc, "schema_version", ""), "schema_version");
    if (version != 1)
        throw ParseError("unsupported schema_version " + std::to_string(version));

    NetworkSpec net;
    net.name = require_string(require_key(doc, "name", ""), "name");

    const ordered_json& layers = require_key(doc, "layers", "");
    if (!layers.is_array()) fail("layers", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string path = "layers[" + std::to_string(i) + "]";
        LayerSpec layer = layer_from_json(layers[i], path);
        if (!ids.insert(layer.id).second) fail(path + ".id", "duplicate layer id '" + layer.id + "'");
        net.layers.push_back(std::move(layer));
    }

    const ordered_json& sites = require_key(doc, "substitution_sites", "");
    if (!sites.is_array()) fail("substitution_sites", "expected an array");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const std::string path = "substitution_sites[" + std::to_string(i) + "]";
        const ordered_json& site = sites[i];
        if (!site.is_array() || site.size() != 2) fail(path, "expected an array of two layer ids");
        net.substitution_sites.emplace_back(require_string(site[0], path + "[0]"),
                                            require_string(site[1], path + "[1]"));
    }
    return net;
}

NetworkSpec parse_network_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return network_from_json_text(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void emit_network_json(const NetworkSpec& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path.string());
    out << network_to_json_text(net);
}

}  // namespace gconvplan
