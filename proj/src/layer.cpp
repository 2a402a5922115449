// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/layer.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gconvplan {

std::string to_string(LayerKind kind) {
    return kind == LayerKind::conv ? "conv" : "fully_connected";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "conv") return LayerKind::conv;
    if (s == "fully_connected") return LayerKind::fully_connected;
    throw std::invalid_argument("unknown layer kind: " + s);
}

const LayerSpec* NetworkSpec::find_layer(const std::string& id) const {
    for (const auto& layer : layers)
        if (layer.id == id) return &layer;
    return nullptr;
}

LayerSpec* NetworkSpec::find_layer(const std::string& id) {
    for (auto& layer : layers)
        if (layer.id == id) return &layer;
    return nullptr;
}

std::vector<Diagnostic> validate_layer(const LayerSpec& layer) {
    std::vector<Diagnostic> out;
    auto flag = [&](const std::string& message) { out.push_back({layer.id, message}); };

    if (layer.in_channels < 1) flag("in_channels must be >= 1");
    if (layer.out_channels < 1) flag("out_channels must be >= 1");
    if (layer.kernel_h < 1 || layer.kernel_w < 1) flag("kernel dimensions must be >= 1");
    if (layer.out_h < 1 || layer.out_w < 1) flag("ofmap dimensions must be >= 1");
    if (layer.stride < 1) flag("stride must be >= 1");
    if (layer.padding < 0) flag("padding must be >= 0");
    if (layer.groups < 1) flag("groups must be >= 1");

    if (layer.groups >= 1 && layer.in_channels >= 1 && layer.out_channels >= 1) {
        if (layer.in_channels % layer.groups != 0) flag("groups does not divide in_channels");
        if (layer.out_channels % layer.groups != 0) flag("groups does not divide out_channels");
    }
    if (layer.kind == LayerKind::fully_connected &&
        (layer.kernel_h != 1 || layer.kernel_w != 1 || layer.out_h != 1 || layer.out_w != 1)) {
        flag("fully_connected layers must have kernel and ofmap of 1x1");
    }
    return out;
}

std::vector<Diagnostic> validate(const NetworkSpec& net) {
    std::vector<Diagnostic> out;

    std::unordered_set<std::string> seen;
    for (const auto& layer : net.layers) {
        if (!seen.insert(layer.id).second) out.push_back({layer.id, "duplicate layer id"});
        auto layer_diags = validate_layer(layer);
        out.insert(out.end(), layer_diags.begin(), layer_diags.end());
    }

    // Channel chaining. A layer may consume the previous layer's output or
    // re-consume the previous layer's input (parallel branch).
    for (std::size_t i = 1; i < net.layers.size(); ++i) {
        const auto& prev = net.layers[i - 1];
        const auto& cur = net.layers[i];
        if (cur.in_channels != prev.out_channels && cur.in_channels != prev.in_channels) {
            std::ostringstream msg;
            msg << "in_channels " << cur.in_channels << " does not chain from layer '" << prev.id
                << "' (out_channels " << prev.out_channels << ")";
            out.push_back({cur.id, msg.str()});
        }
    }

    for (const auto& [first_id, second_id] : net.substitution_sites) {
        const LayerSpec* first = net.find_layer(first_id);
        const LayerSpec* second = net.find_layer(second_id);
        if (first == nullptr) out.push_back({first_id, "substitution site references unknown layer"});
        if (second == nullptr) {
            out.push_back({second_id, "substitution site references unknown layer"});
        } else if (second->kernel_h != 1 || second->kernel_w != 1) {
            out.push_back({second_id, "second layer of a substitution site must be pointwise (1x1)"});
        }
    }
    return out;
}

namespace {
std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::ostringstream msg;
    msg << "validation failed:";
    for (const auto& d : diagnostics) msg << "\n  [" << d.layer_id << "] " << d.message;
    return msg.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace gconvplan
