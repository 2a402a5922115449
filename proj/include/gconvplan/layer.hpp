// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gconvplan {

enum class LayerKind { conv, fully_connected };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

/// One convolution (or fully-connected) layer, described by its shape only.
/// Spatial sizes refer to the output feature map; the input feature map is
/// assumed to be stride * (out_h, out_w). Fully-connected layers are the
/// degenerate case kernel = ofmap = 1x1.
struct LayerSpec {
    std::string id;
    LayerKind kind = LayerKind::conv;
    int in_channels = 1;
    int out_channels = 1;
    int kernel_h = 1;
    int kernel_w = 1;
    int out_h = 1;
    int out_w = 1;
    int stride = 1;
    int padding = 0;
    int groups = 1;
    bool has_bias = false;
    bool has_batchnorm = false;

    bool operator==(const LayerSpec&) const = default;
};

/// An ordered stack of layers plus the (3x3 grouped, 1x1 pointwise) layer
/// pairs that group-size rewriting is allowed to touch.
struct NetworkSpec {
    std::string name;
    std::vector<LayerSpec> layers;
    std::vector<std::pair<std::string, std::string>> substitution_sites;

    bool operator==(const NetworkSpec&) const = default;

    const LayerSpec* find_layer(const std::string& id) const;
    LayerSpec* find_layer(const std::string& id);
};

struct Diagnostic {
    std::string layer_id;
    std::string message;
};

/// Structural checks: positive dimensions, group divisibility, channel
/// chaining between consecutive layers, and well-formed substitution sites.
/// Returns an empty list iff the network is valid.
///
/// Chaining rule: a layer must consume either its predecessor's output
/// channels or its predecessor's input channels (the latter covers parallel
/// branches such as residual projections listed next to the main path).
std::vector<Diagnostic> validate(const NetworkSpec& net);

std::vector<Diagnostic> validate_layer(const LayerSpec& layer);

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace gconvplan
