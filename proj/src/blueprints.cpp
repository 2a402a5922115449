// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/blueprints.hpp"

#include <cmath>
#include <stdexcept>

namespace gconvplan {

BlueprintName blueprint_name_from_string(const std::string& s) {
    if (s == "mobilenet_v1") return BlueprintName::mobilenet_v1;
    if (s == "resnext50_32x4d") return BlueprintName::resnext50_32x4d;
    throw std::invalid_argument("unknown blueprint: " + s);
}

std::string to_string(BlueprintName name) {
    return name == BlueprintName::mobilenet_v1 ? "mobilenet_v1" : "resnext50_32x4d";
}

namespace {

void check_id(const BlueprintId& id) {
    if (id.input_resolution < 32 || id.input_resolution % 32 != 0)
        throw std::invalid_argument("input resolution must be a positive multiple of 32");
    if (!(id.width_multiplier > 0.0))
        throw std::invalid_argument("width multiplier must be positive");
    if (id.name != BlueprintName::mobilenet_v1 && id.width_multiplier != 1.0)
        throw std::invalid_argument("width multiplier is only supported for mobilenet_v1");
}

int scaled(int channels, double multiplier) {
    const double value = channels * multiplier;
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9 || rounded < 1.0)
        throw std::invalid_argument("width multiplier scales channel count " +
                                    std::to_string(channels) + " to a non-integer");
    return static_cast<int>(rounded);
}

LayerSpec conv(std::string id, int in_c, int out_c, int kernel, int ofmap, int stride,
               int padding, int groups) {
    LayerSpec layer;
    layer.id = std::move(id);
    layer.kind = LayerKind::conv;
    layer.in_channels = in_c;
    layer.out_channels = out_c;
    layer.kernel_h = layer.kernel_w = kernel;
    layer.out_h = layer.out_w = ofmap;
    layer.stride = stride;
    layer.padding = padding;
    layer.groups = groups;
    return layer;
}

LayerSpec classifier(int in_c, int classes) {
    LayerSpec layer;
    layer.id = "fc";
    layer.kind = LayerKind::fully_connected;
    layer.in_channels = in_c;
    layer.out_channels = classes;
    layer.has_bias = true;
    return layer;
}

NetworkSpec mobilenet_v1(const BlueprintId& id) {
    const double wm = id.width_multiplier;
    NetworkSpec net;
    net.name = to_string(id.name);

    // Depthwise-separable stack: (block input channels, ofmap divisor of the
    // input resolution, depthwise stride), pointwise output channels.
    struct Block {
        int channels;
        int ofmap_div;
        int stride;
        int out_channels;
    };
    const Block blocks[] = {
        {32, 2, 1, 64},     {64, 4, 2, 128},   {128, 4, 1, 128},  {128, 8, 2, 256},
        {256, 8, 1, 256},   {256, 16, 2, 512}, {512, 16, 1, 512}, {512, 16, 1, 512},
        {512, 16, 1, 512},  {512, 16, 1, 512}, {512, 16, 1, 512}, {512, 32, 2, 1024},
        {1024, 32, 1, 1024},
    };

    net.layers.push_back(
        conv("conv1", 3, scaled(32, wm), 3, id.input_resolution / 2, 2, 1, 1));
    int index = 1;
    for (const Block& block : blocks) {
        const int channels = scaled(block.channels, wm);
        const int ofmap = id.input_resolution / block.ofmap_div;
        const std::string dw_id = "block" + std::to_string(index) + "_dw";
        const std::string pw_id = "block" + std::to_string(index) + "_pw";
        net.layers.push_back(conv(dw_id, channels, channels, 3, ofmap, block.stride, 1, channels));
        net.layers.push_back(conv(pw_id, channels, scaled(block.out_channels, wm), 1, ofmap, 1, 0, 1));
        net.substitution_sites.emplace_back(dw_id, pw_id);
        ++index;
    }
    net.layers.push_back(classifier(scaled(1024, wm), 1000));
    return net;
}

NetworkSpec resnext50_32x4d(const BlueprintId& id) {
    NetworkSpec net;
    net.name = to_string(id.name);
    net.layers.push_back(conv("conv1", 3, 64, 7, id.input_resolution / 2, 2, 3, 1));
    // 3x3 max pool (stride 2) follows conv1; it carries no cost and is
    // implicit in the stage ofmap sizes below.

    struct Stage {
        int blocks;
        int width;      // grouped 3x3 channels (32 groups x 4d widths)
        int out;        // block output channels
        int ofmap_div;  // input resolution divisor of the stage ofmap
    };
    const Stage stages[] = {{3, 128, 256, 4}, {4, 256, 512, 8}, {6, 512, 1024, 16},
                            {3, 1024, 2048, 32}};

    int in_c = 64;
    for (int s = 0; s < 4; ++s) {
        const Stage& stage = stages[s];
        const int ofmap = id.input_resolution / stage.ofmap_div;
        for (int b = 0; b < stage.blocks; ++b) {
            const std::string prefix = "stage" + std::to_string(s + 1) + "_block" +
                                       std::to_string(b + 1) + "_";
            const int block_in = b == 0 ? in_c : stage.out;
            // Downsampling happens on the grouped 3x3 (and the projection).
            const int stride = (b == 0 && s > 0) ? 2 : 1;
            const int in_ofmap = ofmap * stride;
            if (b == 0)
                net.layers.push_back(conv(prefix + "project", block_in, stage.out, 1, ofmap,
                                          stride, 0, 1));
            net.layers.push_back(conv(prefix + "reduce", block_in, stage.width, 1, in_ofmap, 1, 0, 1));
            net.layers.push_back(conv(prefix + "grouped", stage.width, stage.width, 3, ofmap,
                                      stride, 1, 32));
            net.layers.push_back(conv(prefix + "expand", stage.width, stage.out, 1, ofmap, 1, 0, 1));
            net.substitution_sites.emplace_back(prefix + "grouped", prefix + "expand");
        }
        in_c = stage.out;
    }
    net.layers.push_back(classifier(2048, 1000));
    return net;
}

}  // namespace

NetworkSpec generate(const BlueprintId& id) {
    check_id(id);
    NetworkSpec net = id.name == BlueprintName::mobilenet_v1 ? mobilenet_v1(id)
                                                             : resnext50_32x4d(id);
    if (auto diags = validate(net); !diags.empty()) throw ValidationError(std::move(diags));
    return net;
}

std::vector<VariantRow> variant_table(const BlueprintId& id) {
    const NetworkSpec base = generate(id);
    std::vector<VariantRow> rows;
    for (int G : {1, 2, 4, 8, 16, 32})
        rows.push_back({{StrategyKind::e2gc, G}, network_cost(plan(base, {StrategyKind::e2gc, G})).total});
    for (int g : {2, 4, 8, 16, 32})
        rows.push_back({{StrategyKind::fggc, g}, network_cost(plan(base, {StrategyKind::fggc, g})).total});
    return rows;
}

NetworkSpec resolve_config(const std::string& config_id) {
    const auto slash = config_id.find('/');
    if (slash == std::string::npos) {
        BlueprintId id;
        id.name = blueprint_name_from_string(config_id);
        return generate(id);
    }
    BlueprintId id;
    id.name = blueprint_name_from_string(config_id.substr(0, slash));
    const GroupingStrategy strategy =
        GroupingStrategy::parse_config_suffix(config_id.substr(slash + 1));
    return plan(generate(id), strategy);
}

}  // namespace gconvplan
