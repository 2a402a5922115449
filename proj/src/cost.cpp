// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/cost.hpp"

namespace gconvplan {

double intensity_of(std::int64_t macs, std::int64_t footprint) {
    if (footprint <= 0) return 0.0;
    return static_cast<double>(macs) / static_cast<double>(footprint);
}

CostBreakdown layer_cost(const LayerSpec& layer) {
    if (auto diags = validate_layer(layer); !diags.empty()) throw ValidationError(std::move(diags));

    const std::int64_t in_c = layer.in_channels;
    const std::int64_t out_c = layer.out_channels;
    const std::int64_t taps = (in_c / layer.groups) * layer.kernel_h * layer.kernel_w;
    const std::int64_t out_hw = static_cast<std::int64_t>(layer.out_h) * layer.out_w;
    const std::int64_t in_hw =
        static_cast<std::int64_t>(layer.stride) * layer.out_h * layer.stride * layer.out_w;

    CostBreakdown cost;
    cost.macs = out_c * taps * out_hw;
    cost.params = out_c * taps;
    if (layer.has_bias) cost.params += out_c;
    if (layer.has_batchnorm) cost.params += 2 * out_c;
    cost.activations = in_c * in_hw + out_c * out_hw;
    cost.arithmetic_intensity = intensity_of(cost.macs, cost.footprint());
    return cost;
}

NetworkCost network_cost(const NetworkSpec& net) {
    NetworkCost result;
    result.per_layer.reserve(net.layers.size());
    for (const auto& layer : net.layers) {
        CostBreakdown cost = layer_cost(layer);
        result.total.macs += cost.macs;
        result.total.params += cost.params;
        result.total.activations += cost.activations;
        result.per_layer.emplace_back(layer.id, cost);
    }
    result.total.arithmetic_intensity =
        intensity_of(result.total.macs, result.total.footprint());
    return result;
}

}  // namespace gconvplan
