// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gconvplan/layer.hpp"

namespace gconvplan {

/// Exact per-layer (or aggregated) cost figures. macs, params and
/// activations are exact integer counts; arithmetic intensity is the
/// quotient macs / (params + activations).
struct CostBreakdown {
    std::int64_t macs = 0;
    std::int64_t params = 0;
    std::int64_t activations = 0;
    double arithmetic_intensity = 0.0;

    std::int64_t footprint() const { return params + activations; }
};

/// Recompute the intensity quotient from the integer fields.
double intensity_of(std::int64_t macs, std::int64_t footprint);

/// Cost of one layer:
///   macs        = out_c * in_c * kh * kw / groups * out_h * out_w
///   params      = out_c * in_c * kh * kw / groups  (+ out_c bias, + 2*out_c BN)
///   activations = in_c * (stride*out_h) * (stride*out_w) + out_c * out_h * out_w
/// The ifmap term uses the layer's input spatial size so that strided layers
/// keep their physical footprint; at stride 1 this is (in_c + out_c) * h * w.
/// Throws ValidationError if groups does not divide both channel counts.
CostBreakdown layer_cost(const LayerSpec& layer);

struct NetworkCost {
    CostBreakdown total;
    std::vector<std::pair<std::string, CostBreakdown>> per_layer;
};

/// Element-wise sum over layers; the total intensity is recomputed from the
/// summed counts, never averaged. Propagates per-layer validation errors.
NetworkCost network_cost(const NetworkSpec& net);

}  // namespace gconvplan
