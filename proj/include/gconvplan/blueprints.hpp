// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gconvplan/cost.hpp"
#include "gconvplan/layer.hpp"
#include "gconvplan/planner.hpp"

namespace gconvplan {

enum class BlueprintName { mobilenet_v1, resnext50_32x4d };

BlueprintName blueprint_name_from_string(const std::string& s);
std::string to_string(BlueprintName name);

struct BlueprintId {
    BlueprintName name = BlueprintName::mobilenet_v1;
    int input_resolution = 224;
    double width_multiplier = 1.0;  // mobilenet only
};

/// Generate the layer table of a built-in architecture with every
/// (grouped/depthwise 3x3, pointwise 1x1) pair marked as a substitution
/// site. The first convolution, residual projections and the classifier are
/// never sites. Throws std::invalid_argument for resolutions not divisible
/// by 32 or width multipliers that scale any channel count to a non-integer.
///
/// Counting convention, fixed once for both architectures: conv layers carry
/// no bias and batch-norm parameters are not counted; the classifier carries
/// a bias. Reported parameter totals are therefore conv/fc weights plus the
/// classifier bias.
NetworkSpec generate(const BlueprintId& id);

struct VariantRow {
    GroupingStrategy strategy;
    CostBreakdown total;
};

/// Cost totals of the standard variant family: constant-group-size rows
/// G in {1,2,4,8,16,32} and constant-group-count rows g in {2,4,8,16,32}.
std::vector<VariantRow> variant_table(const BlueprintId& id);

/// Resolve a config id such as "mobilenet_v1/e2gc/G=8" or
/// "resnext50_32x4d/dwconv" to the rewritten network. A bare blueprint name
/// resolves to the unrewritten blueprint.
NetworkSpec resolve_config(const std::string& config_id);

}  // namespace gconvplan
