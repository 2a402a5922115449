// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "gconvplan/cost.hpp"
#include "gconvplan/layer.hpp"

namespace gconvplan {

/// Constants of the compute/memory balance model.
///
/// The model balances compute cost against data-movement cost per layer:
///
///   macs^(1-beta) * weights^beta = gamma
///
/// beta in (0,1) captures the energy disparity between an arithmetic
/// operation and a memory access (closer to 0 means memory is relatively
/// more expensive); alpha in (0,1] captures how much of the traffic the
/// memory hierarchy absorbs (closer to 0 means better on-chip reuse).
/// alpha is not separately identifiable from the proxy scale in a fit, so
/// fitted models report the product in scale_k.
struct EnergyModelParams {
    double alpha = 1.0;
    double beta = 0.5;
    double gamma = 1.0;
    int target_group_size = 1;
    double scale_k = 1.0;
};

/// Throws std::invalid_argument if any constant is out of range.
void check_params(const EnergyModelParams& params);

enum class StrategyKind { e2gc, fggc, sconv, dwconv };

/// How to assign group counts at substitution sites:
///   e2gc   — constant group size: groups = in_channels / value per layer
///   fggc   — constant group count: groups = value everywhere
///   sconv  — one group (standard convolution)
///   dwconv — one channel per group (depthwise)
struct GroupingStrategy {
    StrategyKind kind = StrategyKind::dwconv;
    int value = 1;  // G for e2gc, g for fggc; ignored otherwise

    /// Parse the CLI grammar: "e2gc:G=<int>", "fggc:g=<int>", "sconv",
    /// "dwconv". Throws std::invalid_argument on malformed input.
    static GroupingStrategy parse(const std::string& text);

    /// Parse the config-id suffix form: "e2gc/G=8", "fggc/g=32", ...
    static GroupingStrategy parse_config_suffix(const std::string& text);

    std::string flag_label() const;      // e2gc:G=8
    std::string config_suffix() const;   // e2gc/G=8
};

/// Continuous solution of the balance equation for one layer:
///
///   g* = in_c * out_c * kh * kw * (h*w)^(1-beta) / gamma
///
/// Substituting g* back into macs^(1-beta) * weights^beta recovers gamma.
double balanced_groups(const LayerSpec& layer, const EnergyModelParams& params);

/// Balance residual macs(g)^(1-beta) * weights(g)^beta at a (possibly
/// fractional) group count; equals gamma at g = balanced_groups(...).
double balance_residual(const LayerSpec& layer, double groups, double beta);

/// Nearest common divisor of (m, n) to g_star in log space; exact ties go
/// to the smaller divisor (more data reuse).
int round_to_valid(double g_star, int m, int n);

/// Rewrite the 3x3 layer of every substitution site according to the
/// strategy. Pointwise and non-site layers are untouched. For e2gc, a site
/// whose channel count is not divisible by the target group size falls back
/// to the largest divisor of gcd(in_c, out_c) not exceeding
/// in_c / min(G, in_c). Throws ValidationError when no valid assignment
/// exists (e.g. fggc group count that does not divide a site's channels).
NetworkSpec plan(const NetworkSpec& net, const GroupingStrategy& strategy);

struct BalancePoint {
    std::string layer_id;
    double g_star = 0.0;           // continuous balanced group count
    double group_size_star = 0.0;  // implied group size in_channels / g_star
};

/// Continuous balanced group count and implied group size for every
/// substitution-site 3x3 layer. When the network widens channels 2x each
/// time the ofmap side halves and beta = 0.5, the implied group size is the
/// same at every site. Requires square ofmaps on all sites.
std::vector<BalancePoint> balance_profile(const NetworkSpec& net,
                                          const EnergyModelParams& params);

/// Energy proxy for one cost vector:
///
///   E = scale_k * macs^(1-beta) * (activations + params)^beta
///
/// Monotone in macs for a fixed footprint and vice versa. Network-level
/// proxies are reported as the sum of per-layer proxies (energy is additive
/// over layers); that summation is an extension of the per-layer model.
double energy_proxy(const CostBreakdown& cost, const EnergyModelParams& params);

}  // namespace gconvplan
