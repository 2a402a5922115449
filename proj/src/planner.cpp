// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gconvplan {

void check_params(const EnergyModelParams& params) {
    if (!(params.alpha > 0.0) || params.alpha > 1.0)
        throw std::invalid_argument("alpha must be in (0,1]");
    if (!(params.beta > 0.0) || !(params.beta < 1.0))
        throw std::invalid_argument("beta must be in (0,1)");
    if (!(params.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (params.target_group_size < 1)
        throw std::invalid_argument("target_group_size must be >= 1");
    if (!(params.scale_k > 0.0)) throw std::invalid_argument("scale_k must be positive");
}

namespace {

int parse_positive_int(const std::string& text, const std::string& what) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid " + what + ": '" + text + "'");
    }
    if (pos != text.size() || value < 1)
        throw std::invalid_argument("invalid " + what + ": '" + text + "'");
    return value;
}

GroupingStrategy parse_with_separator(const std::string& text, char sep) {
    if (text == "sconv") return {StrategyKind::sconv, 1};
    if (text == "dwconv") return {StrategyKind::dwconv, 1};
    const std::string e2gc_prefix = std::string("e2gc") + sep + "G=";
    const std::string fggc_prefix = std::string("fggc") + sep + "g=";
    if (text.rfind(e2gc_prefix, 0) == 0)
        return {StrategyKind::e2gc, parse_positive_int(text.substr(e2gc_prefix.size()), "group size")};
    if (text.rfind(fggc_prefix, 0) == 0)
        return {StrategyKind::fggc, parse_positive_int(text.substr(fggc_prefix.size()), "group count")};
    throw std::invalid_argument(
        "invalid strategy '" + text +
        "' (expected e2gc" + sep + "G=<int>, fggc" + sep + "g=<int>, sconv or dwconv)");
}

std::vector<int> common_divisors(int m, int n) {
    const int d = std::gcd(m, n);
    std::vector<int> divisors;
    for (int i = 1; i * i <= d; ++i) {
        if (d % i == 0) {
            divisors.push_back(i);
            if (i != d / i) divisors.push_back(d / i);
        }
    }
    std::sort(divisors.begin(), divisors.end());
    return divisors;
}

}  // namespace

GroupingStrategy GroupingStrategy::parse(const std::string& text) {
    return parse_with_separator(text, ':');
}

GroupingStrategy GroupingStrategy::parse_config_suffix(const std::string& text) {
    return parse_with_separator(text, '/');
}

std::string GroupingStrategy::flag_label() const {
    switch (kind) {
        case StrategyKind::e2gc: return "e2gc:G=" + std::to_string(value);
        case StrategyKind::fggc: return "fggc:g=" + std::to_string(value);
        case StrategyKind::sconv: return "sconv";
        case StrategyKind::dwconv: return "dwconv";
    }
    return "";
}

std::string GroupingStrategy::config_suffix() const {
    switch (kind) {
        case StrategyKind::e2gc: return "e2gc/G=" + std::to_string(value);
        case StrategyKind::fggc: return "fggc/g=" + std::to_string(value);
        case StrategyKind::sconv: return "sconv";
        case StrategyKind::dwconv: return "dwconv";
    }
    return "";
}

double balanced_groups(const LayerSpec& layer, const EnergyModelParams& params) {
    if (auto diags = validate_layer(layer); !diags.empty()) throw ValidationError(std::move(diags));
    check_params(params);
    const double filters = static_cast<double>(layer.in_channels) * layer.out_channels *
                           layer.kernel_h * layer.kernel_w;
    const double spatial = static_cast<double>(layer.out_h) * layer.out_w;
    return filters * std::pow(spatial, 1.0 - params.beta) / params.gamma;
}

double balance_residual(const LayerSpec& layer, double groups, double beta) {
    if (!(groups > 0.0)) throw std::invalid_argument("groups must be positive");
    const double filters = static_cast<double>(layer.in_channels) * layer.out_channels *
                           layer.kernel_h * layer.kernel_w;
    const double spatial = static_cast<double>(layer.out_h) * layer.out_w;
    const double macs = filters * spatial / groups;
    const double weights = filters / groups;
    return std::pow(macs, 1.0 - beta) * std::pow(weights, beta);
}

int round_to_valid(double g_star, int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("channel counts must be >= 1");
    if (!(g_star > 0.0)) throw std::invalid_argument("g_star must be positive");

    int best = 1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int d : common_divisors(m, n)) {
        const double dist = std::abs(std::log(g_star) - std::log(static_cast<double>(d)));
        // Divisors are visited in ascending order; a later (larger) one only
        // wins by strict improvement, so ties keep the smaller divisor.
        if (dist + 1e-12 * std::max(1.0, dist) < best_dist) {
            best = d;
            best_dist = dist;
        }
    }
    return best;
}

namespace {

int largest_divisor_not_above(int m, int n, double bound) {
    int best = 1;
    for (int d : common_divisors(m, n))
        if (static_cast<double>(d) <= bound) best = d;
    return best;
}

int site_groups(const LayerSpec& layer, const GroupingStrategy& strategy) {
    const int in_c = layer.in_channels;
    const int out_c = layer.out_channels;
    switch (strategy.kind) {
        case StrategyKind::sconv:
            return 1;
        case StrategyKind::dwconv:
            if (out_c % in_c != 0)
                throw ValidationError({{layer.id, "depthwise needs out_channels divisible by in_channels"}});
            return in_c;
        case StrategyKind::fggc:
            if (in_c % strategy.value != 0 || out_c % strategy.value != 0) {
                std::ostringstream msg;
                msg << "group count " << strategy.value << " does not divide channels (" << in_c
                    << ", " << out_c << ")";
                throw ValidationError({{layer.id, msg.str()}});
            }
            return strategy.value;
        case StrategyKind::e2gc: {
            const int target = strategy.value;
            if (target <= in_c && in_c % target == 0 && out_c % (in_c / target) == 0)
                return in_c / target;
            // Fallback for channel counts the target group size does not
            // divide: the largest common divisor of the channel counts not
            // exceeding in_c / min(target, in_c).
            const double bound =
                static_cast<double>(in_c) / static_cast<double>(std::min(target, in_c));
            return largest_divisor_not_above(in_c, out_c, bound);
        }
    }
    throw std::logic_error("unreachable strategy kind");
}

}  // namespace

NetworkSpec plan(const NetworkSpec& net, const GroupingStrategy& strategy) {
    if ((strategy.kind == StrategyKind::e2gc || strategy.kind == StrategyKind::fggc) &&
        strategy.value < 1)
        throw std::invalid_argument("strategy value must be >= 1");
    if (auto diags = validate(net); !diags.empty()) throw ValidationError(std::move(diags));

    NetworkSpec out = net;
    out.name = net.name + "/" + strategy.config_suffix();
    for (const auto& [site_conv, site_pw] : out.substitution_sites) {
        (void)site_pw;
        LayerSpec* layer = out.find_layer(site_conv);
        layer->groups = site_groups(*layer, strategy);
    }
    if (auto diags = validate(out); !diags.empty()) throw ValidationError(std::move(diags));
    return out;
}

std::vector<BalancePoint> balance_profile(const NetworkSpec& net,
                                          const EnergyModelParams& params) {
    check_params(params);
    std::vector<BalancePoint> profile;
    profile.reserve(net.substitution_sites.size());
    for (const auto& [site_conv, site_pw] : net.substitution_sites) {
        (void)site_pw;
        const LayerSpec* layer = net.find_layer(site_conv);
        if (layer == nullptr)
            throw ValidationError({{site_conv, "substitution site references unknown layer"}});
        if (layer->out_h != layer->out_w)
            throw ValidationError({{site_conv, "balance profile requires a square ofmap"}});
        BalancePoint point;
        point.layer_id = layer->id;
        point.g_star = balanced_groups(*layer, params);
        point.group_size_star = static_cast<double>(layer->in_channels) / point.g_star;
        profile.push_back(point);
    }
    return profile;
}

double energy_proxy(const CostBreakdown& cost, const EnergyModelParams& params) {
    if (cost.macs < 0 || cost.params < 0 || cost.activations < 0)
        throw std::invalid_argument("cost fields must be non-negative");
    if (params.beta < 0.0 || params.beta > 1.0)
        throw std::invalid_argument("beta must be in [0,1]");
    if (!(params.scale_k > 0.0)) throw std::invalid_argument("scale_k must be positive");
    const double macs = static_cast<double>(cost.macs);
    const double footprint = static_cast<double>(cost.footprint());
    return params.scale_k * std::pow(macs, 1.0 - params.beta) * std::pow(footprint, params.beta);
}

}  // namespace gconvplan
