// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gconvplan {

Tensor4 dense_conv_reference(const Tensor4& x, const GroupedWeights& w, int stride, int padding) {
    if (w.groups != 1) throw std::invalid_argument("dense reference requires groups == 1");
    if (w.channels_per_group != x.c) throw std::invalid_argument("channel mismatch");
    const int out_h = (x.h + 2 * padding - w.kernel_h) / stride + 1;
    const int out_w = (x.w + 2 * padding - w.kernel_w) / stride + 1;
    Tensor4 y(x.n, w.out_channels, out_h, out_w);
    for (int b = 0; b < x.n; ++b)
        for (int oc = 0; oc < w.out_channels; ++oc)
            for (int oy = 0; oy < out_h; ++oy)
                for (int ox = 0; ox < out_w; ++ox) {
                    double acc = 0.0;
                    for (int ic = 0; ic < x.c; ++ic)
                        for (int ky = 0; ky < w.kernel_h; ++ky)
                            for (int kx = 0; kx < w.kernel_w; ++kx) {
                                const int iy = oy * stride + ky - padding;
                                const int ix = ox * stride + kx - padding;
                                if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
                                acc += x.at(b, ic, iy, ix) * w.at(oc, ic, ky, kx);
                            }
                    y.at(b, oc, oy, ox) = acc;
                }
    return y;
}

bool VerificationResult::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const VerificationCheck& c) { return c.passed; });
}

namespace {

struct RandomConfig {
    int batch, groups, in_c, out_c, h, w, kh, kw, stride, padding;
};

RandomConfig draw_config(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    RandomConfig cfg;
    cfg.batch = pick(1, 2);
    const int group_choices[] = {1, 2, 4, 8};
    cfg.groups = group_choices[pick(0, 3)];
    cfg.in_c = cfg.groups * pick(1, std::max(1, 16 / cfg.groups));
    cfg.out_c = cfg.groups * pick(1, std::max(1, 16 / cfg.groups));
    cfg.kh = pick(1, 3);
    cfg.kw = pick(1, 3);
    cfg.stride = pick(1, 2);
    cfg.padding = pick(0, 2);
    // Draw spatial extents that give a positive integral output size.
    do {
        cfg.h = pick(1, 8);
    } while ((cfg.h + 2 * cfg.padding - cfg.kh) < 0 ||
             (cfg.h + 2 * cfg.padding - cfg.kh) % cfg.stride != 0);
    do {
        cfg.w = pick(1, 8);
    } while ((cfg.w + 2 * cfg.padding - cfg.kw) < 0 ||
             (cfg.w + 2 * cfg.padding - cfg.kw) % cfg.stride != 0);
    return cfg;
}

void fill_random(std::vector<double>& data, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : data) v = dist(rng);
}

double max_abs_diff(const Tensor4& a, const Tensor4& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

VerificationResult run_kernel_verification(std::uint64_t seed, int num_configs) {
    VerificationResult result;
    std::mt19937_64 rng(seed);

    double worst_equiv = 0.0;
    int counter_mismatches = 0;
    for (int i = 0; i < num_configs; ++i) {
        const RandomConfig cfg = draw_config(rng);
        Tensor4 x(cfg.batch, cfg.in_c, cfg.h, cfg.w);
        GroupedWeights w(cfg.out_c, cfg.in_c / cfg.groups, cfg.kh, cfg.kw, cfg.groups);
        fill_random(x.data, rng);
        fill_random(w.data, rng);

        MacCounter counter;
        const Tensor4 grouped = conv2d_grouped(x, w, cfg.stride, cfg.padding, counter);
        const Tensor4 dense = dense_conv_reference(x, block_diag_expand(w), cfg.stride, cfg.padding);
        worst_equiv = std::max(worst_equiv, max_abs_diff(grouped, dense));

        const std::int64_t expected =
            static_cast<std::int64_t>(cfg.batch) * cfg.out_c * (cfg.in_c / cfg.groups) * cfg.kh *
            cfg.kw * grouped.h * grouped.w;
        if (counter.count != expected) ++counter_mismatches;
    }
    result.configs_run = num_configs;
    {
        std::ostringstream detail;
        detail << "max |grouped - dense| = " << worst_equiv << " over " << num_configs
               << " configs";
        result.checks.push_back(
            {"grouped equals dense on block-diagonal weights", worst_equiv <= 1e-12, detail.str()});
    }
    result.checks.push_back({"MAC counter matches analytic count exactly", counter_mismatches == 0,
                             std::to_string(counter_mismatches) + " mismatching configs"});

    // Linearity: conv(a*x + b*y) == a*conv(x) + b*conv(y).
    {
        std::mt19937_64 lin_rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const RandomConfig cfg = draw_config(lin_rng);
            Tensor4 x(cfg.batch, cfg.in_c, cfg.h, cfg.w);
            Tensor4 y(cfg.batch, cfg.in_c, cfg.h, cfg.w);
            GroupedWeights w(cfg.out_c, cfg.in_c / cfg.groups, cfg.kh, cfg.kw, cfg.groups);
            fill_random(x.data, lin_rng);
            fill_random(y.data, lin_rng);
            fill_random(w.data, lin_rng);
            const double a = dist(lin_rng);
            const double b = dist(lin_rng);
            Tensor4 mixed = x;
            for (std::size_t j = 0; j < mixed.data.size(); ++j)
                mixed.data[j] = a * x.data[j] + b * y.data[j];
            MacCounter unused;
            const Tensor4 lhs = conv2d_grouped(mixed, w, cfg.stride, cfg.padding, unused);
            Tensor4 rhs = conv2d_grouped(x, w, cfg.stride, cfg.padding, unused);
            const Tensor4 cy = conv2d_grouped(y, w, cfg.stride, cfg.padding, unused);
            for (std::size_t j = 0; j < rhs.data.size(); ++j)
                rhs.data[j] = a * rhs.data[j] + b * cy.data[j];
            worst = std::max(worst, max_abs_diff(lhs, rhs));
        }
        std::ostringstream detail;
        detail << "max deviation = " << worst;
        result.checks.push_back({"linearity in the input", worst <= 1e-10, detail.str()});
    }

    // Group locality: perturbing an input channel of group i moves only
    // output channels of group i.
    {
        std::mt19937_64 loc_rng(seed ^ 0xc2b2ae3d27d4eb4full);
        bool local = true;
        for (int i = 0; i < 20 && local; ++i) {
            RandomConfig cfg = draw_config(loc_rng);
            if (cfg.groups == 1) {
                cfg.groups = 2;
                cfg.in_c = 4;
                cfg.out_c = 4;
            }
            Tensor4 x(cfg.batch, cfg.in_c, cfg.h, cfg.w);
            GroupedWeights w(cfg.out_c, cfg.in_c / cfg.groups, cfg.kh, cfg.kw, cfg.groups);
            fill_random(x.data, loc_rng);
            fill_random(w.data, loc_rng);
            MacCounter unused;
            const Tensor4 base = conv2d_grouped(x, w, cfg.stride, cfg.padding, unused);

            const int group = std::uniform_int_distribution<int>(0, cfg.groups - 1)(loc_rng);
            const int channel = group * (cfg.in_c / cfg.groups);
            x.at(0, channel, 0, 0) += 1.0;
            const Tensor4 bumped = conv2d_grouped(x, w, cfg.stride, cfg.padding, unused);

            const int out_per_group = cfg.out_c / cfg.groups;
            for (int oc = 0; oc < cfg.out_c && local; ++oc) {
                if (oc / out_per_group == group) continue;
                for (int b = 0; b < cfg.batch && local; ++b)
                    for (int oy = 0; oy < base.h && local; ++oy)
                        for (int ox = 0; ox < base.w && local; ++ox)
                            if (base.at(b, oc, oy, ox) != bumped.at(b, oc, oy, ox)) local = false;
            }
        }
        result.checks.push_back({"group locality", local,
                                 local ? "foreign-group outputs unchanged" : "leak detected"});
    }

    // Determinism: identical inputs give bit-identical outputs.
    {
        std::mt19937_64 det_rng(seed ^ 0x165667b19e3779f9ull);
        const RandomConfig cfg = draw_config(det_rng);
        Tensor4 x(cfg.batch, cfg.in_c, cfg.h, cfg.w);
        GroupedWeights w(cfg.out_c, cfg.in_c / cfg.groups, cfg.kh, cfg.kw, cfg.groups);
        fill_random(x.data, det_rng);
        fill_random(w.data, det_rng);
        MacCounter c1, c2;
        const Tensor4 first = conv2d_grouped(x, w, cfg.stride, cfg.padding, c1);
        const Tensor4 second = conv2d_grouped(x, w, cfg.stride, cfg.padding, c2);
        const bool identical = first.data == second.data && c1.count == c2.count;
        result.checks.push_back({"determinism", identical,
                                 identical ? "repeated runs bit-identical" : "outputs differ"});
    }

    return result;
}

}  // namespace gconvplan
