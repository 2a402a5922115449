// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace gconvplan {

/// Dense rank-4 array (batch, channels, height, width), row-major doubles.
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_);

    std::size_t size() const { return data.size(); }
    double& at(int b, int ch, int y, int x) {
        return data[((static_cast<std::size_t>(b) * c + ch) * h + y) * w + x];
    }
    double at(int b, int ch, int y, int x) const {
        return data[((static_cast<std::size_t>(b) * c + ch) * h + y) * w + x];
    }
};

/// Weights of a grouped convolution: out_channels filters, each seeing
/// channels_per_group input channels (the group size). The consumed input
/// must have channels_per_group * groups channels.
struct GroupedWeights {
    int out_channels = 0;
    int channels_per_group = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int groups = 1;
    std::vector<double> data;  // [out][channel_in_group][kh][kw]

    GroupedWeights() = default;
    GroupedWeights(int out, int cpg, int kh, int kw, int g);

    int in_channels() const { return channels_per_group * groups; }
    double& at(int oc, int cg, int ky, int kx) {
        return data[((static_cast<std::size_t>(oc) * channels_per_group + cg) * kernel_h + ky) *
                        kernel_w +
                    kx];
    }
    double at(int oc, int cg, int ky, int kx) const {
        return data[((static_cast<std::size_t>(oc) * channels_per_group + cg) * kernel_h + ky) *
                        kernel_w +
                    kx];
    }
};

/// Counts multiply-accumulate pairs actually executed by the kernels.
struct MacCounter {
    std::int64_t count = 0;
};

/// Naive grouped convolution forward pass, zero padding, no bias. Group i of
/// the filters sees only input-channel group i. Out-of-bounds (padded) taps
/// are multiplications by zero and still count as MACs, so the counter lands
/// exactly on out_c * channels_per_group * kh * kw * out_h * out_w * batch.
/// Accumulation runs in the natural output-stationary loop order; results
/// are deterministic. Throws std::invalid_argument on shape mismatches or a
/// non-integral output size.
Tensor4 conv2d_grouped(const Tensor4& x, const GroupedWeights& w, int stride, int padding,
                       MacCounter& counter);

/// Embed grouped weights into a dense (groups = 1) weight tensor that is
/// zero off the block diagonal. A dense input is returned unchanged.
GroupedWeights block_diag_expand(const GroupedWeights& w);

/// Grouped 3x3 followed by a dense pointwise 1x1 (which mixes information
/// across all groups). stride/padding apply to the first convolution; the
/// pointwise layer runs at stride 1 without padding. The counter accumulates
/// both layers.
Tensor4 module_forward(const Tensor4& x, const GroupedWeights& w3, const GroupedWeights& w1,
                       MacCounter& counter, int stride = 1, int padding = 1);

}  // namespace gconvplan
