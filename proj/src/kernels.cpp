// SPDX-License-Identifier: Apache-2.0
#include "gconvplan/kernels.hpp"

#include <stdexcept>
#include <string>

namespace gconvplan {

Tensor4::Tensor4(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 1 || c < 1 || h < 1 || w < 1)
        throw std::invalid_argument("tensor dimensions must be >= 1");
    data.assign(static_cast<std::size_t>(n) * c * h * w, 0.0);
}

GroupedWeights::GroupedWeights(int out, int cpg, int kh, int kw, int g)
    : out_channels(out), channels_per_group(cpg), kernel_h(kh), kernel_w(kw), groups(g) {
    if (out < 1 || cpg < 1 || kh < 1 || kw < 1 || g < 1)
        throw std::invalid_argument("weight dimensions must be >= 1");
    if (out % g != 0) throw std::invalid_argument("groups must divide out_channels");
    data.assign(static_cast<std::size_t>(out) * cpg * kh * kw, 0.0);
}

namespace {

int output_extent(int in, int kernel, int stride, int padding, const char* axis) {
    const int span = in + 2 * padding - kernel;
    if (span < 0)
        throw std::invalid_argument(std::string("kernel larger than padded input along ") + axis);
    if (span % stride != 0)
        throw std::invalid_argument(std::string("non-integral output size along ") + axis);
    return span / stride + 1;
}

}  // namespace

Tensor4 conv2d_grouped(const Tensor4& x, const GroupedWeights& w, int stride, int padding,
                       MacCounter& counter) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (padding < 0) throw std::invalid_argument("padding must be >= 0");
    if (w.in_channels() != x.c)
        throw std::invalid_argument("weights expect " + std::to_string(w.in_channels()) +
                                    " input channels, tensor has " + std::to_string(x.c));
    if (w.out_channels % w.groups != 0)
        throw std::invalid_argument("groups must divide out_channels");

    const int out_h = output_extent(x.h, w.kernel_h, stride, padding, "height");
    const int out_w = output_extent(x.w, w.kernel_w, stride, padding, "width");
    const int out_per_group = w.out_channels / w.groups;

    Tensor4 y(x.n, w.out_channels, out_h, out_w);
    std::int64_t macs = 0;
    for (int b = 0; b < x.n; ++b) {
        for (int oc = 0; oc < w.out_channels; ++oc) {
            const int group = oc / out_per_group;
            const int in_base = group * w.channels_per_group;
            for (int oy = 0; oy < out_h; ++oy) {
                for (int ox = 0; ox < out_w; ++ox) {
                    double acc = 0.0;
                    for (int cg = 0; cg < w.channels_per_group; ++cg) {
                        for (int ky = 0; ky < w.kernel_h; ++ky) {
                            for (int kx = 0; kx < w.kernel_w; ++kx) {
                                const int iy = oy * stride + ky - padding;
                                const int ix = ox * stride + kx - padding;
                                // Padded taps multiply by zero but still
                                // count, so the counter matches the analytic
                                // MAC formula exactly.
                                const double v =
                                    (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w)
                                        ? x.at(b, in_base + cg, iy, ix)
                                        : 0.0;
                                acc += v * w.at(oc, cg, ky, kx);
                                ++macs;
                            }
                        }
                    }
                    y.at(b, oc, oy, ox) = acc;
                }
            }
        }
    }
    counter.count += macs;
    return y;
}

GroupedWeights block_diag_expand(const GroupedWeights& w) {
    if (w.groups == 1) return w;
    const int in_c = w.in_channels();
    const int out_per_group = w.out_channels / w.groups;
    GroupedWeights dense(w.out_channels, in_c, w.kernel_h, w.kernel_w, 1);
    for (int oc = 0; oc < w.out_channels; ++oc) {
        const int group = oc / out_per_group;
        for (int cg = 0; cg < w.channels_per_group; ++cg)
            for (int ky = 0; ky < w.kernel_h; ++ky)
                for (int kx = 0; kx < w.kernel_w; ++kx)
                    dense.at(oc, group * w.channels_per_group + cg, ky, kx) = w.at(oc, cg, ky, kx);
    }
    return dense;
}

Tensor4 module_forward(const Tensor4& x, const GroupedWeights& w3, const GroupedWeights& w1,
                       MacCounter& counter, int stride, int padding) {
    if (w1.kernel_h != 1 || w1.kernel_w != 1)
        throw std::invalid_argument("pointwise weights must be 1x1");
    if (w1.groups != 1) throw std::invalid_argument("pointwise layer must be dense (groups = 1)");
    if (w1.in_channels() != w3.out_channels)
        throw std::invalid_argument("pointwise input channels must match grouped output channels");
    const Tensor4 mid = conv2d_grouped(x, w3, stride, padding, counter);
    return conv2d_grouped(mid, w1, 1, 0, counter);
}

}  // namespace gconvplan
