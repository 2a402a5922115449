// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gconvplan/kernels.hpp"

namespace gconvplan {

/// Independent dense convolution used as ground truth for the grouped
/// kernel: a plain seven-loop accumulation over batch, output channel,
/// output position, input channel and kernel taps. Requires groups == 1.
/// Deliberately shares no code path with conv2d_grouped.
Tensor4 dense_conv_reference(const Tensor4& x, const GroupedWeights& w, int stride, int padding);

struct VerificationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerificationResult {
    std::vector<VerificationCheck> checks;
    int configs_run = 0;

    bool all_passed() const;
};

/// Randomized equivalence suite: for num_configs random small layer shapes,
/// checks that the grouped kernel matches the dense reference run on
/// block-diagonal-expanded weights (1e-12 absolute), that the MAC counter
/// lands exactly on the analytic count, plus linearity, group-locality and
/// determinism properties. The generator is fully determined by seed.
VerificationResult run_kernel_verification(std::uint64_t seed, int num_configs);

}  // namespace gconvplan
