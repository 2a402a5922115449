// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "gconvplan/layer.hpp"

namespace gconvplan {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Network JSON schema (schema_version 1):
///   {schema_version, name,
///    layers: [{id, kind, in_channels, out_channels, kernel: [kh, kw],
///              stride, padding, ofmap: [h, w], groups, bias, batchnorm}],
///    substitution_sites: [[id, id], ...]}
/// Unknown fields are rejected with the offending key path; duplicate layer
/// ids are a parse error. Emission uses canonical key order and two-space
/// indentation, so emit -> parse -> emit is byte-identical.
std::string network_to_json_text(const NetworkSpec& net);
NetworkSpec network_from_json_text(const std::string& text);

NetworkSpec parse_network_json(const std::filesystem::path& path);
void emit_network_json(const NetworkSpec& net, const std::filesystem::path& path);

}  // namespace gconvplan
