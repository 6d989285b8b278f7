#pragma once

// JSON reading and writing for spectral data and polynomial prepotentials.
// The schema is described in docs/spectral_data_schema.md.

#include "singspec/curve.hpp"
#include "singspec/frobenius.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace singspec::io {

using nlohmann::json;

struct SpectralDocument {
  curve::SpectralData data;
  std::optional<curve::RationalDifferential> omega;
};

/// Throws SchemaError with the offending field in the message.
SpectralDocument spectral_from_json(const json& j);
json spectral_to_json(const curve::SpectralData& data, const std::optional<curve::RationalDifferential>& omega = {});

/// {N, eta, monomials: [{coeff, powers}], euler?: {degrees, d_F}}
frobenius::PrepotentialSpec prepotential_from_json(const json& j);

/// Parses a file; I/O and parse failures become SchemaError.
json read_json_file(const std::string& path);

}  // namespace singspec::io
