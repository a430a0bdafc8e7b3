#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homog/correctors.hpp"

namespace homog {

/// One field file: a JSON header next to a binary payload (same stem, .bin)
/// of little-endian float64, component-major, each component row-major.
struct FieldFile {
  std::size_t dim = 2;
  std::size_t n = 0;
  std::string kind;  // "coefficients" | "corrector" | "psi"
  int order = 0;
  /// Multi-index per component (for coefficients: the pair (i, j) per entry).
  std::vector<std::vector<int>> components;
  std::vector<double> payload;
  double lambda = 0;  // coefficients only
  std::string description;
};

std::uint64_t fnv1a64(const void* data, std::size_t bytes);

void write_field_file(const std::filesystem::path& header, const FieldFile& f);
/// Validates header fields, payload size and checksum; FormatError names the file.
FieldFile read_field_file(const std::filesystem::path& header);

void write_coefficient_field(const std::filesystem::path& header, const CoefficientField& a);
CoefficientField read_coefficient_field(const std::filesystem::path& header);

/// Writes manifest.json, coefficients.{json,bin} and phi_<m>.{json,bin} into dir.
/// Returns the manifest path.
std::filesystem::path write_corrector_table(const CorrectorTable& t, const std::filesystem::path& dir);
CorrectorTable read_corrector_table(const std::filesystem::path& manifest);

}  // namespace homog
