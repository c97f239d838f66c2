#pragma once

#include "cellcast/model.hpp"

#include <filesystem>

namespace cellcast {

/// Model file layout (all integers little-endian):
///
///   offset  size  field
///   0       8     magic "CCMODEL\0"
///   8       4     u32 format version (kModelFormatVersion)
///   12      8     u64 length L of the JSON header
///   20      L     JSON header: {"network": {input_size, hidden_size,
///                 num_layers}, "train": TrainConfig, "covariates": CovariateSpec}
///   ...     8     u64 parameter count P
///   ...     8P    parameters, IEEE-754 binary64 bit patterns as u64
///   ...     8     u64 epoch count E
///   ...     8E    per-epoch mean NLL, binary64 bit patterns
///   ...     8     u64 FNV-1a 64 checksum of every preceding byte
void save_model(const TrainedModel& model, const std::filesystem::path& path);

/// Throws IoError if unreadable, VersionError on a foreign version and
/// CorruptFileError on bad magic, truncation or checksum mismatch.
TrainedModel load_model(const std::filesystem::path& path);

} // namespace cellcast
