#pragma once

namespace polyart {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;

}  // namespace polyart
