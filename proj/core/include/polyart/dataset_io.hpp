#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "polyart/dataset.hpp"

namespace polyart {

enum class DatasetFormat { CanonicalJson, Csv };

/// Frame size assumed for CSV imports when none is given (CSV rows carry
/// no image dimensions).
inline constexpr ImageSize kDefaultCsvFrameSize{1920, 1080};

/// Loads a dataset, dispatching on format. Throws IoError when the file
/// cannot be read, ParseError on malformed content (the message carries
/// the record locus) and InvariantError on invalid values (bad boxes,
/// duplicate frame ids).
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

Dataset load_dataset_json(const std::filesystem::path& path);

/// CSV import for spreadsheet-born annotations. One row per annotation:
///   frame_id,label,score,x_min,y_min,x_max,y_max
/// with label one of "polyp_gt", "polyp", or an artifact class name.
/// A header row is skipped when present. Frames appear in first-mention
/// order and all share `frame_size`.
Dataset load_dataset_csv(const std::filesystem::path& path,
                         ImageSize frame_size = kDefaultCsvFrameSize);

/// Writes the canonical JSON form: schema version 1, keys sorted, UTF-8,
/// newline-terminated. load(save(d)) == d and repeated saves are
/// byte-identical.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

/// The exact bytes save_dataset writes.
std::string dataset_to_json_string(const Dataset& d);

/// Parses canonical JSON from memory; `source_name` names the input in
/// error messages.
Dataset dataset_from_json_string(std::string_view text,
                                 std::string_view source_name);

}  // namespace polyart
