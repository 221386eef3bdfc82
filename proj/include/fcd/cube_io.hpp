// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Bit-exact file formats:
//   cube.json + cube.bin     raw IEEE-754 binary32 LE, t slowest -> x fastest
//   mask.json + mask.bin     one byte per pixel, row-major, 0/1
//   changes.json + changes.bin (int32 LE, -1 sentinel) + changes.csv
//     + changes.png + changes_lowcov.bin
//   ref.json + ref.bin       int32 LE index into the manifest's date table
//
// Write-then-read is the identity (NaN bit patterns included). Every
// malformed input raises validation_error/io_error naming the field.

#pragma once

#include <string>
#include <vector>

#include "fcd/datacube.hpp"

namespace fcd {

DataCube read_cube(const std::string& manifest_path);
CubeManifest write_cube(const DataCube& cube, const std::string& dir);

ForestMask read_mask(const std::string& json_path);
void write_mask(const ForestMask& mask, const std::string& json_path);

/// Emits changes.{json,bin,csv,png} (+ changes_lowcov.bin) into dir.
/// `dates` provides the calendar context for change_date and the PNG ramp.
void write_change_map(const ChangeMap& map, const std::vector<Date>& dates,
                      const std::string& dir);
ChangeMap read_change_map(const std::string& json_path, std::vector<Date>* dates_out = nullptr);

ReferenceChangeMap read_reference_map(const std::string& json_path);
void write_reference_map(const ReferenceChangeMap& ref, const std::string& json_path);

// Low-level helpers shared by the format implementations.
std::vector<char> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const void* data, size_t bytes);

} // namespace fcd
