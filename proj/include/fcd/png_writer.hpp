// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcd/datacube.hpp"

namespace fcd {

/// Minimal 8-bit RGB PNG encoder (zlib-deflated, filter 0).
void write_png_rgb(const std::string& path, const uint8_t* rgb, int width, int height);

/// Change-map rendering: no-change pixels white, low-coverage pixels light
/// gray, changed pixels colored by change_index / (n_time - 1) on the
/// viridis ramp (early changes dark violet, late changes yellow).
void render_change_map_png(const std::string& path, const ChangeMap& map, int n_time);

/// Viridis sample at t in [0, 1].
void viridis(double t, uint8_t rgb[3]);

} // namespace fcd
