// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fcd {

/// Malformed input data or parameters. `field()` names the offending
/// manifest key, parameter, or file so callers can report it precisely.
class validation_error : public std::runtime_error {
public:
    validation_error(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Filesystem-level failure (missing file, short read, write refused).
class io_error : public std::runtime_error {
public:
    io_error(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace fcd
