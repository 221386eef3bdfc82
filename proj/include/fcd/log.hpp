// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iostream>
#include <string>

#include <json.hpp>

namespace fcd {

/// Line-delimited JSON log records on stderr. Data always goes to files;
/// stderr is for humans and log scrapers only.
inline void log_json(const std::string& level, const std::string& stage, const std::string& msg,
                     nlohmann::json extra = nlohmann::json::object()) {
    nlohmann::json rec = {{"level", level}, {"stage", stage}, {"msg", msg}};
    for (auto& [k, v] : extra.items()) rec[k] = v;
    std::cerr << rec.dump() << "\n";
}

inline void log_info(const std::string& stage, const std::string& msg,
                     nlohmann::json extra = nlohmann::json::object()) {
    log_json("info", stage, msg, std::move(extra));
}

inline void log_warn(const std::string& stage, const std::string& msg,
                     nlohmann::json extra = nlohmann::json::object()) {
    log_json("warn", stage, msg, std::move(extra));
}

inline void log_error(const std::string& stage, const std::string& msg,
                      nlohmann::json extra = nlohmann::json::object()) {
    log_json("error", stage, msg, std::move(extra));
}

} // namespace fcd
