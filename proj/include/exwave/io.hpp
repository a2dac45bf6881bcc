// Copyright (c) 2026 exwave contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace exwave::io {

// Shortest round-trip decimal representation (printf %.17g).
std::string g17(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);  // formatted with g17

 private:
  std::ofstream out_;
  std::size_t n_cols_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

void write_text(const std::string& path, const std::string& content);

} // namespace exwave::io
