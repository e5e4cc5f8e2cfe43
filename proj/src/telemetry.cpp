// Copyright 2026 The vmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmsim/telemetry.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace vmsim {
namespace {

void AppendNumber(std::string& line, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

void AppendNumber(std::string& line, int v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

std::string FormatRow(const TelemetryRecord& r) {
  std::string line;
  line.reserve(768);
  bool first = true;
  VisitTelemetryColumns(r, [&](const char*, const auto& value) {
    if (!first) line.push_back(',');
    first = false;
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, std::string>) {
      line += value;  // mode names never contain separators or quotes
    } else {
      AppendNumber(line, value);
    }
  });
  line.push_back('\n');
  return line;
}

std::string Header() {
  std::string line;
  bool first = true;
  for (const auto& c : TelemetryColumns()) {
    if (!first) line.push_back(',');
    first = false;
    line += c;
  }
  line.push_back('\n');
  return line;
}

template <class T>
void ParseField(std::string_view text, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = std::string(text);
  } else {
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw std::runtime_error("telemetry csv: malformed number '" + std::string(text) + "'");
    }
  }
}

}  // namespace

const std::vector<std::string>& TelemetryColumns() {
  static const std::vector<std::string> kColumns = [] {
    std::vector<std::string> cols;
    TelemetryRecord r;
    VisitTelemetryColumns(r, [&](const char* name, auto&) { cols.emplace_back(name); });
    return cols;
  }();
  return kColumns;
}

TelemetryCsvWriter::TelemetryCsvWriter(std::ostream& out) : out_(out) { out_ << Header(); }

void TelemetryCsvWriter::Write(const TelemetryRecord& r) { out_ << FormatRow(r); }

void WriteTelemetryCsv(std::ostream& out, const std::vector<TelemetryRecord>& records) {
  TelemetryCsvWriter writer(out);
  for (const auto& r : records) writer.Write(r);
  if (!out) throw std::runtime_error("telemetry csv: write failed");
}

void WriteTelemetryCsvFile(const std::string& path, const std::vector<TelemetryRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("telemetry csv: cannot open " + path);
  WriteTelemetryCsv(out, records);
}

std::vector<TelemetryRecord> ReadTelemetryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line + "\n" != Header()) {
    throw std::runtime_error("telemetry csv: header does not match the schema");
  }
  std::vector<TelemetryRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TelemetryRecord r;
    std::string_view rest(line);
    std::size_t fields = 0;
    VisitTelemetryColumns(r, [&](const char* name, auto& value) {
      const auto comma = rest.find(',');
      const auto cell = rest.substr(0, comma);
      if (cell.empty() && comma == std::string_view::npos && fields > 0 && rest.empty()) {
        throw std::runtime_error(std::string("telemetry csv: missing column ") + name);
      }
      ParseField(cell, value);
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
      ++fields;
    });
    if (!rest.empty()) throw std::runtime_error("telemetry csv: too many columns");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TelemetryRecord> ReadTelemetryCsvFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("telemetry csv: cannot open " + path);
  return ReadTelemetryCsv(in);
}

}  // namespace vmsim
