// Copyright 2026 The mmtqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MMTQA_IO_HPP
#define MMTQA_IO_HPP

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace mmtqa::io {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest-roundtrip-safe rendering of a double ("%.17g").
std::string format_double(double v);

/// Ordered key/value run metadata written as the leading comment line.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Writes "# mmtqa <version> key=value ..." followed by a column header and
/// rows of doubles.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const Metadata& meta, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 420;
};

/// Minimal line plot; non-finite points break the polyline.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

/// Writes `contents` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace mmtqa::io

#endif  // MMTQA_IO_HPP
