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


#include "mmtqa/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mmtqa/errors.hpp"

namespace mmtqa::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const Metadata& meta,
                     const std::vector<std::string>& columns)
    : out_(out), width_(columns.size()) {
  out_ << "# mmtqa " << kVersion;
  for (const auto& [k, v] : meta) out_ << ' ' << k << '=' << v;
  out_ << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw DimensionMismatch("CSV row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmax > xmin)) { xmin -= 1; xmax += 1; }
  if (!(ymax > ymin)) { ymin -= 1; ymax += 1; }
  const double ml = 70, mr = 20, mt = 30, mb = 50;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
    << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << spec.width / 2 << "\" y=\"18\" text-anchor=\"middle\">" << escape(spec.title)
    << "</text>\n";
  o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"15\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << mt + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    o << "<text x=\"" << px(xv) << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">" << buf
      << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    o << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf
      << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    const auto& sr = series[s];
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) { flush(); continue; }
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(sr.x[i]), py(sr.y[i]));
      pts += buf;
    }
    flush();
    o << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 + 14 * s << "\" fill=\"" << color << "\">"
      << escape(sr.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << contents;
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace mmtqa::io
