// Copyright 2026 The HGC Authors. All Rights Reserved.
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

#include "hgc/dataset_io.hpp"

#include <unistd.h>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hgc/digest.hpp"

namespace hgc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.filename().string() + ": missing or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Calls fn(line_number, line) for every non-empty line.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) fn(line_no, line);
    pos = end + 1;
  }
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void fail_at(const std::string& file, std::size_t line, const std::string& msg) {
  throw DataError(file + ":" + std::to_string(line) + ": " + msg);
}

void put_u32le(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputeError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ComputeError("I/O failure writing " + path.string());
}

fs::path staging_path(const fs::path& target) {
  const fs::path abs = fs::absolute(target);
  return abs.parent_path() / ("." + abs.filename().string() + ".tmp-" + std::to_string(::getpid()));
}

}  // namespace

std::string edge_file_name(const EdgeType& e) { return "edges_" + e.name + ".tsv"; }
std::string feature_file_name(const NodeType& t) { return "features_" + t.name + ".bin"; }

void write_feature_bin(const fs::path& path, const FeatureMatrix& m) {
  std::string buf;
  buf.reserve(12 + m.data().size() * 4);
  buf.append("HGF1");
  put_u32le(buf, static_cast<std::uint32_t>(m.rows()));
  put_u32le(buf, static_cast<std::uint32_t>(m.cols()));
  for (float f : m.data()) put_u32le(buf, std::bit_cast<std::uint32_t>(f));
  write_file(path, buf);
}

FeatureMatrix read_feature_bin(const fs::path& path) {
  const std::string name = path.filename().string();
  const std::string bytes = read_text(path);
  if (bytes.size() < 12 || bytes.compare(0, 4, "HGF1") != 0) {
    throw DataError(name + ": bad header (expected magic HGF1)");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t rows = get_u32le(p + 4);
  const std::uint32_t cols = get_u32le(p + 8);
  const std::size_t expected = 12 + std::size_t{rows} * cols * 4;
  if (bytes.size() != expected) {
    throw DataError(name + ": size " + std::to_string(bytes.size()) + " bytes, header implies " +
                    std::to_string(expected));
  }
  FeatureMatrix m(rows, cols);
  auto data = m.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32le(p + 12 + 4 * i));
    if (!std::isfinite(data[i])) {
      throw DataError(name + ": non-finite feature value at (" + std::to_string(i / std::max<std::size_t>(cols, 1)) +
                      ", " + std::to_string(i % std::max<std::size_t>(cols, 1)) + ")");
    }
  }
  return m;
}

FeatureMatrix read_feature_csv(const fs::path& path) {
  const std::string name = path.filename().string();
  const std::string text = read_text(path);
  std::vector<float> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_fields(line, ',');
    if (rows == 0) cols = fields.size();
    if (fields.size() != cols) {
      fail_at(name, line_no, "expected " + std::to_string(cols) + " columns, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto f = fields[c];
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      float v = 0.0f;
      if (!parse_number(f, v)) fail_at(name, line_no, "cannot parse '" + std::string(f) + "'");
      if (!std::isfinite(v)) {
        fail_at(name, line_no, "non-finite feature value at (" + std::to_string(rows) + ", " + std::to_string(c) + ")");
      }
      values.push_back(v);
    }
    ++rows;
  });
  return FeatureMatrix(rows, cols, std::move(values));
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestFile;
  if (!fs::exists(path)) throw DataError(std::string(kManifestFile) + ": missing in " + dir.string());
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(std::string(kManifestFile) + ": " + e.what());
  }
}

HeteroGraph load_dataset(const fs::path& dir, ValidationReport* warnings) {
  const json manifest = read_manifest(dir);
  const json checksums = manifest.value("checksums", json::object());

  auto verify = [&](const std::string& file) {
    if (!checksums.contains(file)) return;
    const std::string actual = sha256_file(dir / file);
    if (checksums[file].get<std::string>() != actual) {
      throw DataError(file + ": checksum mismatch with manifest");
    }
  };

  HeteroGraph g;
  try {
    for (const auto& nt : manifest.at("node_types")) {
      g.node_types.push_back({nt.at("name").get<std::string>(), nt.at("count").get<std::size_t>()});
    }
    for (const auto& et : manifest.at("edge_types")) {
      EdgeType e;
      e.name = et.at("name").get<std::string>();
      const auto src = g.find_node_type(et.at("src").get<std::string>());
      const auto dst = g.find_node_type(et.at("dst").get<std::string>());
      if (!src || !dst) {
        throw DataError(std::string(kManifestFile) + ": edge type '" + e.name +
                        "' references an undeclared node type");
      }
      e.src = *src;
      e.dst = *dst;
      g.edge_types.push_back(e);
    }
    if (!g.node_types.empty()) g.target = g.node_type_id(manifest.at("target").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(std::string(kManifestFile) + ": " + e.what());
  }
  const int num_classes = manifest.value("num_classes", 0);

  // Edges.
  const auto& edge_specs = manifest.at("edge_types");
  for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
    const auto& et = g.edge_types[e];
    const std::string file = edge_file_name(et);
    verify(file);
    const std::string text = read_text(dir / file);
    const std::size_t rows = g.node_types[et.src].count;
    const std::size_t cols = g.node_types[et.dst].count;
    std::vector<EdgeRecord> edges;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      const auto f = split_fields(line, '\t');
      if (f.size() != 2 && f.size() != 3) fail_at(file, line_no, "expected src<TAB>dst[<TAB>weight]");
      EdgeRecord r;
      if (!parse_number(f[0], r.src) || !parse_number(f[1], r.dst)) {
        fail_at(file, line_no, "cannot parse node ids");
      }
      if (f.size() == 3 && !parse_number(f[2], r.value)) fail_at(file, line_no, "cannot parse weight");
      if (!std::isfinite(r.value) || r.value <= 0.0) fail_at(file, line_no, "weight must be finite and positive");
      if (r.src >= rows) {
        fail_at(file, line_no, "dangling endpoint: src id " + std::to_string(r.src) + " >= " +
                                   g.node_types[et.src].name + " count " + std::to_string(rows));
      }
      if (r.dst >= cols) {
        fail_at(file, line_no, "dangling endpoint: dst id " + std::to_string(r.dst) + " >= " +
                                   g.node_types[et.dst].name + " count " + std::to_string(cols));
      }
      edges.push_back(r);
    });
    const auto declared = edge_specs[e].value("count", edges.size());
    if (declared != edges.size()) {
      throw DataError(file + ": " + std::to_string(edges.size()) + " records but manifest declares " +
                      std::to_string(declared));
    }
    std::size_t merged = 0;
    g.adjacency.push_back(SparseAdjacency::from_edges(rows, cols, std::move(edges), &merged));
    if (merged > 0 && warnings) {
      warnings->findings.push_back({Severity::warning, "duplicate_edge", file,
                                    std::to_string(merged) + " duplicate pairs merged (values summed)"});
    }
  }

  // Features.
  const auto& node_specs = manifest.at("node_types");
  for (std::size_t t = 0; t < g.node_types.size(); ++t) {
    const auto& spec = node_specs[t];
    if (!spec.contains("feature_dim") || spec["feature_dim"].is_null()) {
      g.features.emplace_back(std::nullopt);
      continue;
    }
    const std::size_t dim = spec["feature_dim"].get<std::size_t>();
    const std::string bin = feature_file_name(g.node_types[t]);
    const std::string csv = "features_" + g.node_types[t].name + ".csv";
    FeatureMatrix m;
    std::string used;
    if (fs::exists(dir / bin)) {
      used = bin;
      verify(bin);
      m = read_feature_bin(dir / bin);
    } else if (fs::exists(dir / csv)) {
      used = csv;
      verify(csv);
      m = read_feature_csv(dir / csv);
      if (m.rows() == 0) m = FeatureMatrix(0, dim);
    } else {
      throw DataError(bin + ": missing (and no " + csv + " fallback)");
    }
    if (m.rows() != g.node_types[t].count || m.cols() != dim) {
      throw DataError(used + ": shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      " but manifest declares " + std::to_string(g.node_types[t].count) + "x" +
                      std::to_string(dim));
    }
    g.features.emplace_back(std::move(m));
  }

  if (g.node_types.empty()) {
    g.labels = Labels(0, num_classes);
    return g;
  }

  // Labels and splits.
  const std::size_t n_target = g.node_types[g.target].count;
  g.labels = Labels(n_target, num_classes);
  {
    verify(kLabelsFile);
    const std::string text = read_text(dir / kLabelsFile);
    std::vector<std::uint8_t> seen(n_target, 0);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      const auto f = split_fields(line, '\t');
      NodeId v = 0;
      ClassId c = 0;
      if (f.size() != 2 || !parse_number(f[0], v) || !parse_number(f[1], c)) {
        fail_at(kLabelsFile, line_no, "expected node_id<TAB>class_id");
      }
      if (v >= n_target) fail_at(kLabelsFile, line_no, "dangling endpoint: node id " + std::to_string(v) + " out of range");
      if (c < 0 || c >= num_classes) fail_at(kLabelsFile, line_no, "class id " + std::to_string(c) + " out of range");
      if (seen[v]) fail_at(kLabelsFile, line_no, "node " + std::to_string(v) + " labeled twice");
      seen[v] = 1;
      g.labels.set_class(v, c);
    });
  }
  {
    verify(kSplitsFile);
    const std::string text = read_text(dir / kSplitsFile);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
      const auto f = split_fields(line, '\t');
      NodeId v = 0;
      if (f.size() != 2 || !parse_number(f[0], v)) fail_at(kSplitsFile, line_no, "expected node_id<TAB>split");
      const auto s = parse_split(f[1]);
      if (!s) fail_at(kSplitsFile, line_no, "unknown split '" + std::string(f[1]) + "'");
      if (v >= n_target) fail_at(kSplitsFile, line_no, "dangling endpoint: node id " + std::to_string(v) + " out of range");
      if (!g.labels.labeled(v)) fail_at(kSplitsFile, line_no, "node " + std::to_string(v) + " has a split but no label");
      if (g.labels.split_of(v) != Split::none) {
        fail_at(kSplitsFile, line_no, "node " + std::to_string(v) + " appears in more than one split");
      }
      g.labels.set_split(v, *s);
    });
  }

  const ValidationReport rep = validate(g);
  if (!rep.ok()) throw DataError("validation failed:\n" + rep.to_string());
  if (warnings) {
    for (const auto& f : rep.findings) warnings->findings.push_back(f);
  }
  return g;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = staging_path(path);
  write_file(tmp, text);
  fs::rename(tmp, path);
}

void save_dataset(const HeteroGraph& g, const fs::path& dir, const json& provenance, bool overwrite) {
  const ValidationReport rep = validate(g);
  if (!rep.ok()) throw DataError("refusing to save an invalid graph:\n" + rep.to_string());

  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir)) && !overwrite) {
    throw UsageError("refusing to overwrite existing non-empty " + dir.string() +
                     " (pass the overwrite flag)");
  }

  const fs::path stage = staging_path(dir);
  fs::remove_all(stage);
  fs::create_directories(stage);
  try {
    json manifest;
    json checksums = json::object();
    auto emit = [&](const std::string& file, const std::string& bytes) {
      write_file(stage / file, bytes);
      checksums[file] = sha256_hex(bytes);
    };

    json node_types = json::array();
    for (std::size_t t = 0; t < g.node_types.size(); ++t) {
      json nt = {{"name", g.node_types[t].name}, {"count", g.node_types[t].count}};
      nt["feature_dim"] = g.features[t] ? json(g.features[t]->cols()) : json(nullptr);
      node_types.push_back(std::move(nt));
      if (g.features[t]) {
        const std::string file = feature_file_name(g.node_types[t]);
        write_feature_bin(stage / file, *g.features[t]);
        checksums[file] = sha256_file(stage / file);
      }
    }
    json edge_types = json::array();
    for (std::size_t e = 0; e < g.edge_types.size(); ++e) {
      const auto& et = g.edge_types[e];
      const auto& a = g.adjacency[e];
      edge_types.push_back({{"name", et.name},
                            {"src", g.node_types[et.src].name},
                            {"dst", g.node_types[et.dst].name},
                            {"count", a.nnz()}});
      std::string text;
      text.reserve(a.nnz() * 12);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto idx = a.row_indices(r);
        const auto val = a.row_values(r);
        for (std::size_t k = 0; k < idx.size(); ++k) {
          text += std::to_string(r);
          text += '\t';
          text += std::to_string(idx[k]);
          if (val[k] != 1.0) {
            text += '\t';
            text += format_double(val[k]);
          }
          text += '\n';
        }
      }
      emit(edge_file_name(et), text);
    }

    std::string labels;
    std::string splits;
    for (std::size_t v = 0; v < g.labels.size(); ++v) {
      const auto id = static_cast<NodeId>(v);
      if (!g.labels.labeled(id)) continue;
      labels += std::to_string(v) + '\t' + std::to_string(g.labels.class_of(id)) + '\n';
      if (g.labels.split_of(id) != Split::none) {
        splits += std::to_string(v) + '\t' + std::string(to_string(g.labels.split_of(id))) + '\n';
      }
    }
    emit(kLabelsFile, labels);
    emit(kSplitsFile, splits);

    manifest["format"] = "hgc-dataset";
    manifest["version"] = 1;
    manifest["node_types"] = std::move(node_types);
    manifest["edge_types"] = std::move(edge_types);
    manifest["target"] = g.node_types.empty() ? json(nullptr) : json(g.node_types[g.target].name);
    manifest["num_classes"] = g.labels.num_classes();
    manifest["checksums"] = std::move(checksums);
    if (!provenance.is_null() && !provenance.empty()) manifest["provenance"] = provenance;
    write_file(stage / kManifestFile, manifest.dump(2) + "\n");

    if (fs::exists(dir)) {
      const fs::path old = staging_path(dir).string() + ".old";
      fs::rename(dir, old);
      fs::rename(stage, dir);
      fs::remove_all(old);
    } else {
      if (dir.has_parent_path()) fs::create_directories(fs::absolute(dir).parent_path());
      fs::rename(stage, dir);
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(stage, ec);
    throw;
  }
}

}  // namespace hgc
