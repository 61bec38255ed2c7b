#include "hyperot/image.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hyperot/errors.hpp"
#include "hyperot/extract.hpp"
#include "hyperot/io.hpp"

namespace hyperot {
namespace {

using Kind = PgmError::Kind;

class PgmReader {
 public:
  explicit PgmReader(std::string_view data) : data_(data) {}

  // Skips whitespace and '#' comments.
  void skip_space() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::optional<long> integer() {
    skip_space();
    long value = 0;
    const char* first = data_.data() + pos_;
    const char* last = data_.data() + data_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) return std::nullopt;
    if (ptr != last && !std::isspace(static_cast<unsigned char>(*ptr)) && *ptr != '#') return std::nullopt;
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  bool at_end() {
    skip_space();
    return pos_ >= data_.size();
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::string_view data() const { return data_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

long header_field(PgmReader& r, const char* name, long lo, long hi) {
  const auto v = r.integer();
  if (!v) throw PgmError(Kind::MalformedHeader, std::string("PGM header: missing or non-numeric ") + name);
  if (*v < lo || *v > hi) throw PgmError(Kind::MalformedHeader, std::string("PGM header: ") + name + " out of range");
  return *v;
}

}  // namespace

GrayImage load_pgm(std::string_view bytes) {
  if (bytes.size() < 2) throw PgmError(Kind::MalformedHeader, "PGM header: input too short");
  if (bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw PgmError(Kind::UnsupportedMagic, "unsupported magic number '" + std::string(bytes.substr(0, 2)) + "'");
  }
  const bool binary = bytes[1] == '5';
  if (bytes.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes[2])) && bytes[2] != '#') {
    throw PgmError(Kind::MalformedHeader, "PGM header: no separator after magic number");
  }

  PgmReader r(bytes);
  r.advance(2);
  GrayImage img;
  img.width = static_cast<int>(header_field(r, "width", 1, 1 << 20));
  img.height = static_cast<int>(header_field(r, "height", 1, 1 << 20));
  img.max_val = static_cast<int>(header_field(r, "maxval", 1, 65535));
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);

  if (binary) {
    // exactly one whitespace byte separates the header from the raster
    if (r.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[r.pos()]))) {
      throw PgmError(Kind::MalformedHeader, "PGM header: missing separator before raster");
    }
    r.advance(1);
    const std::size_t bpp = img.max_val > 255 ? 2 : 1;
    if (bytes.size() - r.pos() < count * bpp) {
      throw PgmError(Kind::TruncatedPayload, "PGM raster truncated: expected " + std::to_string(count * bpp) +
                                                 " bytes, found " + std::to_string(bytes.size() - r.pos()));
    }
    const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + r.pos());
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bpp == 2 ? (raster[2 * i] << 8u) | raster[2 * i + 1] : raster[i];
      if (static_cast<int>(v) > img.max_val) throw PgmError(Kind::InvalidPixel, "pixel exceeds maxval");
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      if (r.at_end()) {
        throw PgmError(Kind::TruncatedPayload, "PGM raster truncated after " + std::to_string(i) + " of " +
                                                   std::to_string(count) + " values");
      }
      const auto v = r.integer();
      if (!v) throw PgmError(Kind::InvalidPixel, "non-numeric pixel value at index " + std::to_string(i));
      if (*v < 0 || *v > img.max_val) throw PgmError(Kind::InvalidPixel, "pixel exceeds maxval at index " + std::to_string(i));
      img.pixels[i] = static_cast<std::uint16_t>(*v);
    }
  }
  return img;
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  return load_pgm(read_file(path));
}

std::string encode_pgm(const GrayImage& img, PgmEncoding encoding) {
  std::string out = encoding == PgmEncoding::Binary ? "P5\n" : "P2\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n" + std::to_string(img.max_val) + "\n";
  if (encoding == PgmEncoding::Binary) {
    const bool wide = img.max_val > 255;
    for (auto v : img.pixels) {
      if (wide) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x > 0) out.push_back(' ');
        out += std::to_string(img.at(x, y));
      }
      out.push_back('\n');
    }
  }
  return out;
}

ImageGraph graph_from_image(const GrayImage& img, double intensity_threshold, int downsample) {
  if (downsample < 1) throw ConfigError("downsample", "must be >= 1");
  if (!(intensity_threshold >= 0.0 && intensity_threshold <= img.max_val)) {
    throw ConfigError("intensity_threshold", "must lie within [0, " + std::to_string(img.max_val) + "]");
  }
  ImageGraph out;
  out.cols = (img.width + downsample - 1) / downsample;
  out.rows = (img.height + downsample - 1) / downsample;
  const int cols = out.cols;
  const int rows = out.rows;

  std::vector<char> kept(static_cast<std::size_t>(cols) * rows, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double sum = 0.0;
      int n = 0;
      for (int y = r * downsample; y < std::min(img.height, (r + 1) * downsample); ++y) {
        for (int x = c * downsample; x < std::min(img.width, (c + 1) * downsample); ++x) {
          sum += img.at(x, y);
          ++n;
        }
      }
      kept[static_cast<std::size_t>(r) * cols + c] = sum / n >= intensity_threshold;
    }
  }

  const auto id = [cols](int c, int r) { return r * cols + c; };
  const auto on = [&](int c, int r) { return c >= 0 && r >= 0 && c < cols && r < rows && kept[id(c, r)]; };
  const double sx = cols > 1 ? 1.0 / (cols - 1) : 0.0;
  const double sy = rows > 1 ? 1.0 / (rows - 1) : 0.0;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!on(c, r)) continue;
      out.graph.nodes.push_back({id(c, r), {c * sx, 1.0 - r * sy}});
      if (on(c + 1, r)) out.graph.edges.push_back({id(c, r), id(c + 1, r)});
      if (on(c, r + 1)) out.graph.edges.push_back({id(c, r), id(c, r + 1)});
      // image row r+1 lies below row r: (c, r+1) -> (c+1, r) runs bottom-left to top-right
      if (on(c, r + 1) && on(c + 1, r)) out.graph.edges.push_back({id(c + 1, r), id(c, r + 1)});
    }
  }
  out.graph.canonicalize();
  out.empty = out.graph.nodes.empty();
  return out;
}

ImageSequenceManifest load_image_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("frames") || !j["frames"].is_array()) {
    throw ConfigError("frames", "manifest must contain a 'frames' array");
  }
  ImageSequenceManifest m;
  const auto base = path.parent_path();
  for (const auto& f : j["frames"]) {
    if (!f.is_string()) throw ConfigError("frames", "entries must be strings");
    std::filesystem::path p = f.get<std::string>();
    m.frames.push_back(p.is_absolute() ? p : base / p);
  }
  if (j.contains("interval_seconds")) m.interval_seconds = j["interval_seconds"].get<double>();
  if (m.frames.empty()) throw ConfigError("frames", "manifest lists no frames");
  return m;
}

void ImageAnalysisConfig::validate() const {
  if (downsample < 1) throw ConfigError("downsample", "must be >= 1");
  if (!(intensity_threshold >= 0.0)) throw ConfigError("intensity_threshold", "must be >= 0");
  if (s_values.empty()) throw ConfigError("s_values", "must not be empty");
  for (int s : s_values) {
    if (s < 1) throw ConfigError("s_values", "entries must be >= 1");
  }
  if (moving_average < 1) throw ConfigError("moving_average", "must be >= 1");
}

ConsolidationWindow consolidation_window(const PropertyTrace& covered_area, int moving_average) {
  ConsolidationWindow w;
  const auto& v = covered_area.values;
  const int k = std::max(1, std::min<int>(moving_average, static_cast<int>(v.size())));
  std::vector<double> ma;
  for (std::size_t i = k - 1; i < v.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - k; j <= i; ++j) sum += v[j].value;
    ma.push_back(sum / k);
  }
  if (ma.size() < 2) return w;
  std::size_t start = ma.size() - 1;
  while (start > 0 && ma[start - 1] >= ma[start]) --start;
  if (start == ma.size() - 1) return w;
  w.found = true;
  w.start = v[start + k - 1].t;
  w.end = v.back().t;
  return w;
}

const PropertyTrace& ImageSequenceAnalysis::trace(const std::string& name, int s) const {
  for (const auto& tr : traces) {
    if (tr.name == name && tr.s == s) return tr;
  }
  throw std::out_of_range("no trace " + name);
}

ImageSequenceAnalysis analyze_frames(const std::vector<std::optional<GrayImage>>& decoded,
                                     std::vector<FrameError> errors, const ImageAnalysisConfig& cfg) {
  cfg.validate();
  if (decoded.empty()) throw ConfigError("frames", "sequence is empty");

  const GrayImage* reference = nullptr;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    if (!decoded[i]) continue;
    if (!reference) {
      reference = &*decoded[i];
    } else if (decoded[i]->width != reference->width || decoded[i]->height != reference->height) {
      throw ConfigError("frames", "frame " + std::to_string(i) + " is " + std::to_string(decoded[i]->width) + "x" +
                                      std::to_string(decoded[i]->height) + ", expected " +
                                      std::to_string(reference->width) + "x" + std::to_string(reference->height));
    }
  }

  AnalysisConfig acfg;
  acfg.s_values = cfg.s_values;

  ImageSequenceAnalysis out;
  out.errors = std::move(errors);
  std::vector<StepMetrics> metrics;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    if (!decoded[i]) continue;
    const ImageGraph ig = graph_from_image(*decoded[i], cfg.intensity_threshold, cfg.downsample);
    if (ig.empty) out.empty_frames.push_back(static_cast<int>(i));
    Hypergraph h = hypergraph_from_graph(ig.graph);
    metrics.push_back(evaluate_hypergraph(ig.graph, h, acfg));
    out.hypergraphs.push_back(std::move(h));
    out.frames.push_back(static_cast<int>(i));
  }
  out.traces = build_traces(metrics, out.frames, acfg, 0.0, false, false);
  if (!out.frames.empty()) out.consolidation = consolidation_window(out.trace(kHyperTraces[2]), cfg.moving_average);
  return out;
}

ImageSequenceAnalysis analyze_image_sequence(const ImageSequenceManifest& manifest, const ImageAnalysisConfig& cfg) {
  if (manifest.frames.empty()) throw ConfigError("frames", "manifest lists no frames");
  std::vector<std::optional<GrayImage>> decoded;
  std::vector<FrameError> errors;
  for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
    try {
      decoded.emplace_back(read_pgm_file(manifest.frames[i]));
    } catch (const std::exception& e) {
      const std::string msg = "frame " + std::to_string(i) + " (" + manifest.frames[i].string() + "): " + e.what();
      if (!cfg.permissive) throw IoError(msg);
      errors.push_back({static_cast<int>(i), msg});
      decoded.emplace_back(std::nullopt);
    }
  }
  return analyze_frames(decoded, std::move(errors), cfg);
}

}  // namespace hyperot
