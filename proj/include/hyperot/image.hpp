#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hyperot/graph.hpp"
#include "hyperot/temporal.hpp"

namespace hyperot {

struct GrayImage {
  int width = 0;
  int height = 0;
  int max_val = 255;
  std::vector<std::uint16_t> pixels;  // row-major, top row first

  std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

class PgmError : public std::runtime_error {
 public:
  enum class Kind { MalformedHeader, TruncatedPayload, UnsupportedMagic, InvalidPixel };

  PgmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

enum class PgmEncoding { Ascii, Binary };

/// Decodes P2 (ASCII) or P5 (binary, 8- or 16-bit big-endian) PGM data.
GrayImage load_pgm(std::string_view bytes);
GrayImage read_pgm_file(const std::filesystem::path& path);
std::string encode_pgm(const GrayImage& img, PgmEncoding encoding);

struct ImageGraph {
  SpatialGraph graph;
  int cols = 0;
  int rows = 0;
  bool empty = false;  // nothing passed the threshold
};

/// Node grid with `downsample`-pixel blocks. A node is kept when its block's mean
/// intensity is >= `intensity_threshold`; kept nodes connect to kept horizontal,
/// vertical and bottom-left/top-right diagonal neighbours. Positions map the grid
/// onto [0,1]^2 with y pointing up. Node id = row * cols + col.
ImageGraph graph_from_image(const GrayImage& img, double intensity_threshold, int downsample);

struct ImageSequenceManifest {
  std::vector<std::filesystem::path> frames;
  double interval_seconds = 0.0;
};

/// Reads {"frames": [...], "interval_seconds": x}; relative frame paths are
/// resolved against the manifest's directory.
ImageSequenceManifest load_image_manifest(const std::filesystem::path& path);

struct ImageAnalysisConfig {
  double intensity_threshold = 128.0;
  int downsample = 1;
  std::vector<int> s_values{1, 2};
  bool permissive = false;
  int moving_average = 3;

  void validate() const;
};

/// Longest suffix over which the trailing moving average of S never increases.
struct ConsolidationWindow {
  bool found = false;
  int start = 0;  // frame index
  int end = 0;
};

ConsolidationWindow consolidation_window(const PropertyTrace& covered_area, int moving_average);

struct FrameError {
  int frame = 0;
  std::string message;
};

struct ImageSequenceAnalysis {
  std::vector<PropertyTrace> traces;  // indexed by frame number
  std::vector<Hypergraph> hypergraphs;  // one per analyzed frame
  std::vector<int> frames;  // frame numbers that were analyzed
  std::vector<int> empty_frames;  // frames whose graph came out empty
  std::vector<FrameError> errors;
  ConsolidationWindow consolidation;

  const PropertyTrace& trace(const std::string& name, int s = 0) const;
};

/// Frames are given in order; `decoded[i]` empty marks a decode failure
/// described by `errors`. Dimension mismatches throw ConfigError naming the frame.
ImageSequenceAnalysis analyze_frames(const std::vector<std::optional<GrayImage>>& decoded,
                                     std::vector<FrameError> errors, const ImageAnalysisConfig& cfg);

/// Loads every frame and analyzes it. Without `permissive`, the first decode
/// failure throws IoError naming the frame index.
ImageSequenceAnalysis analyze_image_sequence(const ImageSequenceManifest& manifest, const ImageAnalysisConfig& cfg);

}  // namespace hyperot
