#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace faceness {

enum class ErrorKind {
  EmptyWindow,
  PartMismatch,
  NoScores,
  DegenerateLabels,
  EmptySearchSpace,
  OutOfRange,
  InvalidTarget,
  NoGroundTruth,
  NoMaps,
  MissingScore,
  InvalidArgument,
  // Malformed input files.
  BadMagic,
  Truncated,
  MalformedInput,
};

const char* error_kind_name(ErrorKind kind);

/// True for the kinds raised while decoding an input file.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Facial parts in file-format channel order.
enum class PartId : std::uint8_t { Hair = 0, Eye = 1, Nose = 2, Mouth = 3, Beard = 4 };

inline constexpr std::size_t kNumParts = 5;
inline constexpr std::array<PartId, kNumParts> kAllParts = {
    PartId::Hair, PartId::Eye, PartId::Nose, PartId::Mouth, PartId::Beard};

constexpr std::size_t part_index(PartId p) { return static_cast<std::size_t>(p); }
std::string_view part_name(PartId p);
/// Accepts the lowercase names ("hair", "eye", ...) and "eyes".
PartId parse_part(std::string_view name);

/// Axis-aligned box, half-open [x1,x2) x [y1,y2), real-valued pixel coordinates.
struct Window {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x2 > x1 && y2 > y1; }
  Window translated(double dx, double dy) const { return {x1 + dx, y1 + dy, x2 + dx, y2 + dy}; }

  friend bool operator==(const Window&, const Window&) = default;
};

/// Lexicographic (y1, x1, y2, x2) order used as the deterministic tie-break.
bool window_order_less(const Window& a, const Window& b);

/// Intersection of `w` with [0,width) x [0,height). Throws EmptyWindow when empty.
Window clip_window(const Window& w, double width, double height);

/// Intersection area of two boxes (0 when disjoint).
double intersection_area(const Window& a, const Window& b);

/// One response grid per facial part; values are finite and non-negative.
class PartnessMap {
 public:
  PartnessMap() = default;
  /// Zero-filled map.
  PartnessMap(PartId part, std::size_t width, std::size_t height);
  /// Negative values are clamped to 0; non-finite values are rejected.
  PartnessMap(PartId part, std::size_t width, std::size_t height, std::vector<float> values);

  PartId part() const { return part_; }
  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::span<const float> values() const { return values_; }

  float at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
  /// Clamps negatives to 0.
  void set(std::size_t x, std::size_t y, float v);
  void add(std::size_t x, std::size_t y, float v) { set(x, y, at(x, y) + v); }
  float max_value() const;

 private:
  PartId part_ = PartId::Hair;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<float> values_;
};

using MapSet = std::map<PartId, PartnessMap>;

/// Per-part scores; absent entries mean the part was not evaluated.
using PartScores = std::array<std::optional<double>, kNumParts>;

enum class ProposalSource { Template, External };

struct Proposal {
  Window window;
  PartScores part_scores{};
  double faceness = 0.0;
  ProposalSource source = ProposalSource::Template;
  /// Normalized peak response that seeded a template window; external input score otherwise.
  double seed_response = 0.0;
};

struct FaceAnnotation {
  Window face_box;
  std::map<PartId, Window> part_boxes;
  std::set<PartId> occluded_parts;
};

struct SceneGroundTruth {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<FaceAnnotation> faces;

  std::vector<Window> face_boxes() const;
};

}  // namespace faceness
