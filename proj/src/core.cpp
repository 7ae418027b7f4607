#include "faceness/core.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace faceness {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::PartMismatch: return "PartMismatch";
    case ErrorKind::NoScores: return "NoScores";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::EmptySearchSpace: return "EmptySearchSpace";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::NoGroundTruth: return "NoGroundTruth";
    case ErrorKind::NoMaps: return "NoMaps";
    case ErrorKind::MissingScore: return "MissingScore";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  return kind == ErrorKind::BadMagic || kind == ErrorKind::Truncated ||
         kind == ErrorKind::MalformedInput;
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

std::string_view part_name(PartId p) {
  switch (p) {
    case PartId::Hair: return "hair";
    case PartId::Eye: return "eye";
    case PartId::Nose: return "nose";
    case PartId::Mouth: return "mouth";
    case PartId::Beard: return "beard";
  }
  return "?";
}

PartId parse_part(std::string_view name) {
  if (name == "hair") return PartId::Hair;
  if (name == "eye" || name == "eyes") return PartId::Eye;
  if (name == "nose") return PartId::Nose;
  if (name == "mouth") return PartId::Mouth;
  if (name == "beard") return PartId::Beard;
  throw Error(ErrorKind::MalformedInput, "unknown part name '" + std::string(name) + "'");
}

bool window_order_less(const Window& a, const Window& b) {
  return std::tie(a.y1, a.x1, a.y2, a.x2) < std::tie(b.y1, b.x1, b.y2, b.x2);
}

Window clip_window(const Window& w, double width, double height) {
  Window c{std::max(w.x1, 0.0), std::max(w.y1, 0.0), std::min(w.x2, width), std::min(w.y2, height)};
  if (!c.valid()) throw Error(ErrorKind::EmptyWindow, "window does not intersect the image");
  return c;
}

double intersection_area(const Window& a, const Window& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  return (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
}

PartnessMap::PartnessMap(PartId part, std::size_t width, std::size_t height)
    : part_(part), width_(width), height_(height), values_(width * height, 0.0f) {
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "partness map must be non-empty");
}

PartnessMap::PartnessMap(PartId part, std::size_t width, std::size_t height, std::vector<float> values)
    : part_(part), width_(width), height_(height), values_(std::move(values)) {
  if (width == 0 || height == 0) throw Error(ErrorKind::InvalidArgument, "partness map must be non-empty");
  if (values_.size() != width * height)
    throw Error(ErrorKind::InvalidArgument, "partness map value count does not match its size");
  for (float& v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::MalformedInput, "non-finite partness value");
    if (v < 0.0f) v = 0.0f;
  }
}

void PartnessMap::set(std::size_t x, std::size_t y, float v) {
  values_[y * width_ + x] = v > 0.0f ? v : 0.0f;
}

float PartnessMap::max_value() const {
  return values_.empty() ? 0.0f : *std::max_element(values_.begin(), values_.end());
}

std::vector<Window> SceneGroundTruth::face_boxes() const {
  std::vector<Window> boxes;
  boxes.reserve(faces.size());
  for (const auto& f : faces) boxes.push_back(f.face_box);
  return boxes;
}

}  // namespace faceness
