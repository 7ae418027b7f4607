#include "faceness/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace faceness::io {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'F', 'P', 'M', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

// Runs a JSON decoding step, turning library exceptions into MalformedInput.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    malformed(std::string(what) + ": " + e.what());
  }
}

json window_json(const Window& w) { return json::array({w.x1, w.y1, w.x2, w.y2}); }

Window window_from(const json& j) {
  if (!j.is_array() || j.size() != 4) malformed("box must be an array of 4 numbers");
  const Window w{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
  if (!w.valid()) malformed("box must have x2 > x1 and y2 > y1");
  return w;
}

}  // namespace

std::vector<std::uint8_t> encode_fpm(const MapSet& maps) {
  if (maps.size() != kNumParts) throw Error(ErrorKind::InvalidArgument, "FPM files carry exactly five channels");
  const auto& first = maps.at(PartId::Hair);
  const std::size_t w = first.width();
  const std::size_t h = first.height();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + kNumParts * w * h * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u32(out, static_cast<std::uint32_t>(kNumParts));
  for (PartId p : kAllParts) {
    const auto& m = maps.at(p);
    if (m.width() != w || m.height() != h) throw Error(ErrorKind::InvalidArgument, "channels differ in size");
    for (float v : m.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

MapSet decode_fpm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(ErrorKind::BadMagic, "not an FPM1 file");
  if (bytes.size() < kHeaderBytes) throw Error(ErrorKind::Truncated, "FPM header is incomplete");
  const std::uint32_t w = get_u32(bytes.data() + 4);
  const std::uint32_t h = get_u32(bytes.data() + 8);
  const std::uint32_t c = get_u32(bytes.data() + 12);
  if (c != kNumParts) malformed("FPM channel count must be 5, got " + std::to_string(c));
  if (w == 0 || h == 0) malformed("FPM maps must be non-empty");
  const std::uint64_t count = static_cast<std::uint64_t>(w) * h;
  const std::uint64_t need = kHeaderBytes + count * c * 4;
  if (bytes.size() < need) throw Error(ErrorKind::Truncated, "FPM payload is shorter than its header declares");
  if (bytes.size() > need) malformed("FPM file has trailing bytes");

  MapSet maps;
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (PartId part : kAllParts) {
    std::vector<float> values(count);
    for (auto& v : values) {
      v = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
    maps.emplace(part, PartnessMap(part, w, h, std::move(values)));
  }
  return maps;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_bytes_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_fpm(const std::filesystem::path& path, const MapSet& maps) { write_bytes_atomic(path, encode_fpm(maps)); }

MapSet read_fpm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malformed("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_fpm(bytes);
}

// ---- annotations -----------------------------------------------------------

std::string annotation_to_json(const SceneGroundTruth& truth) {
  json faces = json::array();
  for (const auto& f : truth.faces) {
    json parts = json::object();
    for (const auto& [p, box] : f.part_boxes) parts[std::string(part_name(p))] = window_json(box);
    json occluded = json::array();
    for (PartId p : f.occluded_parts) occluded.push_back(std::string(part_name(p)));
    faces.push_back({{"box", window_json(f.face_box)}, {"parts", parts}, {"occluded", occluded}});
  }
  const json j{{"width", truth.width}, {"height", truth.height}, {"faces", faces}};
  return j.dump(1) + "\n";
}

SceneGroundTruth annotation_from_json(const std::string& text) {
  return guarded("annotation", [&] {
    const json j = json::parse(text);
    SceneGroundTruth truth;
    truth.width = j.at("width").get<std::size_t>();
    truth.height = j.at("height").get<std::size_t>();
    for (const auto& f : j.at("faces")) {
      FaceAnnotation face;
      face.face_box = window_from(f.at("box"));
      if (f.contains("parts")) {
        for (const auto& [name, box] : f.at("parts").items()) face.part_boxes[parse_part(name)] = window_from(box);
      }
      if (f.contains("occluded")) {
        for (const auto& name : f.at("occluded")) face.occluded_parts.insert(parse_part(name.get<std::string>()));
      }
      truth.faces.push_back(std::move(face));
    }
    return truth;
  });
}

void write_annotation(const std::filesystem::path& path, const SceneGroundTruth& truth) {
  write_text_atomic(path, annotation_to_json(truth));
}

SceneGroundTruth read_annotation(const std::filesystem::path& path) { return annotation_from_json(read_text(path)); }

// ---- candidates ------------------------------------------------------------

std::string candidates_to_json(const CandidateFile& c) {
  json windows = json::array();
  for (const auto& w : c.windows) windows.push_back(window_json(w));
  json j{{"windows", windows}};
  if (!c.scores.empty()) j["scores"] = c.scores;
  return j.dump() + "\n";
}

CandidateFile candidates_from_json(const std::string& text) {
  return guarded("candidates", [&] {
    const json j = json::parse(text);
    CandidateFile c;
    for (const auto& w : j.at("windows")) c.windows.push_back(window_from(w));
    if (j.contains("scores")) {
      c.scores = j.at("scores").get<std::vector<double>>();
      if (c.scores.size() != c.windows.size()) malformed("candidate scores must parallel the windows");
    }
    return c;
  });
}

CandidateFile read_candidates(const std::filesystem::path& path) { return candidates_from_json(read_text(path)); }

// ---- config ----------------------------------------------------------------

std::string config_to_json(const ConfigFile& cfg) {
  const PipelineConfig& pc = cfg.pipeline;
  json bands = json::object();
  for (const auto& [p, c] : pc.faceness.configs) bands[std::string(part_name(p))] = json::array({c.band_lo, c.band_hi});
  json templates = json::object();
  for (const auto& [p, t] : pc.templates) {
    templates[std::string(part_name(p))] = {{"anchor", json::array({t.anchor_x, t.anchor_y})},
                                            {"scales", t.scales},
                                            {"aspect", t.aspect},
                                            {"threshold", t.threshold},
                                            {"max_locations", t.max_locations}};
  }
  const json j{
      {"faceness", {{"alpha", pc.faceness.alpha}, {"epsilon", pc.faceness.epsilon}, {"bands", bands}}},
      {"templates", templates},
      {"nms",
       {{"smooth_iou", pc.nms.smooth_iou}, {"final_iou", pc.nms.final_iou}, {"dedup_iou", pc.nms.dedup_iou}}},
      {"pipeline", {{"top_n", pc.top_n}, {"stride", pc.stride}, {"pool_candidates", pc.pool_candidates}}},
      {"learning", {{"grid_step", cfg.grid_step}}},
      {"regression",
       {{"assign_iou", cfg.assign_iou},
        {"min_positive_fraction", cfg.batch.min_positive_fraction},
        {"negative_nms_iou", cfg.batch.negative_nms_iou},
        {"jitter", cfg.batch.jitter},
        {"min_crop_iou", cfg.batch.min_crop_iou}}},
  };
  return j.dump(2) + "\n";
}

ConfigFile config_from_json(const std::string& text) {
  ConfigFile cfg = guarded("config", [&] {
    const json j = json::parse(text);
    ConfigFile c;
    PipelineConfig& pc = c.pipeline;
    if (j.contains("faceness")) {
      const json& f = j.at("faceness");
      pc.faceness.alpha = f.value("alpha", pc.faceness.alpha);
      pc.faceness.epsilon = f.value("epsilon", pc.faceness.epsilon);
      if (f.contains("bands")) {
        for (const auto& [name, band] : f.at("bands").items()) {
          const PartId p = parse_part(name);
          if (!band.is_array() || band.size() != 2) malformed("band must be [lo, hi]");
          pc.faceness.configs[p] = {p, band.at(0).get<double>(), band.at(1).get<double>()};
        }
      }
    }
    if (j.contains("templates")) {
      for (const auto& [name, t] : j.at("templates").items()) {
        const PartId p = parse_part(name);
        TemplateSpec spec = pc.templates.contains(p) ? pc.templates.at(p) : default_template_spec(p);
        if (t.contains("anchor")) {
          const auto& a = t.at("anchor");
          if (!a.is_array() || a.size() != 2) malformed("anchor must be [x, y]");
          spec.anchor_x = a.at(0).get<double>();
          spec.anchor_y = a.at(1).get<double>();
        }
        if (t.contains("scales")) spec.scales = t.at("scales").get<std::vector<double>>();
        spec.aspect = t.value("aspect", spec.aspect);
        spec.threshold = t.value("threshold", spec.threshold);
        spec.max_locations = t.value("max_locations", spec.max_locations);
        pc.templates[p] = spec;
      }
    }
    if (j.contains("nms")) {
      const json& n = j.at("nms");
      pc.nms.smooth_iou = n.value("smooth_iou", pc.nms.smooth_iou);
      pc.nms.final_iou = n.value("final_iou", pc.nms.final_iou);
      pc.nms.dedup_iou = n.value("dedup_iou", pc.nms.dedup_iou);
    }
    if (j.contains("pipeline")) {
      const json& p = j.at("pipeline");
      pc.top_n = p.value("top_n", pc.top_n);
      pc.stride = p.value("stride", pc.stride);
      pc.pool_candidates = p.value("pool_candidates", pc.pool_candidates);
    }
    if (j.contains("learning")) c.grid_step = j.at("learning").value("grid_step", c.grid_step);
    if (j.contains("regression")) {
      const json& r = j.at("regression");
      c.assign_iou = r.value("assign_iou", c.assign_iou);
      c.batch.min_positive_fraction = r.value("min_positive_fraction", c.batch.min_positive_fraction);
      c.batch.negative_nms_iou = r.value("negative_nms_iou", c.batch.negative_nms_iou);
      c.batch.jitter = r.value("jitter", c.batch.jitter);
      c.batch.min_crop_iou = r.value("min_crop_iou", c.batch.min_crop_iou);
    }
    return c;
  });
  try {
    cfg.pipeline.validate();
  } catch (const Error& e) {
    malformed(std::string("invalid config: ") + e.what());
  }
  if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 0.5)) malformed("grid_step must lie in (0, 0.5]");
  return cfg;
}

void write_config(const std::filesystem::path& path, const ConfigFile& cfg) {
  write_text_atomic(path, config_to_json(cfg));
}

ConfigFile read_config(const std::filesystem::path& path) { return config_from_json(read_text(path)); }

// ---- proposals -------------------------------------------------------------

std::string proposals_to_json(const std::vector<Proposal>& props) {
  json arr = json::array();
  for (const auto& p : props) {
    json parts = json::object();
    for (PartId part : kAllParts) {
      if (const auto& s = p.part_scores[part_index(part)]) parts[std::string(part_name(part))] = *s;
    }
    arr.push_back({{"box", window_json(p.window)},
                   {"faceness", p.faceness},
                   {"parts", parts},
                   {"source", p.source == ProposalSource::Template ? "template" : "external"},
                   {"seed_response", p.seed_response}});
  }
  return json{{"proposals", arr}}.dump(1) + "\n";
}

std::vector<Proposal> proposals_from_json(const std::string& text) {
  return guarded("proposals", [&] {
    const json j = json::parse(text);
    std::vector<Proposal> out;
    for (const auto& e : j.at("proposals")) {
      Proposal p;
      p.window = window_from(e.at("box"));
      p.faceness = e.value("faceness", 0.0);
      if (e.contains("parts")) {
        for (const auto& [name, v] : e.at("parts").items()) p.part_scores[part_index(parse_part(name))] = v.get<double>();
      }
      const std::string source = e.value("source", std::string("template"));
      if (source == "template") p.source = ProposalSource::Template;
      else if (source == "external") p.source = ProposalSource::External;
      else malformed("unknown proposal source '" + source + "'");
      p.seed_response = e.value("seed_response", 0.0);
      out.push_back(p);
    }
    return out;
  });
}

void write_proposals(const std::filesystem::path& path, const std::vector<Proposal>& props) {
  write_text_atomic(path, proposals_to_json(props));
}

std::vector<Proposal> read_proposals(const std::filesystem::path& path) { return proposals_from_json(read_text(path)); }

// ---- scene spec ------------------------------------------------------------

std::string scene_spec_to_json(const SceneSpec& spec) {
  json occl = json::array();
  for (PartId p : spec.forced_occlusions) occl.push_back(std::string(part_name(p)));
  const json j{{"width", spec.width},
               {"height", spec.height},
               {"n_faces", spec.n_faces},
               {"face_scale_range", json::array({spec.face_scale_min, spec.face_scale_max})},
               {"occlusion_prob", spec.occlusion_prob},
               {"forced_occlusions", occl},
               {"distractor_count", spec.distractor_count},
               {"noise_sigma", spec.noise_sigma},
               {"seed", spec.seed}};
  return j.dump(2) + "\n";
}

SceneSpec scene_spec_from_json(const std::string& text) {
  SceneSpec spec = guarded("scene spec", [&] {
    const json j = json::parse(text);
    SceneSpec s;
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.n_faces = j.value("n_faces", s.n_faces);
    if (j.contains("face_scale_range")) {
      const auto& r = j.at("face_scale_range");
      if (!r.is_array() || r.size() != 2) malformed("face_scale_range must be [min, max]");
      s.face_scale_min = r.at(0).get<double>();
      s.face_scale_max = r.at(1).get<double>();
    }
    s.occlusion_prob = j.value("occlusion_prob", s.occlusion_prob);
    if (j.contains("forced_occlusions")) {
      for (const auto& name : j.at("forced_occlusions")) s.forced_occlusions.insert(parse_part(name.get<std::string>()));
    }
    s.distractor_count = j.value("distractor_count", s.distractor_count);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.seed = j.value("seed", s.seed);
    return s;
  });
  try {
    spec.validate();
  } catch (const Error& e) {
    malformed(std::string("invalid scene spec: ") + e.what());
  }
  return spec;
}

// ---- targets and curves ----------------------------------------------------

std::string targets_to_json(const std::vector<TargetRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json e{{"proposal", r.assignment.proposal},
           {"gt", r.assignment.gt ? json(*r.assignment.gt) : json(nullptr)},
           {"label", r.assignment.positive ? 1 : 0},
           {"iou", r.assignment.iou},
           {"target", r.target.t},
           {"valid", r.target.valid},
           {"status", r.status}};
    arr.push_back(std::move(e));
  }
  return json{{"targets", arr}}.dump(1) + "\n";
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

}  // namespace

std::string dr_csv(const std::vector<DrPoint>& points) {
  std::string out = "n,detection_rate\n";
  for (const auto& p : points) out += std::to_string(p.n) + "," + fmt_double(p.detection_rate) + "\n";
  return out;
}

std::string pr_csv(const PrCurve& curve) {
  std::string out = "recall,precision\n";
  for (const auto& p : curve.points) out += fmt_double(p.recall) + "," + fmt_double(p.precision) + "\n";
  return out;
}

}  // namespace faceness::io
