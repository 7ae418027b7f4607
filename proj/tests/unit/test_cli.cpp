#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "faceness/io.hpp"

namespace fs = std::filesystem;
using namespace faceness;

namespace {

std::string bin() {
  const char* p = std::getenv("FACEPROP_BIN");
  REQUIRE_MESSAGE(p != nullptr, "FACEPROP_BIN is not set");
  return p;
}

int run(const std::string& args) {
  const std::string cmd = "\"" + bin() + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "faceprop_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kSpec = R"({"width": 240, "height": 180, "n_faces": 2, "face_scale_range": [50, 110],
  "occlusion_prob": 0.1, "distractor_count": 3, "noise_sigma": 0.03, "seed": 5})";

}  // namespace

TEST_CASE("gen, propose and eval") {
  const fs::path d = workdir("pipeline");
  write(d / "spec.json", kSpec);
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "scenes") + " --scenes 3 --jobs 2") == 0);
  CHECK(fs::exists(d / "scenes" / "scene_0002.fpm"));
  CHECK(fs::exists(d / "scenes" / "scene_0002.json"));

  fs::create_directories(d / "props");
  for (const char* stem : {"scene_0000", "scene_0001", "scene_0002"}) {
    const std::string s = stem;
    REQUIRE(run("propose --maps " + q(d / "scenes" / (s + ".fpm")) + " --top-n 40 --out " +
                q(d / "props" / (s + ".json"))) == 0);
    CHECK(io::read_proposals(d / "props" / (s + ".json")).size() <= 40);
  }
  REQUIRE(run("eval --props-dir " + q(d / "props") + " --gt-dir " + q(d / "scenes") + " --curve dr --out " +
              q(d / "dr.csv")) == 0);
  const std::string dr = io::read_text(d / "dr.csv");
  CHECK(dr.rfind("n,detection_rate\n1,", 0) == 0);
  REQUIRE(run("eval --props-dir " + q(d / "props") + " --gt-dir " + q(d / "scenes") + " --curve pr --out " +
              q(d / "pr.csv")) == 0);
  CHECK(io::read_text(d / "pr.csv").rfind("recall,precision\n", 0) == 0);

  REQUIRE(run("encode-targets --props " + q(d / "props" / "scene_0000.json") + " --gt " +
              q(d / "scenes" / "scene_0000.json") + " --out " + q(d / "targets.json")) == 0);
  CHECK(io::read_text(d / "targets.json").find("\"status\"") != std::string::npos);
}

TEST_CASE("gen output does not depend on the worker count") {
  const fs::path d = workdir("jobs");
  write(d / "spec.json", kSpec);
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "a") + " --scenes 4 --jobs 1") == 0);
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "b") + " --scenes 4 --jobs 3") == 0);
  for (const char* f : {"scene_0000.fpm", "scene_0003.fpm", "scene_0003.json"})
    CHECK(io::read_text(d / "a" / f) == io::read_text(d / "b" / f));
}

TEST_CASE("propose with external candidates and a config") {
  const fs::path d = workdir("external");
  write(d / "spec.json", kSpec);
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d) + " --scenes 1") == 0);
  const auto truth = io::read_annotation(d / "scene_0000.json");
  REQUIRE(!truth.faces.empty());
  io::CandidateFile c;
  c.windows = truth.face_boxes();
  write(d / "cand.json", io::candidates_to_json(c));
  io::ConfigFile cfg;
  cfg.pipeline.top_n = 5;
  io::write_config(d / "cfg.json", cfg);
  REQUIRE(run("propose --maps " + q(d / "scene_0000.fpm") + " --config " + q(d / "cfg.json") + " --candidates " +
              q(d / "cand.json") + " --out " + q(d / "props.json")) == 0);
  const auto props = io::read_proposals(d / "props.json");
  CHECK(props.size() == truth.faces.size());
  for (const auto& p : props) CHECK(p.source == ProposalSource::External);
}

TEST_CASE("learn-lambda and tune-templates write configs") {
  const fs::path d = workdir("learn");
  write(d / "spec.json", kSpec);
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "train") + " --scenes 4") == 0);
  REQUIRE(run("learn-lambda --train-dir " + q(d / "train") + " --part eye --alpha 1.0 --grid-step 0.05 --out " +
              q(d / "lambda.json")) == 0);
  const auto learned = io::read_config(d / "lambda.json");
  const SpatialConfig& eye = learned.pipeline.faceness.configs.at(PartId::Eye);
  CHECK(eye.band_lo < eye.band_hi);
  CHECK(learned.grid_step == 0.05);

  REQUIRE(run("tune-templates --train-dir " + q(d / "train") + " --n 50 --config " + q(d / "lambda.json") +
              " --anchor-x 0.5 --anchor-y 0.3 0.5 --threshold 0.5 --max-locations 70 --out " + q(d / "tuned.json")) ==
          0);
  const auto tuned = io::read_config(d / "tuned.json");
  for (const auto& [part, spec] : tuned.pipeline.templates) {
    CHECK((spec.anchor_y == 0.3 || spec.anchor_y == 0.5));
  }
  CHECK(tuned.pipeline.faceness.configs.at(PartId::Eye).band_lo == eye.band_lo);
}

TEST_CASE("malformed inputs exit with 2") {
  const fs::path d = workdir("malformed");
  write(d / "bad.fpm", "FPM2garbage-garbage");
  CHECK(run("propose --maps " + q(d / "bad.fpm") + " --out " + q(d / "o.json")) == 2);
  write(d / "short.fpm", "FPM1");
  CHECK(run("propose --maps " + q(d / "short.fpm") + " --out " + q(d / "o.json")) == 2);
  CHECK(run("propose --maps " + q(d / "missing.fpm") + " --out " + q(d / "o.json")) == 2);
  write(d / "spec.json", "{\"width\": ");
  CHECK(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "x")) == 2);
  CHECK_FALSE(fs::exists(d / "o.json"));
}

TEST_CASE("contract violations exit with 3") {
  const fs::path d = workdir("contract");
  // No faces means no positive training windows.
  write(d / "spec.json", R"({"width": 120, "height": 120, "n_faces": 0, "face_scale_range": [40, 80],
    "distractor_count": 4, "seed": 1})");
  REQUIRE(run("gen --spec " + q(d / "spec.json") + " --out-dir " + q(d / "train") + " --scenes 2") == 0);
  CHECK(run("learn-lambda --train-dir " + q(d / "train") + " --part hair --out " + q(d / "cfg.json")) == 3);
  CHECK(run("tune-templates --train-dir " + q(d / "train") + " --out " + q(d / "cfg.json")) == 3);
  CHECK_FALSE(fs::exists(d / "cfg.json"));
}
