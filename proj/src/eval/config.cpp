#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ompc/errors.h"
#include "ompc/experiment.h"

namespace ompc {

namespace {

  using nlohmann::json;

  void rejectUnknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
  {
    if (!obj.is_object())
      throw DomainError(where + " must be an object");
    for (const auto& [key, _] : obj.items())
      if (!allowed.count(key))
        throw DomainError("unknown key '" + key + "' in " + where);
  }

  int intValue(const json& v, const std::string& key, int lo, int hi)
  {
    if (!v.is_number_integer())
      throw DomainError("'" + key + "' must be an integer");
    const auto x = v.get<int64_t>();
    if (x < lo || x > hi)
      throw DomainError("'" + key + "' out of range");
    return int(x);
  }

  uint64_t seedValue(const json& v, const std::string& key)
  {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
      throw DomainError("'" + key + "' must be a non-negative integer");
    return v.get<uint64_t>();
  }

  std::string stringValue(const json& v, const std::string& key)
  {
    if (!v.is_string())
      throw DomainError("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolValue(const json& v, const std::string& key)
  {
    if (!v.is_boolean())
      throw DomainError("'" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::vector<int> qpList(const json& v, const std::string& key)
  {
    if (!v.is_array() || v.empty())
      throw DomainError("'" + key + "' must be a non-empty array");
    std::vector<int> out;
    for (const json& q : v)
      out.push_back(intValue(q, key, 0, 51));
    return out;
  }

  SequenceSource parseSequence(const json& j, uint64_t defaultSeed)
  {
    rejectUnknown(j, {"name", "kind", "frames", "seed", "points", "ply_dir", "min_frame_height"},
                  "sequence");
    SequenceSource s;
    s.seed = defaultSeed;
    if (!j.contains("kind"))
      throw DomainError("sequence needs a 'kind'");
    s.kind = stringValue(j["kind"], "kind");
    if (s.kind == "ply") {
      if (!j.contains("ply_dir"))
        throw DomainError("ply sequence needs 'ply_dir'");
    } else {
      parseSequenceKind(s.kind);
    }
    s.name = j.contains("name") ? stringValue(j["name"], "name") : s.kind;
    if (j.contains("frames"))
      s.frames = intValue(j["frames"], "frames", 1, 65535);
    if (j.contains("seed")) {
      s.seed = seedValue(j["seed"], "seed");
      s.inheritsSeed = false;
    }
    if (j.contains("points"))
      s.points = intValue(j["points"], "points", 0, 50'000'000);
    if (j.contains("ply_dir"))
      s.plyDirectory = stringValue(j["ply_dir"], "ply_dir");
    if (j.contains("min_frame_height"))
      s.minFrameHeight = intValue(j["min_frame_height"], "min_frame_height", 0, 65472);
    return s;
  }

}  // namespace

ExperimentConfig
parseExperimentConfig(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t end = std::min(text.size(), size_t(e.byte));
    const int line = 1 + int(std::count(text.begin(), text.begin() + ptrdiff_t(end), '\n'));
    throw ParseError("malformed JSON", line);
  }
  rejectUnknown(j,
                {"sequences", "qp_geometry", "qp_attribute", "attribute_qp_offset", "configs",
                 "masking", "padding", "frame_width", "min_frame_height", "normal_neighbors",
                 "metric_neighbors", "sao", "output", "seed", "workers"},
                "experiment config");

  ExperimentConfig c;
  if (j.contains("seed"))
    c.seed = seedValue(j["seed"], "seed");
  if (!j.contains("sequences") || !j["sequences"].is_array() || j["sequences"].empty())
    throw DomainError("'sequences' must be a non-empty array");
  for (const json& s : j["sequences"])
    c.sequences.push_back(parseSequence(s, c.seed));

  if (j.contains("qp_geometry"))
    c.qpGeometry = qpList(j["qp_geometry"], "qp_geometry");
  if (j.contains("qp_attribute")) {
    c.qpAttribute = qpList(j["qp_attribute"], "qp_attribute");
    if (c.qpAttribute.size() != c.qpGeometry.size())
      throw DomainError("'qp_attribute' and 'qp_geometry' differ in length");
  }
  if (j.contains("attribute_qp_offset"))
    c.attributeQpOffset = intValue(j["attribute_qp_offset"], "attribute_qp_offset", -51, 51);
  for (size_t i = 0; i < c.qpGeometry.size() && c.qpAttribute.empty(); i++) {
    const int qa = c.qpGeometry[i] + c.attributeQpOffset;
    if (qa < 0 || qa > 51)
      throw DomainError("attribute QP out of range");
  }

  if (j.contains("configs")) {
    const json& v = j["configs"];
    if (!v.is_array() || v.empty())
      throw DomainError("'configs' must be a non-empty array");
    c.allIntra = c.ippp = false;
    for (const json& name : v) {
      const std::string s = stringValue(name, "configs");
      if (s == "all_intra")
        c.allIntra = true;
      else if (s == "ippp")
        c.ippp = true;
      else
        throw DomainError("unknown config '" + s + "'");
    }
  }
  if (j.contains("masking")) {
    const json& v = j["masking"];
    if (!v.is_array() || v.empty())
      throw DomainError("'masking' must be a non-empty array");
    c.masking.clear();
    for (const json& m : v) {
      const std::string s = stringValue(m, "masking");
      if (s != "on" && s != "off")
        throw DomainError("'masking' entries must be \"on\" or \"off\"");
      c.masking.push_back(s == "on");
    }
  }
  if (j.contains("padding")) {
    const std::string s = stringValue(j["padding"], "padding");
    if (s == "none")
      c.projection.padding = PaddingMode::None;
    else if (s == "dilate")
      c.projection.padding = PaddingMode::Dilate;
    else
      throw DomainError("'padding' must be \"none\" or \"dilate\"");
  }
  if (j.contains("frame_width")) {
    c.projection.frameWidth = intValue(j["frame_width"], "frame_width", 64, 65472);
    if (c.projection.frameWidth % 64)
      throw DomainError("'frame_width' must be a multiple of 64");
  }
  if (j.contains("min_frame_height"))
    c.projection.minFrameHeight = intValue(j["min_frame_height"], "min_frame_height", 0, 65472);
  if (j.contains("normal_neighbors"))
    c.projection.normalNeighbors = intValue(j["normal_neighbors"], "normal_neighbors", 3, 256);
  if (j.contains("metric_neighbors"))
    c.metricNeighbors = intValue(j["metric_neighbors"], "metric_neighbors", 3, 256);
  if (j.contains("sao"))
    c.sao = boolValue(j["sao"], "sao");
  if (j.contains("output"))
    c.outputDir = stringValue(j["output"], "output");
  if (j.contains("workers"))
    c.workers = intValue(j["workers"], "workers", 1, 256);
  return c;
}

ExperimentConfig
loadExperimentConfig(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseExperimentConfig(ss.str());
}

}  // namespace ompc
