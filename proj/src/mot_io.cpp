#include "semitcl/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "semitcl/errors.hpp"

namespace semitcl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

double parse_double_field(const std::string& field, int line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("malformed numeric field '" + field + "'", line);
  return value;
}

std::int64_t parse_int_field(const std::string& field, int line) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("malformed integer field '" + field + "'", line);
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

}  // namespace

std::vector<MotRow> parse_mot(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<MotRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 7 && fields.size() != 10)
      throw ParseError("expected 7 or 10 comma-separated fields", line_no);
    MotRow row;
    const std::int64_t file_frame = parse_int_field(fields[0], line_no);
    if (file_frame < 1) throw ParseError("frame must be >= 1", line_no);
    row.frame = static_cast<int>(file_frame - 1);
    row.id = parse_int_field(fields[1], line_no);
    row.box.left = parse_double_field(fields[2], line_no);
    row.box.top = parse_double_field(fields[3], line_no);
    row.box.width = parse_double_field(fields[4], line_no);
    row.box.height = parse_double_field(fields[5], line_no);
    if (row.box.width <= 0.0 || row.box.height <= 0.0)
      throw ParseError("box width and height must be positive", line_no);
    row.confidence = std::clamp(parse_double_field(fields[6], line_no), 0.0, 1.0);
    rows.push_back(row);
  }
  return rows;
}

void write_mot(const std::string& path, const std::vector<MotRow>& rows) {
  std::ofstream out = open_out(path);
  for (const auto& row : rows) {
    out << (row.frame + 1) << ',' << row.id << ',' << format_double(row.box.left)
        << ',' << format_double(row.box.top) << ',' << format_double(row.box.width)
        << ',' << format_double(row.box.height) << ','
        << format_double(row.confidence) << ",-1,-1,-1\n";
  }
}

std::vector<MotRow> tracks_to_rows(const std::vector<Track>& tracks) {
  std::vector<MotRow> rows;
  for (const auto& track : tracks) {
    for (const auto& inst : track.instances) {
      rows.push_back(MotRow{inst.frame, track.id, inst.box, inst.confidence});
    }
  }
  return rows;
}

std::vector<Track> rows_to_tracks(const std::vector<MotRow>& rows, TrackSource source) {
  std::map<std::int64_t, Track> tracks;
  for (const auto& row : rows) {
    if (row.id < 0) continue;
    Track& track = tracks[row.id];
    track.id = row.id;
    track.source = source;
    Instance inst;
    inst.frame = row.frame;
    inst.box = row.box;
    inst.confidence = row.confidence;
    inst.identity = row.id;
    track.instances.push_back(inst);
  }
  std::vector<Track> out;
  out.reserve(tracks.size());
  for (auto& [id, track] : tracks) {
    std::sort(track.instances.begin(), track.instances.end(),
              [](const Instance& a, const Instance& b) { return a.frame < b.frame; });
    out.push_back(std::move(track));
  }
  return out;
}

std::vector<std::vector<Instance>> rows_to_detections(const std::vector<MotRow>& rows,
                                                      int frames) {
  int max_frame = frames - 1;
  for (const auto& row : rows) max_frame = std::max(max_frame, row.frame);
  std::vector<std::vector<Instance>> out(static_cast<std::size_t>(max_frame + 1));
  for (const auto& row : rows) {
    Instance inst;
    inst.frame = row.frame;
    inst.box = row.box;
    inst.confidence = row.confidence;
    out[static_cast<std::size_t>(row.frame)].push_back(std::move(inst));
  }
  return out;
}

void write_feature_sidecar(const std::string& path,
                           const std::vector<std::vector<Eigen::VectorXd>>& per_frame) {
  int dim = 0;
  for (const auto& frame : per_frame) {
    if (!frame.empty()) {
      dim = static_cast<int>(frame.front().size());
      break;
    }
  }
  std::ofstream out = open_out(path);
  out << "semitcl-features 1\n";
  out << "dim " << dim << "\n";
  for (std::size_t f = 0; f < per_frame.size(); ++f) {
    for (std::size_t d = 0; d < per_frame[f].size(); ++d) {
      out << (f + 1) << ',' << d;
      const auto& v = per_frame[f][d];
      for (int i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
      out << '\n';
    }
  }
}

std::vector<std::vector<Eigen::VectorXd>> read_feature_sidecar(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError("missing sidecar header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "semitcl-features 1")
    throw ParseError("unsupported sidecar header '" + line + "'", line_no);
  if (!std::getline(in, line)) throw ParseError("missing dim line", 2);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("dim ", 0) != 0) throw ParseError("missing dim line", line_no);
  const int dim = static_cast<int>(parse_int_field(line.substr(4), line_no));

  std::vector<std::vector<Eigen::VectorXd>> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != 2 + dim)
      throw ParseError("feature row has wrong field count", line_no);
    const std::int64_t file_frame = parse_int_field(fields[0], line_no);
    if (file_frame < 1) throw ParseError("frame must be >= 1", line_no);
    const std::size_t frame = static_cast<std::size_t>(file_frame - 1);
    const std::size_t index = static_cast<std::size_t>(parse_int_field(fields[1], line_no));
    if (out.size() <= frame) out.resize(frame + 1);
    if (out[frame].size() != index)
      throw ParseError("feature rows out of order", line_no);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = parse_double_field(fields[2 + i], line_no);
    out[frame].push_back(std::move(v));
  }
  return out;
}

namespace {

// Features keyed like the sidecar: per frame, in file row order.
std::vector<std::vector<Eigen::VectorXd>> track_features_by_frame(
    const std::vector<Track>& tracks, int frames) {
  std::vector<std::vector<Eigen::VectorXd>> out(static_cast<std::size_t>(frames));
  for (const auto& track : tracks) {
    for (const auto& inst : track.instances) {
      out[static_cast<std::size_t>(inst.frame)].push_back(inst.feature);
    }
  }
  return out;
}

}  // namespace

void save_scenario(const std::string& dir, const Scenario& scenario) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);

  json meta;
  meta["format"] = "semitcl-scenario";
  meta["version"] = 1;
  meta["name"] = scenario.name;
  meta["frames"] = scenario.frames;
  meta["image_width"] = scenario.image_width;
  meta["image_height"] = scenario.image_height;
  {
    std::ofstream out = open_out(dir + "/meta.json");
    out << meta.dump(2) << "\n";
  }

  // The loader re-attaches sidecar features by (frame, row order within
  // frame), which assumes tracks are written in ascending id order.
  std::vector<Track> gt_sorted = scenario.gt_tracks;
  std::sort(gt_sorted.begin(), gt_sorted.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  write_mot(dir + "/gt.txt", tracks_to_rows(gt_sorted));
  write_feature_sidecar(dir + "/gt_feat.txt",
                        track_features_by_frame(gt_sorted, scenario.frames));

  std::vector<MotRow> det_rows;
  std::vector<std::vector<Eigen::VectorXd>> det_feats(
      static_cast<std::size_t>(scenario.frames));
  for (std::size_t f = 0; f < scenario.detections.size(); ++f) {
    for (const auto& det : scenario.detections[f]) {
      det_rows.push_back(MotRow{det.frame, -1, det.box, det.confidence});
      det_feats[f].push_back(det.feature);
    }
  }
  write_mot(dir + "/det.txt", det_rows);
  write_feature_sidecar(dir + "/det_feat.txt", det_feats);
}

Scenario load_scenario(const std::string& dir) {
  json meta;
  {
    std::ifstream in = open_in(dir + "/meta.json");
    in >> meta;
  }
  if (meta.value("format", "") != "semitcl-scenario")
    throw IoError("not a scenario directory: " + dir);

  Scenario scenario;
  scenario.name = meta.value("name", fs::path(dir).filename().string());
  scenario.frames = meta.value("frames", 0);
  scenario.image_width = meta.value("image_width", 0);
  scenario.image_height = meta.value("image_height", 0);

  scenario.gt_tracks = rows_to_tracks(parse_mot(dir + "/gt.txt"));
  const auto gt_feats = read_feature_sidecar(dir + "/gt_feat.txt");
  // Re-attach features by (frame, index in file order within frame).
  std::map<int, std::size_t> cursor;
  std::vector<std::pair<int, Instance*>> gt_order;
  {
    // rows_to_tracks sorts by id then frame; rebuild file order (per track,
    // ascending frame matches tracks_to_rows, and ids are ascending).
    for (auto& track : scenario.gt_tracks) {
      for (auto& inst : track.instances) {
        const std::size_t idx = cursor[inst.frame]++;
        if (static_cast<std::size_t>(inst.frame) < gt_feats.size() &&
            idx < gt_feats[static_cast<std::size_t>(inst.frame)].size()) {
          inst.feature = gt_feats[static_cast<std::size_t>(inst.frame)][idx];
        }
      }
    }
  }

  const auto det_rows = parse_mot(dir + "/det.txt");
  scenario.detections = rows_to_detections(det_rows, scenario.frames);
  const auto det_feats = read_feature_sidecar(dir + "/det_feat.txt");
  for (std::size_t f = 0; f < scenario.detections.size(); ++f) {
    auto& dets = scenario.detections[f];
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (f < det_feats.size() && d < det_feats[f].size())
        dets[d].feature = det_feats[f][d];
    }
  }
  return scenario;
}

void save_pseudo_tracks(const std::string& dir, const std::vector<Track>& tracks,
                        const std::vector<std::vector<std::pair<int, int>>>& members,
                        const PrimitiveConfig& cfg) {
  write_mot(dir + "/pseudo.txt", tracks_to_rows(tracks));
  json meta;
  meta["format"] = "semitcl-pseudo";
  meta["version"] = 1;
  meta["source"] = "pseudo";
  meta["config"] = {{"detection_threshold", cfg.detection_threshold},
                    {"iou_gate", cfg.iou_gate},
                    {"max_age", cfg.max_age},
                    {"min_track_len", cfg.min_track_len}};
  json jtracks = json::array();
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    json jt;
    jt["id"] = tracks[t].id;
    json jm = json::array();
    for (const auto& [frame, index] : members[t]) jm.push_back({frame, index});
    jt["members"] = jm;
    jtracks.push_back(std::move(jt));
  }
  meta["tracks"] = std::move(jtracks);
  std::ofstream out = open_out(dir + "/pseudo_meta.json");
  out << meta.dump(2) << "\n";
}

bool has_pseudo_tracks(const std::string& dir) {
  return fs::exists(dir + "/pseudo_meta.json");
}

std::vector<Track> load_pseudo_tracks(const std::string& dir) {
  json meta;
  {
    std::ifstream in = open_in(dir + "/pseudo_meta.json");
    in >> meta;
  }
  if (meta.value("format", "") != "semitcl-pseudo")
    throw IoError("not a pseudo-label sidecar: " + dir);

  const auto det_rows = parse_mot(dir + "/det.txt");
  const auto detections = rows_to_detections(det_rows);
  const auto det_feats = read_feature_sidecar(dir + "/det_feat.txt");

  std::vector<Track> tracks;
  for (const auto& jt : meta.at("tracks")) {
    Track track;
    track.id = jt.at("id").get<std::int64_t>();
    track.source = TrackSource::pseudo;
    for (const auto& jm : jt.at("members")) {
      const int frame = jm.at(0).get<int>();
      const int index = jm.at(1).get<int>();
      if (frame < 0 || frame >= static_cast<int>(detections.size()) ||
          index < 0 || index >= static_cast<int>(detections[frame].size()))
        throw IoError("pseudo member out of range in " + dir);
      Instance inst = detections[static_cast<std::size_t>(frame)][static_cast<std::size_t>(index)];
      if (static_cast<std::size_t>(frame) < det_feats.size() &&
          static_cast<std::size_t>(index) < det_feats[frame].size())
        inst.feature = det_feats[frame][index];
      inst.identity = track.id;
      track.instances.push_back(std::move(inst));
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

}  // namespace semitcl
