#include "rigidflow/archive.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace rigidflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file_atomic(const fs::path& path, const void* data, size_t bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os.write(static_cast<const char*>(data), std::streamsize(bytes));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("missing file: " + path.string());
  const std::streamsize n = is.tellg();
  std::vector<char> buf(static_cast<size_t>(n), '\0');
  is.seekg(0);
  is.read(buf.data(), n);
  if (!is) throw std::runtime_error("read failed: " + path.string());
  return buf;
}

template <typename T>
json map_entry(const std::string& name, const Image<T>& img,
               const char* dtype) {
  return json{{"name", name},
              {"shape", {img.height(), img.width(), img.channels()}},
              {"dtype", dtype},
              {"byte_order", "LE"},
              {"file", name + ".bin"}};
}

}  // namespace

void save_maps(const fs::path& dir, const MapSet& maps) {
  fs::create_directories(dir);
  json manifest;
  manifest["maps"] = json::array();
  for (const auto& [name, img] : maps.f32) {
    write_file_atomic(dir / (name + ".bin"), img.data().data(),
                      img.data().size() * sizeof(float));
    manifest["maps"].push_back(map_entry(name, img, "f32"));
  }
  for (const auto& [name, img] : maps.i32) {
    write_file_atomic(dir / (name + ".bin"), img.data().data(),
                      img.data().size() * sizeof(int32_t));
    manifest["maps"].push_back(map_entry(name, img, "i32"));
  }
  const std::string text = manifest.dump(2);
  write_file_atomic(dir / "manifest.json", text.data(), text.size());
}

MapSet load_maps(const fs::path& dir) {
  const auto buf = read_file(dir / "manifest.json");
  const json manifest = json::parse(buf.begin(), buf.end());

  MapSet out;
  for (const json& entry : manifest.at("maps")) {
    const std::string name = entry.at("name");
    const std::string dtype = entry.at("dtype");
    const auto shape = entry.at("shape");
    const int H = shape.at(0), W = shape.at(1), C = shape.at(2);
    const auto bytes = read_file(dir / entry.at("file").get<std::string>());
    const size_t expected = size_t(H) * W * C * 4;
    if (bytes.size() != expected)
      throw std::runtime_error("map '" + name + "': expected " +
                               std::to_string(expected) + " bytes, got " +
                               std::to_string(bytes.size()));
    if (dtype == "f32") {
      Imagef img(H, W, C);
      std::memcpy(img.data().data(), bytes.data(), expected);
      out.f32.emplace(name, std::move(img));
    } else if (dtype == "i32") {
      Imagei img(H, W, C);
      std::memcpy(img.data().data(), bytes.data(), expected);
      out.i32.emplace(name, std::move(img));
    } else {
      throw std::runtime_error("map '" + name + "': unknown dtype " + dtype);
    }
  }
  return out;
}

Imaged widen(const Imagef& img) {
  Imaged out(img.height(), img.width(), img.channels());
  for (size_t i = 0; i < img.data().size(); ++i)
    out.data()[i] = double(img.data()[i]);
  return out;
}

Imagef narrow(const Imaged& img) {
  Imagef out(img.height(), img.width(), img.channels());
  for (size_t i = 0; i < img.data().size(); ++i)
    out.data()[i] = float(img.data()[i]);
  return out;
}

MapSet to_mapset(const PixelMaps& maps) {
  MapSet set;
  set.f32["P"] = narrow(maps.P);
  set.f32["I"] = narrow(maps.I);
  set.f32["Q"] = narrow(maps.Q);
  set.f32["T"] = narrow(maps.T);
  set.f32["X"] = narrow(maps.X);
  set.f32["S"] = narrow(maps.S);
  set.f32["mask"] = narrow(maps.mask);
  set.f32["B"] = narrow(maps.B);
  set.f32["eta"] = narrow(maps.eta);
  set.f32["both_frames"] = narrow(maps.both_frames);
  set.i32["obj_id"] = maps.obj_id;
  return set;
}

MapSet to_mapset(const PredictionMaps& maps) {
  MapSet set;
  set.f32["Q"] = narrow(maps.Q);
  set.f32["T"] = narrow(maps.T);
  set.f32["X"] = narrow(maps.X);
  set.f32["S"] = narrow(maps.S);
  set.f32["B"] = narrow(maps.B);
  set.f32["mask_logits"] = narrow(maps.mask_logits);
  set.f32["eta_logits"] = narrow(maps.eta_logits);
  return set;
}

namespace {
const Imagef& require_f32(const MapSet& set, const std::string& name) {
  auto it = set.f32.find(name);
  if (it == set.f32.end())
    throw std::runtime_error("archive is missing map '" + name + "'");
  return it->second;
}
}  // namespace

PixelMaps pixelmaps_from(const MapSet& set) {
  PixelMaps maps;
  maps.P = widen(require_f32(set, "P"));
  maps.I = widen(require_f32(set, "I"));
  maps.Q = widen(require_f32(set, "Q"));
  maps.T = widen(require_f32(set, "T"));
  maps.X = widen(require_f32(set, "X"));
  maps.S = widen(require_f32(set, "S"));
  maps.mask = widen(require_f32(set, "mask"));
  maps.B = widen(require_f32(set, "B"));
  maps.eta = widen(require_f32(set, "eta"));
  maps.both_frames = widen(require_f32(set, "both_frames"));
  auto it = set.i32.find("obj_id");
  if (it == set.i32.end())
    throw std::runtime_error("archive is missing map 'obj_id'");
  maps.obj_id = it->second;
  return maps;
}

PredictionMaps predictions_from(const MapSet& set) {
  PredictionMaps maps;
  maps.Q = widen(require_f32(set, "Q"));
  maps.T = widen(require_f32(set, "T"));
  maps.X = widen(require_f32(set, "X"));
  maps.S = widen(require_f32(set, "S"));
  maps.B = widen(require_f32(set, "B"));
  maps.mask_logits = widen(require_f32(set, "mask_logits"));
  maps.eta_logits = widen(require_f32(set, "eta_logits"));
  return maps;
}

namespace {

json vec3_json(const Vec3& v) { return json{v.x(), v.y(), v.z()}; }
Vec3 vec3_from(const json& j) { return Vec3(j.at(0), j.at(1), j.at(2)); }

json pose_json(const Pose& p) {
  return json{{"q", {p.q.w(), p.q.x(), p.q.y(), p.q.z()}},
              {"t", vec3_json(p.t)}};
}

Pose pose_from(const json& j) {
  Pose p;
  const auto& q = j.at("q");
  p.q = Quat(q.at(0), q.at(1), q.at(2), q.at(3));
  p.t = vec3_from(j.at("t"));
  return p;
}

}  // namespace

std::string scene_to_json(const ScenePair& scene) {
  json doc;
  doc["seed"] = scene.seed;
  doc["camera"] = {{"fx", scene.cam.fx}, {"fy", scene.cam.fy},
                   {"cx", scene.cam.cx}, {"cy", scene.cam.cy},
                   {"width", scene.cam.width}, {"height", scene.cam.height}};
  doc["floor"] = {{"depth", scene.floor.depth},
                  {"extent", scene.floor.extent},
                  {"color", vec3_json(scene.floor.color)}};
  doc["objects"] = json::array();
  for (const SceneObject& obj : scene.objects) {
    json o;
    o["id"] = obj.id;
    o["pose_t"] = pose_json(obj.pose_t);
    o["pose_tm1"] = pose_json(obj.pose_tm1);
    o["points"] = json::array();
    o["colors"] = json::array();
    for (const Vec3& p : obj.points) o["points"].push_back(vec3_json(p));
    for (const Vec3& c : obj.colors) o["colors"].push_back(vec3_json(c));
    o["symmetries"] = json::array();
    for (const SymmetrySpec& s : obj.syms) {
      json sym{{"axis", vec3_json(s.axis)}};
      if (s.infinite())
        sym["order"] = "inf";
      else
        sym["order"] = s.order;
      o["symmetries"].push_back(sym);
    }
    doc["objects"].push_back(std::move(o));
  }
  return doc.dump(2);
}

ScenePair scene_from_json(const std::string& text) {
  const json doc = json::parse(text);
  ScenePair scene;
  scene.seed = doc.at("seed");
  const json& cam = doc.at("camera");
  scene.cam = {cam.at("fx"), cam.at("fy"), cam.at("cx"), cam.at("cy"),
               cam.at("width"), cam.at("height")};
  const json& floor = doc.at("floor");
  scene.floor.depth = floor.at("depth");
  scene.floor.extent = floor.at("extent");
  scene.floor.color = vec3_from(floor.at("color"));
  for (const json& o : doc.at("objects")) {
    SceneObject obj;
    obj.id = o.at("id");
    obj.pose_t = pose_from(o.at("pose_t"));
    obj.pose_tm1 = pose_from(o.at("pose_tm1"));
    for (const json& p : o.at("points")) obj.points.push_back(vec3_from(p));
    for (const json& c : o.at("colors")) obj.colors.push_back(vec3_from(c));
    for (const json& s : o.at("symmetries")) {
      SymmetrySpec sym;
      sym.axis = vec3_from(s.at("axis"));
      if (s.at("order").is_string())
        sym.order = SymmetrySpec::kInfiniteOrder;
      else
        sym.order = s.at("order");
      obj.syms.push_back(sym);
    }
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

void save_scene(const fs::path& file, const ScenePair& scene) {
  const std::string text = scene_to_json(scene);
  fs::create_directories(file.parent_path().empty() ? "." : file.parent_path());
  write_file_atomic(file, text.data(), text.size());
}

ScenePair load_scene(const fs::path& file) {
  const auto buf = read_file(file);
  return scene_from_json(std::string(buf.begin(), buf.end()));
}

}  // namespace rigidflow
