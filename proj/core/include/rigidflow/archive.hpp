#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rigidflow/image.hpp"
#include "rigidflow/losses.hpp"
#include "rigidflow/scene.hpp"

namespace rigidflow {

// Directory of raw little-endian arrays plus a manifest.json listing
// {name, shape [H,W,C], dtype, byte_order, file} per map.
struct MapSet {
  std::map<std::string, Imagef> f32;
  std::map<std::string, Imagei> i32;

  bool operator==(const MapSet&) const = default;
};

// Files are written to temp names and renamed, manifest last, so a
// readable manifest implies complete arrays.
void save_maps(const std::filesystem::path& dir, const MapSet& maps);
MapSet load_maps(const std::filesystem::path& dir);

MapSet to_mapset(const PixelMaps& maps);
MapSet to_mapset(const PredictionMaps& maps);
PixelMaps pixelmaps_from(const MapSet& set);
PredictionMaps predictions_from(const MapSet& set);

Imaged widen(const Imagef& img);
Imagef narrow(const Imaged& img);

// Scene description JSON; numbers round-trip losslessly.
void save_scene(const std::filesystem::path& file, const ScenePair& scene);
ScenePair load_scene(const std::filesystem::path& file);
std::string scene_to_json(const ScenePair& scene);
ScenePair scene_from_json(const std::string& text);

}  // namespace rigidflow
