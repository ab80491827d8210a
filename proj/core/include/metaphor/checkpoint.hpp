#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "metaphor/config.hpp"
#include "metaphor/models.hpp"

namespace metaphor {

// Binary container, all integers little-endian:
//   "MTPHCKPT" | u32 version | u64 n + n bytes config JSON
//   | u32 count | count x (u64 n + name | u32 rank | rank x u64 dim | doubles)
// Doubles are raw IEEE-754 bit patterns, so save -> load -> save is byte-identical.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const Model& model, const TrainConfig& config);
void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config);

struct LoadedCheckpoint {
  TrainConfig config;
  std::unique_ptr<Model> model;
};

LoadedCheckpoint load_checkpoint(std::istream& in);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace metaphor
