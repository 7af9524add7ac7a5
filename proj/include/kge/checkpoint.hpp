#pragma once
// Binary model checkpoints.
//
// Layout (all integers and floats little-endian):
//
//   offset  size  field
//   0       4     magic "KGEB"
//   4       4     u32 format version (1)
//   8       4     u32 model kind (0 transe, 1 distmult, 2 convkb)
//   12      4     u32 norm (0 l1, 1 l2; meaningful for transe only)
//   16      8     u64 |E|
//   24      8     u64 |R|
//   32      8     u64 d
//   40      8     u64 τ (0 unless convkb)
//   48      ...   f32 entities  |E|·d, row-major
//                 f32 relations |R|·d, row-major
//                 f32 filters   3τ     (convkb only)
//                 f32 w         τ·d    (convkb only)

#include <cstdint>
#include <filesystem>

#include "kge/models.hpp"

namespace kge {

inline constexpr char kCheckpointMagic[4] = {'K', 'G', 'E', 'B'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 48;

/// Throws IoError on write failure.
void save_checkpoint(const std::filesystem::path& path, const Params& params);

/// Throws IoError on read failure and ParseError on a malformed container.
Params load_checkpoint(const std::filesystem::path& path);

}  // namespace kge
