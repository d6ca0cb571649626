#ifndef POME_CHECKPOINT_HPP_
#define POME_CHECKPOINT_HPP_

#include <string>

#include "pome/nn.hpp"

namespace pome {

// Checkpoint container: magic "PVCK", u32 version, u32 array count, then per
// array: u32 name length, name bytes, u32 ndim, u32 extents, f64 data.
// All integers and reals are little-endian regardless of host order.
inline constexpr char kCheckpointMagic[4] = {'P', 'V', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ParamSet& params);
ParamSet load_checkpoint(const std::string& path);

}  // namespace pome

#endif  // POME_CHECKPOINT_HPP_
