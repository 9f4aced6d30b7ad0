#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sacher/mlp.hpp"

namespace sacher {

inline constexpr const char* kCheckpointMagic = "SACHER-CKPT-1";

// A bundle of named networks and named scalars. Serialized as text with
// hexadecimal floating point so values round-trip bit for bit:
//
//   SACHER-CKPT-1
//   scalars <count>
//   <name> <hexfloat>
//   networks <count>
//   network <name> <num_dims> <d0> <d1> ...
//   layer <index> weight <rows> <cols>
//   <row-major values>
//   layer <index> bias <rows>
//   <values>
//   end
struct Checkpoint {
  std::map<std::string, double> scalars;
  std::vector<std::pair<std::string, Mlp>> networks;

  const Mlp& network(const std::string& name) const;
  double scalar(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sacher
