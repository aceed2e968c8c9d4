#ifndef HMF_PRESETS_HPP
#define HMF_PRESETS_HPP

#include <string>

#include "hmf/quat.hpp"

namespace hmf {

// Root of the bundled data directory (presets, fixtures). Overridable with
// the HMF_DATA_DIR environment variable.
std::string data_dir();

// Load and re-verify the bundled maximal order for d in {5, 13, 17}.
Order preset_order(long d);

// Parse/serialize order preset files.
Order read_order_file(const std::string& path);
void write_order_file(const std::string& path, const Order& O);

}  // namespace hmf

#endif
