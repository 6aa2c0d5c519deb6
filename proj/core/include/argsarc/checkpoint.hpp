#pragma once

#include <string>

#include "argsarc/autodiff.hpp"

namespace argsarc::checkpoint {

// Flat binary weight file: magic "ASCK", u32 tensor count, then per
// tensor u32 name length, name bytes, u32 rows, u32 cols, row-major
// float32 data. Little-endian throughout.
void save_weights(const nn::ParameterStore& params, const std::string& path);

// Loads into existing parameters; shapes must match.
void load_weights(nn::ParameterStore& params, const std::string& path);

}  // namespace argsarc::checkpoint
