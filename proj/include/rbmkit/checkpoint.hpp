#pragma once

#include <string>

#include "rbmkit/rbm.hpp"

namespace rbmkit {

inline constexpr int kCheckpointVersion = 1;

// Versioned JSON document {version, n_visible, n_hidden, weights (row-major),
// visible_bias, hidden_bias, temperature}. Round-trips are value-exact for
// finite doubles. Writes go through a temp file + rename.
void save_checkpoint(const std::string& path, const RbmModel& m);
RbmModel load_checkpoint(const std::string& path);

// Atomic text-file write used for every artifact the tools emit.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace rbmkit
