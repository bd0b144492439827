#pragma once

#include <string>

#include "ddsc/engine.hpp"

namespace ddsc {

// Epoch-boundary state serialization. The on-disk format is a single
// self-describing JSON document; doubles round-trip losslessly. Resuming
// mid-epoch is unsupported, so mid-epoch accumulators are never written.
void save_checkpoint(const CurriculumState& state, const std::string& path);

// Throws std::runtime_error starting with "unreadable checkpoint" on any
// parse or schema failure.
CurriculumState load_checkpoint(const std::string& path);

}  // namespace ddsc
