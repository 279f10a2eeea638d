#pragma once

#include <string>

#include "dctree/model.hpp"

namespace dctree {

// Self-describing JSON container: variant, task, sizes, vocabulary, and every
// parameter tensor under its canonical name with shape and row-major payload.
// Serialized doubles round-trip exactly, so save/load is lossless and two
// identical models produce byte-identical files.
void save_checkpoint(const std::string& path, Model& model);

// Fails loudly (DataError) on unknown format, missing or extra parameter
// names, or any shape mismatch.
Model load_checkpoint(const std::string& path);

}  // namespace dctree
