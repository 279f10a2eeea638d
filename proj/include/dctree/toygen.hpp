#pragma once

#include <string>
#include <vector>

#include "dctree/rng.hpp"
#include "dctree/treebank.hpp"

namespace dctree {

// Synthetic 2-class sentiment treebank with negation. Each sentence carries
// one sentiment word, up to `max_negators` occurrences of "not", and filler
// words; the label is the sentiment flipped once per negator. Tree shapes
// are uniformly random binary bracketings, so the negator can appear at any
// position and depth.
struct ToyOptions {
  int samples = 200;
  uint64_t seed = 7;
  int min_len = 3;
  int max_len = 6;
  int max_negators = 1;
};

// One s-expression per line; root label is the class, inner labels are "-".
std::vector<std::string> make_toy_lines(const ToyOptions& options);

// The same data parsed through the regular dataset pipeline.
std::vector<Sample> make_toy_treebank(const ToyOptions& options);

// Random binary tree over `leaves` tokens drawn from a synthetic vocabulary
// w0..w{vocab_size-1}; used by gradient checks. Token ids are already
// indexed: token i maps to id i + 1.
BinaryTree make_random_tree(int leaves, int vocab_size, Rng& rng);

// Matching vocabulary for make_random_tree.
Vocab make_synthetic_vocab(int vocab_size);

}  // namespace dctree
