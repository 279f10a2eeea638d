#include "dctree/toygen.hpp"

#include <algorithm>
#include <sstream>

#include "dctree/error.hpp"

namespace dctree {

namespace {

const std::vector<std::string> kPositive = {"good", "great"};
const std::vector<std::string> kNegative = {"bad", "poor"};
const std::vector<std::string> kFiller = {"the", "is"};
const std::string kNegator = "not";

std::string random_bracketing(const std::vector<std::string>& tokens, int lo,
                              int hi, Rng& rng) {
  if (hi - lo == 1) {
    return "(- " + tokens[static_cast<std::size_t>(lo)] + ")";
  }
  const int split = lo + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(hi - lo - 1)));
  return "(- " + random_bracketing(tokens, lo, split, rng) + " " +
         random_bracketing(tokens, split, hi, rng) + ")";
}

}  // namespace

std::vector<std::string> make_toy_lines(const ToyOptions& options) {
  if (options.min_len < 2 || options.max_len < options.min_len) {
    throw ConfigError("toy generator: bad sentence-length range");
  }
  Rng rng(options.seed);
  std::vector<std::string> lines;
  lines.reserve(static_cast<std::size_t>(options.samples));

  for (int s = 0; s < options.samples; ++s) {
    const int sentiment = static_cast<int>(rng.below(2));
    const int negators =
        static_cast<int>(rng.below(static_cast<uint64_t>(options.max_negators + 1)));
    const int len =
        options.min_len +
        static_cast<int>(rng.below(
            static_cast<uint64_t>(options.max_len - options.min_len + 1)));

    std::vector<std::string> tokens;
    const auto& pool = (sentiment == 1) ? kPositive : kNegative;
    tokens.push_back(pool[rng.below(pool.size())]);
    for (int k = 0; k < negators && static_cast<int>(tokens.size()) < len; ++k) {
      tokens.push_back(kNegator);
    }
    while (static_cast<int>(tokens.size()) < len) {
      tokens.push_back(kFiller[rng.below(kFiller.size())]);
    }
    rng.shuffle(tokens);

    const int actual_negators =
        static_cast<int>(std::count(tokens.begin(), tokens.end(), kNegator));
    const int label = sentiment ^ (actual_negators & 1);

    // Random shape first, then stamp the class label onto the root.
    std::string body = random_bracketing(tokens, 0, len, rng);
    body.replace(1, 1, std::to_string(label));
    lines.push_back(std::move(body));
  }
  return lines;
}

std::vector<Sample> make_toy_treebank(const ToyOptions& options) {
  std::string joined;
  for (const std::string& line : make_toy_lines(options)) {
    joined += line;
    joined += '\n';
  }
  std::istringstream in(joined);
  return load_tree_dataset(in, 2);
}

Vocab make_synthetic_vocab(int vocab_size) {
  Vocab vocab;
  for (int i = 0; i < vocab_size; ++i) vocab.add("w" + std::to_string(i));
  return vocab;
}

BinaryTree make_random_tree(int leaves, int vocab_size, Rng& rng) {
  if (leaves < 1) throw ConfigError("make_random_tree: need at least one leaf");
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(leaves));
  for (int i = 0; i < leaves; ++i) {
    tokens.push_back("w" + std::to_string(rng.below(static_cast<uint64_t>(vocab_size))));
  }
  std::string text;
  if (leaves == 1) {
    text = "(0 " + tokens[0] + ")";
  } else {
    text = random_bracketing(tokens, 0, leaves, rng);
    text.replace(1, 1, "0");
  }
  BinaryTree tree = binarize(parse_sexpr(text));
  index_tokens(tree, make_synthetic_vocab(vocab_size));
  return tree;
}

}  // namespace dctree
