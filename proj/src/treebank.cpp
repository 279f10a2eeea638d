#include "dctree/treebank.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dctree/error.hpp"

namespace dctree {

namespace {

bool is_atom_char(char c) {
  return c != '(' && c != ')' && !std::isspace(static_cast<unsigned char>(c));
}

void skip_ws(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
    ++pos;
  }
}

std::string read_atom(std::string_view text, std::size_t& pos) {
  const std::size_t start = pos;
  while (pos < text.size() && is_atom_char(text[pos])) ++pos;
  return std::string(text.substr(start, pos - start));
}

LabeledTree parse_node(std::string_view text, std::size_t& pos) {
  // caller guarantees text[pos] == '('
  const std::size_t open = pos;
  ++pos;
  skip_ws(text, pos);
  if (pos >= text.size() || !is_atom_char(text[pos])) {
    throw ParseError("missing node label at offset " + std::to_string(pos), pos);
  }
  LabeledTree node;
  node.label = read_atom(text, pos);

  while (true) {
    skip_ws(text, pos);
    if (pos >= text.size()) {
      throw ParseError("unbalanced '(' at offset " + std::to_string(open), open);
    }
    if (text[pos] == ')') {
      ++pos;
      break;
    }
    if (text[pos] == '(') {
      if (!node.token.empty()) {
        throw ParseError("leaf token mixed with subtrees at offset " +
                             std::to_string(pos),
                         pos);
      }
      node.children.push_back(parse_node(text, pos));
    } else {
      if (!node.children.empty() || !node.token.empty()) {
        throw ParseError("unexpected extra token at offset " +
                             std::to_string(pos),
                         pos);
      }
      node.token = read_atom(text, pos);
    }
  }

  if (node.children.empty() && node.token.empty()) {
    throw ParseError("empty node at offset " + std::to_string(open), open);
  }
  return node;
}

std::optional<int> parse_int_label(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  for (std::size_t k = i; k < s.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return std::nullopt;
  }
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc()) return std::nullopt;
  return value;
}

// Appends the subtree for `t` and returns its node id. `inherited` carries a
// label down through collapsed unary chains (outermost label wins).
int emit_binarized(const LabeledTree& t,
                   const std::optional<std::string>& inherited,
                   BinaryTree& out) {
  const std::string& label = inherited ? *inherited : t.label;

  if (t.is_leaf()) {
    BinaryTree::Node node;
    node.token = -1;
    node.label = parse_int_label(label);
    node.span_begin = static_cast<int>(out.tokens.size());
    node.span_end = node.span_begin + 1;
    out.tokens.push_back(t.token);
    out.nodes.push_back(node);
    return static_cast<int>(out.nodes.size()) - 1;
  }

  if (t.children.size() == 1) {
    return emit_binarized(t.children[0], label, out);
  }

  auto make_internal = [&out](int left, int right,
                              const std::optional<int>& lbl) {
    BinaryTree::Node node;
    node.left = left;
    node.right = right;
    node.label = lbl;
    node.span_begin = out.nodes[static_cast<std::size_t>(left)].span_begin;
    node.span_end = out.nodes[static_cast<std::size_t>(right)].span_end;
    out.nodes.push_back(node);
    const int id = static_cast<int>(out.nodes.size()) - 1;
    out.nodes[static_cast<std::size_t>(left)].parent = id;
    out.nodes[static_cast<std::size_t>(right)].parent = id;
    return id;
  };

  // Left-branching fold: (P a b c) -> (P (a b) c); the intermediates carry
  // no label, the original label lands on the top node.
  int acc = emit_binarized(t.children[0], std::nullopt, out);
  for (std::size_t i = 1; i < t.children.size(); ++i) {
    const int rhs = emit_binarized(t.children[i], std::nullopt, out);
    const bool last = (i + 1 == t.children.size());
    acc = make_internal(acc, rhs, last ? parse_int_label(label) : std::nullopt);
  }
  return acc;
}

int count_depth_mismatch_offset(std::string_view text) {
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') {
      --depth;
      if (depth < 0) {
        throw ParseError("unbalanced ')' at offset " + std::to_string(i), i);
      }
    }
  }
  return depth;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

LabeledTree parse_sexpr(std::string_view text) {
  if (count_depth_mismatch_offset(text) > 0) {
    throw ParseError("unbalanced '(' at offset " + std::to_string(text.size()),
                     text.size());
  }
  std::size_t pos = 0;
  skip_ws(text, pos);
  if (pos >= text.size() || text[pos] != '(') {
    throw ParseError("expected '(' at offset " + std::to_string(pos), pos);
  }
  LabeledTree tree = parse_node(text, pos);
  skip_ws(text, pos);
  if (pos != text.size()) {
    throw ParseError("trailing content at offset " + std::to_string(pos), pos);
  }
  return tree;
}

std::string to_sexpr(const LabeledTree& tree) {
  std::string out = "(" + tree.label;
  if (tree.is_leaf()) {
    out += " " + tree.token;
  } else {
    for (const LabeledTree& child : tree.children) {
      out += " " + to_sexpr(child);
    }
  }
  out += ")";
  return out;
}

std::string BinaryTree::phrase(int i) const {
  const Node& n = nodes[static_cast<std::size_t>(i)];
  std::string out;
  for (int k = n.span_begin; k < n.span_end; ++k) {
    if (!out.empty()) out += ' ';
    out += tokens[static_cast<std::size_t>(k)];
  }
  return out;
}

BinaryTree binarize(const LabeledTree& tree) {
  BinaryTree out;
  out.root = emit_binarized(tree, std::nullopt, out);
  return out;
}

Vocab::Vocab() { tokens_.push_back(kUnkToken); }

int Vocab::add(const std::string& token) {
  const auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

int Vocab::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_count) {
  if (min_count < 1) throw ConfigError("build_vocab: min_count must be >= 1");
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& sentence : corpus) {
    for (const std::string& token : sentence) {
      if (counts[token]++ == 0) order.push_back(token);
    }
  }
  Vocab vocab;
  for (const std::string& token : order) {
    if (counts[token] >= min_count) vocab.add(token);
  }
  return vocab;
}

Tensor random_embeddings(const Vocab& vocab, int e, Rng& rng) {
  Tensor out(vocab.size(), e);
  for (double& v : out.data()) v = rng.uniform(-0.1, 0.1);
  return out;
}

Tensor load_embeddings(const std::string& path, const Vocab& vocab, int e,
                       Rng& rng) {
  std::ifstream in = open_or_throw(path);
  std::unordered_map<std::string, std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> values;
    double v = 0.0;
    while (ss >> v) values.push_back(v);
    if (!ss.eof()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": malformed embedding line");
    }
    if (static_cast<int>(values.size()) != e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(e) + " values, got " +
                      std::to_string(values.size()));
    }
    const int id = vocab.lookup(token);
    if (id != Vocab::kUnk) rows.emplace(vocab.token(id), std::move(values));
  }

  Tensor out(vocab.size(), e);
  for (int id = 0; id < vocab.size(); ++id) {
    const auto it = (id == Vocab::kUnk) ? rows.end() : rows.find(vocab.token(id));
    if (it == rows.end()) {
      for (int c = 0; c < e; ++c) out.at(id, c) = rng.uniform(-0.1, 0.1);
    } else {
      for (int c = 0; c < e; ++c) out.at(id, c) = it->second[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

int pair_label_from_string(const std::string& s) {
  if (s == "entailment") return kEntailment;
  if (s == "contradiction") return kContradiction;
  if (s == "neutral") return kNeutral;
  throw DataError("unknown pair label \"" + s + "\"");
}

namespace {

Sample sample_from_line(const std::string& line, int classes, int lineno) {
  LabeledTree parsed;
  try {
    parsed = parse_sexpr(line);
  } catch (const ParseError& e) {
    throw DataError("line " + std::to_string(lineno) + ": " + e.what());
  }
  Sample s;
  s.tree = binarize(parsed);
  const auto& root_label = s.tree.nodes[static_cast<std::size_t>(s.tree.root)].label;
  if (!root_label) {
    throw DataError("line " + std::to_string(lineno) +
                    ": root label is not an integer class id");
  }
  s.label = *root_label;
  if (classes >= 0 && (s.label < 0 || s.label >= classes)) {
    throw DataError("line " + std::to_string(lineno) + ": label " +
                    std::to_string(s.label) + " outside [0, " +
                    std::to_string(classes) + ")");
  }
  return s;
}

}  // namespace

std::vector<Sample> load_tree_dataset(std::istream& in, int classes) {
  std::vector<Sample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    out.push_back(sample_from_line(line, classes, lineno));
  }
  return out;
}

std::vector<Sample> load_tree_dataset(const std::string& path, int classes) {
  std::ifstream in = open_or_throw(path);
  return load_tree_dataset(in, classes);
}

std::vector<PairSample> load_pair_dataset(std::istream& in) {
  std::vector<PairSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = (tab1 == std::string::npos)
                                 ? std::string::npos
                                 : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(lineno) +
                      ": expected three tab-separated columns");
    }
    PairSample p;
    try {
      p.tree_a = binarize(parse_sexpr(line.substr(0, tab1)));
      p.tree_b = binarize(parse_sexpr(line.substr(tab1 + 1, tab2 - tab1 - 1)));
    } catch (const ParseError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    p.label = pair_label_from_string(line.substr(tab2 + 1));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairSample> load_pair_dataset(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load_pair_dataset(in);
}

void index_tokens(BinaryTree& tree, const Vocab& vocab) {
  for (auto& node : tree.nodes) {
    if (node.left < 0) {
      node.token = vocab.lookup(tree.tokens[static_cast<std::size_t>(node.span_begin)]);
    }
  }
}

}  // namespace dctree
