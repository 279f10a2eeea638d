#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dctree/model.hpp"

namespace dctree {

// Controlling-vector activation of one tree node.
struct ActivationRecord {
  int sample_id = 0;
  int node_id = 0;
  std::string phrase;  // tokens covered by the node
  std::vector<double> z;
};

// Encodes every sample and captures z at every node (leaves included; their
// composer weights are generated too). Requires a dynamic variant.
std::vector<ActivationRecord> record_activations(
    const std::vector<Sample>& dataset, const Model& model);

// Records sorted by z[neuron] descending (|z[neuron]| when by_abs), ties
// broken by (sample id, node id) ascending; at most top_n entries.
std::vector<std::pair<std::string, double>> top_activating_phrases(
    const std::vector<ActivationRecord>& records, int neuron, int top_n,
    bool by_abs = false);

// Per-node activation of one neuron over one sample, min-max normalized to
// [0, 1] within the sample (all 0.5 when constant). `parents` holds -1 at
// the root.
nlohmann::ordered_json export_heatmap(const Sample& sample, const Model& model,
                                      int neuron);

// CSV columns: sample_id, node_id, phrase, z_0 .. z_{Z-1}.
void write_activations_csv(std::ostream& out,
                           const std::vector<ActivationRecord>& records);

}  // namespace dctree
