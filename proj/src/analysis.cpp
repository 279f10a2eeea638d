#include "dctree/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dctree/error.hpp"

namespace dctree {

namespace {

void require_dynamic(const Model& model) {
  if (!is_dynamic(model.variant)) {
    throw ConfigError("unsupported variant " + to_string(model.variant) +
                      ": activation analysis needs a dynamic model");
  }
}

}  // namespace

std::vector<ActivationRecord> record_activations(
    const std::vector<Sample>& dataset, const Model& model) {
  require_dynamic(model);
  std::vector<ActivationRecord> out;
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    const Sample& sample = dataset[s];
    const Encoding enc = encode_tree(sample.tree, model);
    for (int n = 0; n < sample.tree.node_count(); ++n) {
      ActivationRecord rec;
      rec.sample_id = static_cast<int>(s);
      rec.node_id = n;
      rec.phrase = sample.tree.phrase(n);
      rec.z = enc.states[static_cast<std::size_t>(n)].z.data();
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> top_activating_phrases(
    const std::vector<ActivationRecord>& records, int neuron, int top_n,
    bool by_abs) {
  if (!records.empty() &&
      (neuron < 0 || neuron >= static_cast<int>(records.front().z.size()))) {
    throw ConfigError("neuron index " + std::to_string(neuron) +
                      " out of range");
  }
  std::vector<const ActivationRecord*> sorted;
  sorted.reserve(records.size());
  for (const ActivationRecord& r : records) sorted.push_back(&r);

  auto key = [neuron, by_abs](const ActivationRecord* r) {
    const double v = r->z[static_cast<std::size_t>(neuron)];
    return by_abs ? std::fabs(v) : v;
  };
  std::sort(sorted.begin(), sorted.end(),
            [&key](const ActivationRecord* a, const ActivationRecord* b) {
              const double ka = key(a), kb = key(b);
              if (ka != kb) return ka > kb;
              if (a->sample_id != b->sample_id) return a->sample_id < b->sample_id;
              return a->node_id < b->node_id;
            });

  const std::size_t n = std::min<std::size_t>(
      sorted.size(), top_n < 0 ? 0 : static_cast<std::size_t>(top_n));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(sorted[i]->phrase,
                     sorted[i]->z[static_cast<std::size_t>(neuron)]);
  }
  return out;
}

nlohmann::ordered_json export_heatmap(const Sample& sample, const Model& model,
                                      int neuron) {
  require_dynamic(model);
  if (neuron < 0 || neuron >= model.sizes.z) {
    throw ConfigError("neuron index " + std::to_string(neuron) +
                      " out of range for z = " + std::to_string(model.sizes.z));
  }
  const Encoding enc = encode_tree(sample.tree, model);

  std::vector<double> raw;
  std::vector<int> parents;
  raw.reserve(sample.tree.nodes.size());
  for (std::size_t n = 0; n < sample.tree.nodes.size(); ++n) {
    raw.push_back(enc.states[n].z[neuron]);
    parents.push_back(sample.tree.nodes[n].parent);
  }

  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> normalized(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    normalized[i] = (hi > lo) ? (raw[i] - lo) / (hi - lo) : 0.5;
  }

  nlohmann::ordered_json doc;
  doc["neuron"] = neuron;
  doc["tokens"] = sample.tree.tokens;
  doc["parents"] = parents;
  doc["raw"] = raw;
  doc["normalized"] = normalized;
  return doc;
}

void write_activations_csv(std::ostream& out,
                           const std::vector<ActivationRecord>& records) {
  const std::size_t width = records.empty() ? 0 : records.front().z.size();
  out << "sample_id,node_id,phrase";
  for (std::size_t k = 0; k < width; ++k) out << ",z_" << k;
  out << '\n';
  char buf[64];
  for (const ActivationRecord& r : records) {
    out << r.sample_id << ',' << r.node_id << ',' << r.phrase;
    for (const double v : r.z) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace dctree
