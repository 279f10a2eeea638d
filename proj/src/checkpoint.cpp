#include "dctree/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "dctree/error.hpp"

namespace dctree {

namespace {

constexpr const char* kFormat = "dctree-checkpoint";
constexpr int kVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, Model& model) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["variant"] = to_string(model.variant);
  doc["task"] = to_string(model.task);
  doc["sizes"] = {
      {"d", model.sizes.d},
      {"e", model.sizes.e},
      {"m", model.sizes.m},
      {"z", model.sizes.z},
      {"classes", model.sizes.classes},
      {"merge_hidden", model.sizes.merge_hidden},
      {"merge_extras", model.sizes.merge_extras},
  };
  doc["vocab"] = model.vocab.tokens();

  nlohmann::ordered_json params;
  for (const ParamRef& p : model.named_params()) {
    nlohmann::ordered_json entry;
    entry["shape"] = {p.tensor->rows(), p.tensor->cols()};
    entry["data"] = p.tensor->data();
    params[p.name] = std::move(entry);
  }
  doc["params"] = std::move(params);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path + ": invalid JSON: " + e.what());
  }

  try {
    if (doc.at("format") != kFormat || doc.at("version") != kVersion) {
      throw DataError("checkpoint " + path + ": unknown format or version");
    }
    const Variant variant = variant_from_string(doc.at("variant"));
    const Task task = task_from_string(doc.at("task"));
    const auto& js = doc.at("sizes");
    Sizes sizes;
    sizes.d = js.at("d");
    sizes.e = js.at("e");
    sizes.m = js.at("m");
    sizes.z = js.at("z");
    sizes.classes = js.at("classes");
    sizes.merge_hidden = js.at("merge_hidden");
    sizes.merge_extras = js.at("merge_extras");

    Vocab vocab;
    const auto& tokens = doc.at("vocab");
    if (tokens.empty() || tokens.at(0) != Vocab::kUnkToken) {
      throw DataError("checkpoint " + path + ": malformed vocabulary");
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      vocab.add(tokens.at(i).get<std::string>());
    }

    Model model = make_model(variant, task, sizes, std::move(vocab));
    model.embeddings = Tensor(model.vocab.size(), sizes.e);

    const auto& params = doc.at("params");
    std::size_t consumed = 0;
    for (const ParamRef& p : model.named_params()) {
      const auto it = params.find(p.name);
      if (it == params.end()) {
        throw DataError("checkpoint " + path + ": missing parameter " + p.name);
      }
      const auto& shape = it->at("shape");
      if (shape.size() != 2 || shape.at(0) != p.tensor->rows() ||
          shape.at(1) != p.tensor->cols()) {
        throw DataError("checkpoint " + path + ": parameter " + p.name +
                        " has shape " + shape.dump() + ", expected " +
                        p.tensor->shape_str());
      }
      const auto& data = it->at("data");
      if (data.size() != p.tensor->data().size()) {
        throw DataError("checkpoint " + path + ": parameter " + p.name +
                        " payload length mismatch");
      }
      p.tensor->data() = data.get<std::vector<double>>();
      ++consumed;
    }
    if (consumed != params.size()) {
      throw DataError("checkpoint " + path +
                      ": contains parameters unknown to this variant/task");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace dctree
