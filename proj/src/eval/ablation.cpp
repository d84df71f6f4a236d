#include "tidagcn/eval/ablation.hpp"

#include <algorithm>

#include "tidagcn/model/model.hpp"
#include "tidagcn/model/serialize.hpp"
#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names{"tida",   "dagcn",   "gcn_s", "gcn_a",
                                              "gcn_as", "tgcn_ti", "tgcn_m"};
  return names;
}

bool is_variant(const std::string& name) {
  const auto& n = variant_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

TrainingConfig apply_variant(const TrainingConfig& base, const std::string& name) {
  TrainingConfig c = base;
  if (name == "tida") {
  } else if (name == "dagcn") {
    c.alpha = 1.0;
    c.pooling = PoolingMode::Max;
  } else if (name == "gcn_s") {
    c.item_item_edges = false;
  } else if (name == "gcn_a") {
    c.attention = AttentionMode::Uniform;
  } else if (name == "gcn_as") {
    c.item_item_edges = false;
    c.attention = AttentionMode::Uniform;
  } else if (name == "tgcn_ti") {
    c.alpha = 1.0;
  } else if (name == "tgcn_m") {
    c.pooling = PoolingMode::Max;
  } else {
    throw ConfigError("unknown variant '" + name + "'");
  }
  return c;
}

std::vector<std::string> parse_variant_list(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string name = list.substr(start, comma - start);
    if (!is_variant(name)) throw ConfigError("unknown variant '" + name + "'");
    out.push_back(name);
    start = comma + 1;
  }
  return out;
}

EvalReport run_variant(const Dataset& dataset, const TrainingConfig& base, const std::string& name,
                       const EpochCallback& on_epoch) {
  const TrainingConfig config = apply_variant(base, name);
  const Dataset tagged = split_for(dataset, config);
  Recommender model = Recommender::create(tagged, config);
  train(model, tagged, on_epoch);
  EvalReport report = evaluate(model, tagged);
  report.variant = name;
  return report;
}

std::vector<EvalReport> run_ablation(const Dataset& dataset, const TrainingConfig& base,
                                     const std::vector<std::string>& variants,
                                     const std::function<void(const std::string&)>& on_start) {
  std::vector<EvalReport> out;
  for (const auto& v : variants) {
    if (on_start) on_start(v);
    out.push_back(run_variant(dataset, base, v));
  }
  return out;
}

}  // namespace tidagcn
