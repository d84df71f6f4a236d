#pragma once

// Ablation variants, each a config transform of the full model:
//   tida     unchanged
//   dagcn    alpha = 1 and max pooling
//   gcn_s    no item-item edges
//   gcn_a    uniform attention
//   gcn_as   no item-item edges and uniform attention
//   tgcn_ti  alpha = 1 (no interval term), attention pooling kept
//   tgcn_m   intervals kept, max pooling

#include <functional>
#include <string>
#include <vector>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/eval/evaluate.hpp"
#include "tidagcn/model/config.hpp"
#include "tidagcn/model/trainer.hpp"

namespace tidagcn {

const std::vector<std::string>& variant_names();
bool is_variant(const std::string& name);

// Throws ConfigError for unknown names.
TrainingConfig apply_variant(const TrainingConfig& base, const std::string& name);

// Splits comma-separated names; throws ConfigError for unknown or empty entries.
std::vector<std::string> parse_variant_list(const std::string& list);

// Trains and evaluates one variant on `dataset` (unsplit; split per config).
EvalReport run_variant(const Dataset& dataset, const TrainingConfig& base, const std::string& name,
                       const EpochCallback& on_epoch = {});

std::vector<EvalReport> run_ablation(const Dataset& dataset, const TrainingConfig& base,
                                     const std::vector<std::string>& variants,
                                     const std::function<void(const std::string&)>& on_start = {});

}  // namespace tidagcn
