#pragma once

// Model directory layout:
//   config.kv   every TrainingConfig field (key = value)
//   params.bin  named parameter tensors, little-endian float64
//   trace.csv   training trace
//   meta.kv     sizes of the data the model was trained on
//
// The graph is not stored: it is rebuilt from the data file and the split
// settings in config.kv, which reproduces it exactly.

#include <string>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/model/model.hpp"
#include "tidagcn/model/params.hpp"
#include "tidagcn/model/trainer.hpp"

namespace tidagcn {

void write_parameters(ModelParameters& params, const std::string& path);
// Reads into `params`, whose tensor names and shapes must match the file.
void read_parameters(ModelParameters& params, const std::string& path);

void save_model(const std::string& dir, Recommender& model, const TrainingTrace& trace);

// Rebuilds the recommender for `dataset` (unsplit; split per the stored
// config). Throws DataError when sizes disagree with the stored model.
Recommender load_model(const std::string& dir, const Dataset& dataset);

// Split applied by train/eval for a given config.
Dataset split_for(const Dataset& dataset, const TrainingConfig& config);

}  // namespace tidagcn
