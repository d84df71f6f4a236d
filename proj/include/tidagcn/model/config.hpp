#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "tidagcn/graph/bucketizer.hpp"

namespace tidagcn {

enum class PoolingMode { Attention, Max };
enum class AttentionMode { Cosine, Uniform };
// AccountItem: q_i = (g_i + e_U) W^q. AccountOnly: q = e_U W^q for every position.
enum class QueryMode { AccountItem, AccountOnly };

std::string to_string(PoolingMode m);
std::string to_string(AttentionMode m);
std::string to_string(QueryMode m);
PoolingMode parse_pooling_mode(const std::string& s);
AttentionMode parse_attention_mode(const std::string& s);
QueryMode parse_query_mode(const std::string& s);

// Every knob of a training run. Defaults: d = 16,
// Adam with lr 1e-3, batch 256, dropout 0.1, beta 0.5, two encoder stacks.
struct TrainingConfig {
  // optimization
  double lr = 1e-3;
  std::size_t batch_size = 256;
  double dropout = 0.1;
  std::size_t n_epochs = 50;
  std::uint64_t seed = 1;
  bool prefix_training = false;

  // graph and propagation
  std::size_t latent_users = 2;  // H
  double alpha = 0.8;
  double leaky_slope = 0.2;
  std::size_t n_layers = 1;
  bool per_layer_weights = false;
  AttentionMode attention = AttentionMode::Cosine;
  bool item_item_edges = true;
  bool strict_cosine = false;
  IntervalBucketizer bucketizer{};

  // sequence encoder
  std::size_t dim = 16;      // d
  std::size_t key_dim = 16;  // d_k, must equal d
  std::size_t ffn_dim = 16;
  std::size_t pool_hidden = 16;
  std::size_t n_stacks = 2;
  double beta = 0.5;
  std::size_t max_len = 50;
  PoolingMode pooling = PoolingMode::Attention;
  QueryMode query = QueryMode::AccountItem;
  double layer_norm_eps = 1e-5;

  // data split
  double train_fraction = 0.85;
  std::uint64_t split_seed = 1;

  // trace.csv carries wall-clock only when enabled, keeping traces byte-stable.
  bool trace_wall_clock = false;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

class KeyValues;

// Flat key=value form covering every field (bucketizer fields are prefixed
// "bucket_"). Unknown keys are ConfigErrors; absent keys keep their defaults.
TrainingConfig config_from(const KeyValues& kv);
TrainingConfig read_config_file(const std::string& path);
// Every field, one per line, in a fixed order.
std::string config_to_string(const TrainingConfig& c);
// 64-bit FNV-1a of config_to_string, as 16 hex digits.
std::string config_fingerprint(const TrainingConfig& c);

}  // namespace tidagcn
