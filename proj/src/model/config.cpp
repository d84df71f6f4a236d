#include "tidagcn/model/config.hpp"

#include <cstdio>
#include <sstream>

#include "tidagcn/data/keyvalue.hpp"
#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {

std::string to_string(PoolingMode m) { return m == PoolingMode::Max ? "max" : "attention"; }
std::string to_string(AttentionMode m) { return m == AttentionMode::Uniform ? "uniform" : "cosine"; }
std::string to_string(QueryMode m) {
  return m == QueryMode::AccountOnly ? "account" : "account_item";
}

PoolingMode parse_pooling_mode(const std::string& s) {
  if (s == "attention") return PoolingMode::Attention;
  if (s == "max") return PoolingMode::Max;
  throw ConfigError("unknown pooling '" + s + "' (expected attention or max)");
}

AttentionMode parse_attention_mode(const std::string& s) {
  if (s == "cosine") return AttentionMode::Cosine;
  if (s == "uniform") return AttentionMode::Uniform;
  throw ConfigError("unknown attention '" + s + "' (expected cosine or uniform)");
}

QueryMode parse_query_mode(const std::string& s) {
  if (s == "account_item") return QueryMode::AccountItem;
  if (s == "account") return QueryMode::AccountOnly;
  throw ConfigError("unknown query mode '" + s + "' (expected account_item or account)");
}

void TrainingConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (!(lr >= 0.0)) fail("lr must be >= 0");
  if (batch_size == 0) fail("batch_size must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (latent_users == 0) fail("latent_users must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) fail("leaky_slope must lie in (0, 1)");
  if (n_layers == 0) fail("n_layers must be >= 1");
  if (dim == 0) fail("dim must be >= 1");
  if (key_dim != dim) fail("key_dim must equal dim");
  if (ffn_dim == 0 || pool_hidden == 0) fail("ffn_dim and pool_hidden must be >= 1");
  if (n_stacks == 0) fail("n_stacks must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) fail("beta must lie in [0, 1]");
  if (max_len == 0) fail("max_len must be >= 1");
  if (!(layer_norm_eps > 0.0)) fail("layer_norm_eps must be > 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0, 1)");
  bucketizer.validate();
}

TrainingConfig config_from(const KeyValues& kv) {
  TrainingConfig c;
  c.lr = kv.get_double("lr", c.lr);
  c.batch_size = kv.get_uint("batch_size", c.batch_size);
  c.dropout = kv.get_double("dropout", c.dropout);
  c.n_epochs = kv.get_uint("n_epochs", c.n_epochs);
  c.seed = kv.get_uint("seed", c.seed);
  c.prefix_training = kv.get_bool("prefix_training", c.prefix_training);
  c.latent_users = kv.get_uint("latent_users", c.latent_users);
  c.alpha = kv.get_double("alpha", c.alpha);
  c.leaky_slope = kv.get_double("leaky_slope", c.leaky_slope);
  c.n_layers = kv.get_uint("n_layers", c.n_layers);
  c.per_layer_weights = kv.get_bool("per_layer_weights", c.per_layer_weights);
  c.attention = parse_attention_mode(kv.get_string("attention", to_string(c.attention)));
  c.item_item_edges = kv.get_bool("item_item_edges", c.item_item_edges);
  c.strict_cosine = kv.get_bool("strict_cosine", c.strict_cosine);
  c.bucketizer.clip_min = kv.get_int("bucket_clip_min", c.bucketizer.clip_min);
  c.bucketizer.clip_max = kv.get_int("bucket_clip_max", c.bucketizer.clip_max);
  c.bucketizer.scheme =
      parse_bucket_scheme(kv.get_string("bucket_scheme", to_string(c.bucketizer.scheme)));
  c.bucketizer.n_buckets = kv.get_uint("n_buckets", c.bucketizer.n_buckets);
  c.dim = kv.get_uint("dim", c.dim);
  c.key_dim = kv.get_uint("key_dim", c.dim);
  c.ffn_dim = kv.get_uint("ffn_dim", c.dim);
  c.pool_hidden = kv.get_uint("pool_hidden", c.dim);
  c.n_stacks = kv.get_uint("n_stacks", c.n_stacks);
  c.beta = kv.get_double("beta", c.beta);
  c.max_len = kv.get_uint("max_len", c.max_len);
  c.pooling = parse_pooling_mode(kv.get_string("pooling", to_string(c.pooling)));
  c.query = parse_query_mode(kv.get_string("query", to_string(c.query)));
  c.layer_norm_eps = kv.get_double("layer_norm_eps", c.layer_norm_eps);
  c.train_fraction = kv.get_double("train_fraction", c.train_fraction);
  c.split_seed = kv.get_uint("split_seed", c.split_seed);
  c.trace_wall_clock = kv.get_bool("trace_wall_clock", c.trace_wall_clock);
  kv.require_all_used();
  c.validate();
  return c;
}

TrainingConfig read_config_file(const std::string& path) {
  return config_from(KeyValues::parse_file(path));
}

std::string config_to_string(const TrainingConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "lr = " << format_double(c.lr) << '\n'
    << "batch_size = " << c.batch_size << '\n'
    << "dropout = " << format_double(c.dropout) << '\n'
    << "n_epochs = " << c.n_epochs << '\n'
    << "seed = " << c.seed << '\n'
    << "prefix_training = " << b(c.prefix_training) << '\n'
    << "latent_users = " << c.latent_users << '\n'
    << "alpha = " << format_double(c.alpha) << '\n'
    << "leaky_slope = " << format_double(c.leaky_slope) << '\n'
    << "n_layers = " << c.n_layers << '\n'
    << "per_layer_weights = " << b(c.per_layer_weights) << '\n'
    << "attention = " << to_string(c.attention) << '\n'
    << "item_item_edges = " << b(c.item_item_edges) << '\n'
    << "strict_cosine = " << b(c.strict_cosine) << '\n'
    << "bucket_clip_min = " << c.bucketizer.clip_min << '\n'
    << "bucket_clip_max = " << c.bucketizer.clip_max << '\n'
    << "bucket_scheme = " << to_string(c.bucketizer.scheme) << '\n'
    << "n_buckets = " << c.bucketizer.n_buckets << '\n'
    << "dim = " << c.dim << '\n'
    << "key_dim = " << c.key_dim << '\n'
    << "ffn_dim = " << c.ffn_dim << '\n'
    << "pool_hidden = " << c.pool_hidden << '\n'
    << "n_stacks = " << c.n_stacks << '\n'
    << "beta = " << format_double(c.beta) << '\n'
    << "max_len = " << c.max_len << '\n'
    << "pooling = " << to_string(c.pooling) << '\n'
    << "query = " << to_string(c.query) << '\n'
    << "layer_norm_eps = " << format_double(c.layer_norm_eps) << '\n'
    << "train_fraction = " << format_double(c.train_fraction) << '\n'
    << "split_seed = " << c.split_seed << '\n'
    << "trace_wall_clock = " << b(c.trace_wall_clock) << '\n';
  return o.str();
}

std::string config_fingerprint(const TrainingConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_string(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tidagcn
