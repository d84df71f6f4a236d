#include "tidagcn/model/params.hpp"

#include "tidagcn/numeric/optim.hpp"

namespace tidagcn {
namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ULL + salt + 0x632BE59BD9B4E019ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Tensor zeros_param(Shape shape) {
  return Tensor::parameter(shape, std::vector<double>(shape_size(shape), 0.0));
}

Tensor ones_param(Shape shape) {
  return Tensor::parameter(shape, std::vector<double>(shape_size(shape), 1.0));
}

}  // namespace

ModelParameters ModelParameters::initialize(const Sizes& sizes, const TrainingConfig& config,
                                            std::uint64_t seed) {
  const std::size_t d = config.dim;
  std::uint64_t salt = 0;
  auto xavier = [&](Shape shape) { return xavier_init(shape, mix(seed, ++salt)); };

  ModelParameters p;
  // Lookup tables use the embedding width as both fans: every row enters
  // d x d layers, and fans of (n_rows, d) would shrink rows as the graph grows.
  p.node_embeddings = xavier_init({sizes.n_nodes, d}, d, d, mix(seed, ++salt));
  p.interval_embeddings = xavier_init({sizes.n_buckets, d}, d, d, mix(seed, ++salt));
  const std::size_t n_w = config.per_layer_weights ? config.n_layers : 1;
  for (std::size_t l = 0; l < n_w; ++l) {
    p.w1.push_back(xavier({d, d}));
    p.w2.push_back(xavier({d, d}));
  }
  for (std::size_t s = 0; s < config.n_stacks; ++s) {
    EncoderStack st;
    st.wq = xavier({d, config.key_dim});
    st.wk = xavier({d, config.key_dim});
    st.ffn_w1 = xavier({config.key_dim, config.ffn_dim});
    st.ffn_b1 = zeros_param({config.ffn_dim});
    st.ffn_w2 = xavier({config.ffn_dim, config.key_dim});
    st.ffn_b2 = zeros_param({config.key_dim});
    st.ln_gain = ones_param({config.key_dim});
    st.ln_bias = zeros_param({config.key_dim});
    p.stacks.push_back(std::move(st));
  }
  p.pool_w1 = xavier({2 * d, config.pool_hidden});
  p.pool_b = zeros_param({config.pool_hidden});
  p.pool_w2 = xavier({config.pool_hidden, 1});
  p.w_a = xavier({sizes.n_items_a, 2 * d});
  p.b_a = zeros_param({sizes.n_items_a});
  p.w_b = xavier({sizes.n_items_b, 2 * d});
  p.b_b = zeros_param({sizes.n_items_b});
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParameters::named() {
  std::vector<std::pair<std::string, Tensor*>> out{
      {"node_embeddings", &node_embeddings},
      {"interval_embeddings", &interval_embeddings},
  };
  for (std::size_t l = 0; l < w1.size(); ++l) {
    out.emplace_back("w1." + std::to_string(l), &w1[l]);
    out.emplace_back("w2." + std::to_string(l), &w2[l]);
  }
  for (std::size_t s = 0; s < stacks.size(); ++s) {
    const std::string pre = "stack" + std::to_string(s) + ".";
    auto& st = stacks[s];
    out.emplace_back(pre + "wq", &st.wq);
    out.emplace_back(pre + "wk", &st.wk);
    out.emplace_back(pre + "ffn_w1", &st.ffn_w1);
    out.emplace_back(pre + "ffn_b1", &st.ffn_b1);
    out.emplace_back(pre + "ffn_w2", &st.ffn_w2);
    out.emplace_back(pre + "ffn_b2", &st.ffn_b2);
    out.emplace_back(pre + "ln_gain", &st.ln_gain);
    out.emplace_back(pre + "ln_bias", &st.ln_bias);
  }
  out.emplace_back("pool_w1", &pool_w1);
  out.emplace_back("pool_b", &pool_b);
  out.emplace_back("pool_w2", &pool_w2);
  out.emplace_back("w_a", &w_a);
  out.emplace_back("b_a", &b_a);
  out.emplace_back("w_b", &w_b);
  out.emplace_back("b_b", &b_b);
  return out;
}

std::vector<Tensor> ModelParameters::all() {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) out.push_back(*t);
  return out;
}

}  // namespace tidagcn
