#include "tidagcn/model/serialize.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "tidagcn/data/keyvalue.hpp"
#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {
namespace {

constexpr char kMagic[8] = {'T', 'I', 'D', 'A', 'P', 'R', 'M', '1'};

static_assert(std::endian::native == std::endian::little, "params.bin assumes little-endian");

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw DataError(path + ": truncated parameter file");
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write '" + path + "'");
}

}  // namespace

void write_parameters(ModelParameters& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  const auto named = params.named();
  out.write(kMagic, sizeof kMagic);
  put_u64(out, named.size());
  for (const auto& [name, t] : named) {
    put_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u64(out, t->rank());
    for (std::size_t dim : t->shape()) put_u64(out, dim);
    out.write(reinterpret_cast<const char*>(t->data().data()),
              static_cast<std::streamsize>(t->size() * sizeof(double)));
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

void read_parameters(ModelParameters& params, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError(path + ": not a parameter file");
  }
  auto named = params.named();
  if (get_u64(in, path) != named.size()) throw DataError(path + ": parameter count mismatch");
  for (auto& [name, t] : named) {
    const std::uint64_t len = get_u64(in, path);
    if (len > 4096) throw DataError(path + ": corrupt parameter name");
    std::string stored(len, '\0');
    in.read(stored.data(), static_cast<std::streamsize>(len));
    if (stored != name) {
      throw DataError(path + ": expected parameter '" + name + "', found '" + stored + "'");
    }
    Shape shape(get_u64(in, path));
    for (auto& dim : shape) dim = get_u64(in, path);
    if (shape != t->shape()) {
      throw DataError(path + ": parameter '" + name + "' has shape " + shape_string(shape) +
                      ", model expects " + shape_string(t->shape()));
    }
    auto dst = t->mutable_data();
    if (!in.read(reinterpret_cast<char*>(dst.data()),
                 static_cast<std::streamsize>(dst.size() * sizeof(double)))) {
      throw DataError(path + ": truncated parameter file");
    }
  }
}

Dataset split_for(const Dataset& dataset, const TrainingConfig& config) {
  return split(dataset, config.train_fraction, config.split_seed);
}

void save_model(const std::string& dir, Recommender& model, const TrainingTrace& trace) {
  std::filesystem::create_directories(dir);
  const auto& g = model.graph();
  write_text(dir + "/config.kv", config_to_string(model.config()));
  write_parameters(model.params(), dir + "/params.bin");
  write_text(dir + "/trace.csv", trace.to_csv(model.config().trace_wall_clock));
  write_text(dir + "/meta.kv", "n_accounts = " + std::to_string(g.n_accounts()) +
                                   "\nn_items_a = " + std::to_string(g.n_items_a()) +
                                   "\nn_items_b = " + std::to_string(g.n_items_b()) +
                                   "\nn_nodes = " + std::to_string(g.n_nodes()) +
                                   "\nconfig_fingerprint = " + config_fingerprint(model.config()) +
                                   "\n");
}

Recommender load_model(const std::string& dir, const Dataset& dataset) {
  if (!std::filesystem::is_directory(dir)) throw DataError("model directory '" + dir + "' not found");
  const TrainingConfig config = read_config_file(dir + "/config.kv");
  const KeyValues meta = KeyValues::parse_file(dir + "/meta.kv");
  const Dataset tagged = split_for(dataset, config);
  const std::size_t n_accounts = meta.get_uint("n_accounts", 0);
  const std::size_t n_items_a = meta.get_uint("n_items_a", 0);
  const std::size_t n_items_b = meta.get_uint("n_items_b", 0);
  meta.get_uint("n_nodes", 0);
  const std::string fingerprint = meta.get_string("config_fingerprint", "");
  meta.require_all_used();
  if (fingerprint != config_fingerprint(config)) {
    throw DataError("config.kv in '" + dir + "' does not match the fingerprint in meta.kv");
  }
  if (n_accounts != tagged.n_accounts() || n_items_a != tagged.n_items(Domain::A) ||
      n_items_b != tagged.n_items(Domain::B)) {
    throw DataError("data file does not match the model in '" + dir +
                    "' (account or item counts differ)");
  }
  Recommender model = Recommender::create(tagged, config);
  read_parameters(model.params(), dir + "/params.bin");
  return model;
}

}  // namespace tidagcn
