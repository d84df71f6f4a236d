#include "tidagcn/eval/report.hpp"

#include <fstream>
#include <json.hpp>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {
namespace {

nlohmann::ordered_json config_json(const TrainingConfig& c) {
  nlohmann::ordered_json j;
  j["alpha"] = c.alpha;
  j["pooling"] = to_string(c.pooling);
  j["attention"] = to_string(c.attention);
  j["item_item_edges"] = c.item_item_edges;
  j["query"] = to_string(c.query);
  j["prefix_training"] = c.prefix_training;
  j["latent_users"] = c.latent_users;
  j["beta"] = c.beta;
  j["dim"] = c.dim;
  j["n_layers"] = c.n_layers;
  j["n_stacks"] = c.n_stacks;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["dropout"] = c.dropout;
  j["n_epochs"] = c.n_epochs;
  j["seed"] = c.seed;
  j["train_fraction"] = c.train_fraction;
  j["split_seed"] = c.split_seed;
  return j;
}

}  // namespace

std::string report_lines(const EvalReport& report) {
  std::string out;
  for (Domain d : {Domain::A, Domain::B}) {
    const DomainMetrics& m = report.domain[index_of(d)];
    nlohmann::ordered_json j;
    j["variant"] = report.variant;
    j["domain"] = std::string(1, domain_letter(d));
    j["n_test_sequences"] = report.n_test_sequences;
    j["n_evaluated"] = m.n_evaluated;
    j["skipped_short"] = m.skipped_short;
    j["metrics_present"] = m.present;
    for (auto [key, value] : {std::pair{"recall@5", m.recall_at_5}, {"recall@20", m.recall_at_20},
                              {"mrr@5", m.mrr_at_5}, {"mrr@20", m.mrr_at_20}}) {
      if (m.present) {
        j[key] = value;
      } else {
        j[key] = nullptr;
      }
    }
    j["config_fingerprint"] = report.config_fingerprint;
    j["config"] = config_json(report.config);
    j["wall_clock_ms"] = report.wall_clock_ms;
    out += j.dump() + "\n";
  }
  return out;
}

void write_reports(std::span<const EvalReport> reports, std::ostream& out) {
  for (const auto& r : reports) out << report_lines(r);
}

void write_reports_file(std::span<const EvalReport> reports, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report '" + path + "'");
  write_reports(reports, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace tidagcn
