// Command-line front end: generate, train, eval, ablate.
//
// Exit codes: 0 success, 1 data/config/numeric error, 2 usage error.
// TIDAGCN_LOG=quiet|info|debug controls progress output on stderr.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/data/keyvalue.hpp"
#include "tidagcn/data/synthetic.hpp"
#include "tidagcn/eval/ablation.hpp"
#include "tidagcn/eval/evaluate.hpp"
#include "tidagcn/eval/report.hpp"
#include "tidagcn/model/model.hpp"
#include "tidagcn/model/serialize.hpp"
#include "tidagcn/model/trainer.hpp"
#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/kernels.hpp"

namespace {

using namespace tidagcn;

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity() {
  const char* v = std::getenv("TIDAGCN_LOG");
  if (!v) return Verbosity::Info;
  const std::string s = v;
  if (s == "quiet") return Verbosity::Quiet;
  if (s == "debug") return Verbosity::Debug;
  return Verbosity::Info;
}

void info(const std::string& msg) {
  if (verbosity() != Verbosity::Quiet) std::cerr << msg << '\n';
}

Dataset load_data(const std::string& path) {
  Dataset ds = parse_tsv_file(path);
  if (ds.unsorted_sequences > 0) {
    info("warning: " + std::to_string(ds.unsorted_sequences) +
         " sequence(s) had out-of-order timestamps and were sorted");
  }
  info("data: " + std::to_string(ds.n_accounts()) + " accounts, " +
       std::to_string(ds.n_items(Domain::A)) + " + " + std::to_string(ds.n_items(Domain::B)) +
       " items, " + std::to_string(ds.sequences.size()) + " sequences");
  return ds;
}

EpochCallback progress(std::size_t n_epochs) {
  return [n_epochs](const EpochRecord& r) {
    const Verbosity v = verbosity();
    if (v == Verbosity::Quiet) return;
    if (v == Verbosity::Debug || r.epoch % 10 == 0 || r.epoch == n_epochs) {
      std::cerr << "epoch " << r.epoch << "  joint " << r.joint_loss << "  A " << r.loss_a
                << "  B " << r.loss_b << "  (" << r.wall_clock_ms << " ms)\n";
    }
  };
}

void summarize(const EvalReport& r) {
  for (Domain d : {Domain::A, Domain::B}) {
    const auto& m = r.domain[index_of(d)];
    std::string line = r.variant + " " + domain_letter(d) + ": ";
    if (!m.present) {
      line += "no test sequences";
    } else {
      line += "recall@5 " + format_double(m.recall_at_5) + "  recall@20 " +
              format_double(m.recall_at_20) + "  mrr@5 " + format_double(m.mrr_at_5) +
              "  mrr@20 " + format_double(m.mrr_at_20) + "  (n=" + std::to_string(m.n_evaluated) +
              ")";
    }
    info(line);
  }
}

int cmd_generate(const std::string& spec_path, const std::string& out) {
  const SyntheticSpec spec = SyntheticSpec::from(KeyValues::parse_file(spec_path));
  const SyntheticData data = generate(spec);
  write_tsv_file(data.dataset, out);
  info("wrote " + std::to_string(data.dataset.n_events()) + " events in " +
       std::to_string(data.dataset.sequences.size()) + " sequences to " + out);
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& out) {
  const TrainingConfig config = read_config_file(config_path);
  const Dataset tagged = split_for(load_data(data_path), config);
  Recommender model = Recommender::create(tagged, config);
  info("kernels: " + std::string(kernels::active().name) + ", graph nodes: " +
       std::to_string(model.graph().n_nodes()));
  const TrainingTrace trace = train(model, tagged, progress(config.n_epochs));
  save_model(out, model, trace);
  info("saved model to " + out);
  return 0;
}

int cmd_eval(const std::string& model_dir, const std::string& data_path,
             const std::string& report_path) {
  const Dataset data = load_data(data_path);
  const Recommender model = load_model(model_dir, data);
  const Dataset tagged = split_for(data, model.config());
  const EvalReport report = evaluate(model, tagged);
  write_reports_file(std::span(&report, 1), report_path);
  summarize(report);
  return 0;
}

int cmd_ablate(const std::string& data_path, const std::string& config_path,
               const std::string& variants, const std::string& report_path) {
  const TrainingConfig config = read_config_file(config_path);
  const auto names = parse_variant_list(variants);
  const Dataset data = load_data(data_path);
  const auto reports =
      run_ablation(data, config, names, [](const std::string& v) { info("variant " + v); });
  write_reports_file(reports, report_path);
  for (const auto& r : reports) summarize(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-account cross-domain sequential recommender"};
  app.require_subcommand(1);

  std::string spec, out, data, config, model, report, variants;
  auto* gen = app.add_subcommand("generate", "Write a synthetic interaction log");
  gen->add_option("--spec", spec, "Synthetic spec (key=value)")->required();
  gen->add_option("--out", out, "Output TSV")->required();

  auto* tr = app.add_subcommand("train", "Train a model and write it to a directory");
  tr->add_option("--data", data, "Interaction TSV")->required();
  tr->add_option("--config", config, "Training config (key=value)")->required();
  tr->add_option("--out", out, "Model directory")->required();

  auto* ev = app.add_subcommand("eval", "Evaluate a trained model on its test split");
  ev->add_option("--model", model, "Model directory")->required();
  ev->add_option("--data", data, "Interaction TSV")->required();
  ev->add_option("--report", report, "JSON-lines report")->required();

  auto* ab = app.add_subcommand("ablate", "Train and evaluate ablation variants");
  ab->add_option("--data", data, "Interaction TSV")->required();
  ab->add_option("--config", config, "Base training config (key=value)")->required();
  ab->add_option("--variants", variants,
                 "Comma-separated: tida,dagcn,gcn_s,gcn_a,gcn_as,tgcn_ti,tgcn_m")
      ->required();
  ab->add_option("--report", report, "JSON-lines report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(spec, out);
    if (tr->parsed()) return cmd_train(data, config, out);
    if (ev->parsed()) return cmd_eval(model, data, report);
    if (ab->parsed()) return cmd_ablate(data, config, variants, report);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
