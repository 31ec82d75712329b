// Command-line surface: corpus synthesis, training, evaluation, the
// six-variant ablation grid, end-to-end gradient checking, and attention
// dumps.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "enatt/ablate.hpp"
#include "enatt/checkpoint.hpp"
#include "enatt/datagen.hpp"
#include "enatt/modelcheck.hpp"
#include "enatt/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Loaded {
  enatt::DomainCatalog catalog;
  std::vector<enatt::Example> split;
};

std::string split_file(const std::string& dir, const std::string& split) {
  if (split != "train" && split != "dev" && split != "test")
    throw std::invalid_argument("unknown split '" + split +
                                "' (expected train, dev, or test)");
  return dir + "/" + split + ".jsonl";
}

Loaded load_split(const std::string& dir, const std::string& split) {
  Loaded out;
  out.catalog = enatt::load_catalog(dir + "/catalog.txt");
  out.split = enatt::read_dataset(split_file(dir, split), out.catalog);
  return out;
}

enatt::AblationDataset load_regime(const std::string& dir,
                                   const std::string& name,
                                   const enatt::DomainCatalog& catalog) {
  enatt::AblationDataset d;
  d.name = name;
  d.train = enatt::read_dataset(dir + "/train.jsonl", catalog);
  d.dev = enatt::read_dataset(dir + "/dev.jsonl", catalog);
  d.test = enatt::read_dataset(dir + "/test.jsonl", catalog);
  return d;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size())
      throw std::invalid_argument("bad seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::vector<int> parse_variant_list(const std::string& csv) {
  std::vector<int> variants;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    const int v = std::stoi(item, &pos);
    if (pos != item.size())
      throw std::invalid_argument("bad variant '" + item + "'");
    variants.push_back(v);
  }
  if (variants.empty()) throw std::invalid_argument("empty variant list");
  return variants;
}

void print_metrics(const enatt::MetricsReport& m) {
  std::cout << "examples: " << m.count << '\n';
  std::cout << "top1: " << enatt::format_pct(m.top1) << '\n';
  std::cout << "mrr:  " << enatt::format_pct(m.mrr) << '\n';
  std::cout << "top3: " << enatt::format_pct(m.top3) << '\n';
}

int run_synth(int domains, int train_size, int dev_size, int test_size,
              double inclusion, double mean_enabled, std::uint64_t seed,
              const std::string& out_dir) {
  enatt::RegimeSpec regime;
  regime.inclusion_ratio = inclusion;
  regime.mean_enabled = mean_enabled;
  regime.train_size = train_size;
  regime.dev_size = dev_size;
  regime.test_size = test_size;
  regime.seed = seed;
  const enatt::DomainCatalog catalog = enatt::build_catalog(domains, seed);
  const enatt::Corpus corpus = enatt::generate_corpus(catalog, regime);
  enatt::write_corpus_dir(out_dir, corpus, catalog);
  std::cout << corpus.report.to_string();
  std::cout << "wrote " << out_dir << "/{train,dev,test}.jsonl, catalog.txt, "
            << "report.txt\n";
  return kExitOk;
}

int run_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_path, const std::string& report_path) {
  enatt::TrainConfig cfg;
  if (!config_path.empty()) cfg = enatt::load_train_config(config_path);
  const enatt::DomainCatalog catalog =
      enatt::load_catalog(data_dir + "/catalog.txt");
  const auto train_set =
      enatt::read_dataset(data_dir + "/train.jsonl", catalog);
  const auto dev_set = enatt::read_dataset(data_dir + "/dev.jsonl", catalog);
  const enatt::Vocabulary vocab = enatt::corpus_vocabulary(train_set);

  std::cout << "# resolved config\n" << cfg.to_string() << std::flush;
  enatt::TrainResult result = enatt::train(
      cfg, catalog, train_set, dev_set, vocab,
      [](const enatt::EpochRow& row) {
        std::printf(
            "epoch %d  loss %.4f  dev top1 %s  mrr %s  top3 %s%s\n", row.epoch,
            row.mean_total, enatt::format_pct(row.dev.top1).c_str(),
            enatt::format_pct(row.dev.mrr).c_str(),
            enatt::format_pct(row.dev.top3).c_str(),
            row.improved ? "  *" : "");
        std::fflush(stdout);
      });

  enatt::save_checkpoint(out_path, result.best);
  const std::string rpath =
      report_path.empty() ? out_path + ".report.txt" : report_path;
  write_text(rpath, result.report.to_string());
  std::cout << "best epoch " << result.report.best_epoch << ", dev top1 "
            << enatt::format_pct(result.report.best_dev.top1) << '\n';
  std::cout << "checkpoint: " << out_path << '\n';
  std::cout << "run report: " << rpath << '\n';
  return kExitOk;
}

int run_eval(const std::string& ck_path, const std::string& data_dir,
             const std::string& split) {
  enatt::Checkpoint ck = enatt::load_checkpoint(ck_path);
  Loaded data = load_split(data_dir, split);
  if (data.catalog.n() != ck.meta.config.n_domains)
    throw std::invalid_argument(
        "checkpoint and dataset disagree on the domain count");
  const enatt::MetricsReport m = enatt::evaluate_dataset(
      ck.params, ck.meta.config, data.split, ck.vocab);
  std::cout << "checkpoint: " << ck_path << " (variant " << ck.meta.variant
            << ", epoch " << ck.meta.epoch << ")\n";
  std::cout << "split: " << split << '\n';
  print_metrics(m);
  return kExitOk;
}

int run_ablate(const std::string& biased_dir, const std::string& unbiased_dir,
               const std::string& seeds_csv, const std::string& variants_csv,
               const std::string& config_path, const std::string& out_path) {
  enatt::AblationConfig cfg;
  if (!config_path.empty()) cfg.base = enatt::load_train_config(config_path);
  cfg.seeds = parse_seed_list(seeds_csv);
  cfg.variants = parse_variant_list(variants_csv);

  const enatt::DomainCatalog catalog =
      enatt::load_catalog(biased_dir + "/catalog.txt");
  const enatt::DomainCatalog catalog_u =
      enatt::load_catalog(unbiased_dir + "/catalog.txt");
  if (catalog.n() != catalog_u.n())
    throw std::invalid_argument(
        "ablate: the two regimes use different catalogs");

  std::vector<enatt::AblationDataset> regimes;
  regimes.push_back(load_regime(biased_dir, "biased", catalog));
  regimes.push_back(load_regime(unbiased_dir, "unbiased", catalog));

  std::cout << "# resolved base config\n" << cfg.base.to_string();
  const enatt::AblationGrid grid =
      enatt::ablate(cfg, catalog, regimes, [](const std::string& line) {
        std::cout << line << '\n' << std::flush;
      });
  const std::string text = grid.to_string();
  std::cout << text;
  if (!out_path.empty()) {
    write_text(out_path, text);
    std::cout << "report: " << out_path << '\n';
  }
  return kExitOk;
}

int run_gradcheck(const enatt::ModelCheckSpec& spec) {
  const enatt::GradCheckReport report = enatt::model_grad_check(spec);
  for (const auto& e : report.entries)
    std::printf("%-24s max rel err %.3e (analytic %.6e, numeric %.6e)\n",
                e.param.c_str(), e.max_rel_err, e.analytic, e.numeric);
  std::printf("max rel err %.3e, tolerance %.1e: %s\n", report.max_rel_err,
              report.tolerance, report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitNumerical;
}

int run_dump_attn(const std::string& cks_csv, const std::string& data_dir,
                  const std::string& split, int k) {
  std::vector<enatt::Checkpoint> cks;
  {
    std::istringstream in(cks_csv);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) cks.push_back(enatt::load_checkpoint(item));
  }
  if (cks.empty()) throw std::invalid_argument("no checkpoints given");
  Loaded data = load_split(data_dir, split);
  const enatt::AttentionDump dump =
      enatt::dump_attention(cks, data.split, data.catalog, k);
  std::cout << dump.to_string();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Domain classification with sigmoid enablement attention: data "
      "synthesis, training, evaluation, and ablation"};
  app.require_subcommand(1);

  // synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  int domains = 100, train_size = 50000, dev_size = 5000, test_size = 5000;
  double inclusion = 0.9, mean_enabled = 8.47;
  std::uint64_t synth_seed = 1;
  std::string synth_out = "corpus";
  synth->add_option("--domains", domains, "number of domains (>= 2)");
  synth->add_option("--train", train_size, "training examples");
  synth->add_option("--dev", dev_size, "development examples");
  synth->add_option("--test", test_size, "test examples");
  synth->add_option("--inclusion-ratio", inclusion,
                    "P(ground truth is enabled)");
  synth->add_option("--mean-enabled", mean_enabled,
                    "target mean enabled-set size");
  synth->add_option("--seed", synth_seed, "generation seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // train ---------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Train one model");
  std::string tr_config, tr_data, tr_out = "model.ck", tr_report;
  tr->add_option("--config", tr_config, "training config file");
  tr->add_option("--data", tr_data, "corpus directory")->required();
  tr->add_option("--out", tr_out, "checkpoint output path");
  tr->add_option("--report", tr_report,
                 "run report path (default: <out>.report.txt)");

  // eval ----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string ev_ck, ev_data, ev_split = "test";
  ev->add_option("--checkpoint", ev_ck, "checkpoint path")->required();
  ev->add_option("--data", ev_data, "corpus directory")->required();
  ev->add_option("--split", ev_split, "train, dev, or test");

  // ablate ----------------------------------------------------------------
  auto* ab = app.add_subcommand(
      "ablate", "Train the variant grid on two regimes and tabulate");
  std::string ab_biased, ab_unbiased, ab_seeds = "1,2,3,4,5",
                                      ab_variants = "1,2,3,4,5,6", ab_config,
                                      ab_out;
  ab->add_option("--data-biased", ab_biased, "biased-regime corpus dir")
      ->required();
  ab->add_option("--data-unbiased", ab_unbiased, "unbiased-regime corpus dir")
      ->required();
  ab->add_option("--seeds", ab_seeds, "comma-separated seed list");
  ab->add_option("--variants", ab_variants, "comma-separated variant list");
  ab->add_option("--config", ab_config, "base training config file");
  ab->add_option("--out", ab_out, "grid report output path");

  // gradcheck -------------------------------------------------------------
  auto* gc = app.add_subcommand(
      "gradcheck", "Check analytic gradients of a small end-to-end model");
  enatt::ModelCheckSpec spec;
  gc->add_option("--vocab", spec.vocab_size, "vocabulary size");
  gc->add_option("--domains", spec.n_domains, "number of domains");
  gc->add_option("--emb", spec.d_emb, "embedding width");
  gc->add_option("--hidden", spec.d_hidden, "recurrent width");
  gc->add_option("--ff", spec.d_ff, "feed-forward width");
  gc->add_option("--enabled", spec.n_enabled, "enabled-set size");
  gc->add_option("--seq", spec.seq_len, "utterance length");
  gc->add_option("--variant", spec.variant, "model variant 1..6");
  gc->add_option("--epoch", spec.epoch, "schedule position t");
  gc->add_option("--tolerance", spec.tolerance, "max relative error");
  gc->add_option("--seed", spec.seed, "fixture seed");

  // dump-attn -------------------------------------------------------------
  auto* da = app.add_subcommand(
      "dump-attn", "Show attention weights on examples only the last "
                   "checkpoint gets right");
  std::string da_cks, da_data, da_split = "test";
  int da_k = 5;
  da->add_option("--checkpoints", da_cks,
                 "comma-separated checkpoint paths (last = reference)")
      ->required();
  da->add_option("--data", da_data, "corpus directory")->required();
  da->add_option("--split", da_split, "train, dev, or test");
  da->add_option("--k", da_k, "maximum examples to show");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (synth->parsed())
      return run_synth(domains, train_size, dev_size, test_size, inclusion,
                       mean_enabled, synth_seed, synth_out);
    if (tr->parsed()) return run_train(tr_config, tr_data, tr_out, tr_report);
    if (ev->parsed()) return run_eval(ev_ck, ev_data, ev_split);
    if (ab->parsed())
      return run_ablate(ab_biased, ab_unbiased, ab_seeds, ab_variants,
                        ab_config, ab_out);
    if (gc->parsed()) return run_gradcheck(spec);
    if (da->parsed()) return run_dump_attn(da_cks, da_data, da_split, da_k);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const std::string msg = e.what();
    return msg.find("diverged") != std::string::npos ||
                   msg.find("non-finite") != std::string::npos
               ? kExitNumerical
               : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
