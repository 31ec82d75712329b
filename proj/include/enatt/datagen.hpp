#pragma once

#include <span>
#include <string>
#include <vector>

#include "enatt/rng.hpp"
#include "enatt/vocab.hpp"

namespace enatt {

// One utterance pattern: literal lowercase words plus slot markers
// ({topic}, {place}, {time}, {brand}) filled at generation time.
struct UtteranceTemplate {
  std::vector<std::string> tokens;
};

struct Domain {
  int id = -1;
  std::string name;        // the domain's unique brand word
  int family = -1;         // confusable-family index, -1 in thin catalogs
  double popularity = 0.0; // positive sampling weight (Zipf-distributed)
  std::vector<UtteranceTemplate> templates;  // shared family + unique patterns
};

// Catalog of n domains grouped into confusable families: domains of one
// family share the family's utterance templates verbatim (only the
// enablement set can tell them apart), while each domain also owns unique
// templates built around its brand word.
struct DomainCatalog {
  std::vector<Domain> domains;
  std::vector<std::vector<std::string>> family_topics;  // per family

  int n() const { return static_cast<int>(domains.size()); }
  int domain_id(const std::string& name) const;  // -1 if unknown
};

struct Example {
  std::vector<std::string> tokens;
  int ground_truth = -1;
  std::vector<int> enabled;  // sorted unique domain ids; may be empty
};

struct RegimeSpec {
  double inclusion_ratio = 0.9;  // p: P(ground truth is in the enabled set)
  double mean_enabled = 8.47;    // target mean enabled-set size
  int train_size = 50000;
  int dev_size = 5000;
  int test_size = 5000;
  std::uint64_t seed = 1;
};

struct SplitStats {
  int count = 0;
  double inclusion = 0.0;
  double mean_enabled = 0.0;
};

struct GenerationReport {
  int n_domains = 0;
  double target_inclusion = 0.0;
  double target_mean_enabled = 0.0;
  std::uint64_t seed = 0;
  SplitStats train, dev, test;

  std::string to_string() const;
};

struct Corpus {
  std::vector<Example> train, dev, test;
  GenerationReport report;
};

// Deterministic catalog: same (n, seed) -> identical catalog. Throws for
// n < 2. Popularity weights follow a Zipf profile over a seeded shuffle of
// the domains.
DomainCatalog build_catalog(int n, std::uint64_t seed);

// Ground truth sampled by popularity; utterance realized from one of its
// templates; the enabled set contains the ground truth with probability p
// plus popularity-weighted distinct distractors sized so the corpus mean
// matches the target. Splits are disjoint at the utterance-string level.
// Throws std::invalid_argument for unattainable regimes (e.g. mean > n).
Corpus generate_corpus(const DomainCatalog& catalog, const RegimeSpec& regime);

// Line-delimited records {"text","label","enabled"}; labels are domain
// names. Errors carry the 1-based line number. Round-trips are lossless.
void write_dataset(const std::string& path, std::span<const Example> examples,
                   const DomainCatalog& catalog);
std::vector<Example> read_dataset(const std::string& path,
                                  const DomainCatalog& catalog);

// id <tab> name <tab> popularity, one line per domain. Loading yields a thin
// catalog (names and weights only) sufficient for training and evaluation.
void save_catalog(const std::string& path, const DomainCatalog& catalog);
DomainCatalog load_catalog(const std::string& path);

// Writes train/dev/test.jsonl, catalog.txt, and report.txt under dir.
void write_corpus_dir(const std::string& dir, const Corpus& corpus,
                      const DomainCatalog& catalog);

// Vocabulary over the training split's tokens (dev/test unknowns map to the
// unknown id).
Vocabulary corpus_vocabulary(std::span<const Example> train);

}  // namespace enatt
