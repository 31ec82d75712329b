#include "enatt/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace enatt {

namespace {

using Words = std::vector<std::string>;

struct FamilySpec {
  const char* name;
  Words topics;
  std::vector<const char*> shared_templates;
  Words brands;
};

// Ten confusable families. Topics are the within-family content words;
// shared templates never mention a brand, so any sibling domain could have
// produced them — only the enablement set disambiguates. Brand words are
// globally unique and appear only in a domain's own unique templates.
const std::vector<FamilySpec>& family_specs() {
  static const std::vector<FamilySpec> specs = {
      {"weather",
       {"forecast", "temperature", "humidity", "rainfall", "wind", "storm",
        "sunshine", "snowfall", "fog", "frost", "heatwave", "drizzle",
        "thunder", "clouds", "pressure", "visibility"},
       {"what is the {topic} in {place} {time}",
        "give me the {topic} for {place} {time}",
        "check the {topic} in {place} for {time}",
        "is there {topic} expected in {place} {time}",
        "how bad is the {topic} in {place} {time}",
        "will the {topic} in {place} change by {time}"},
       {"climately", "stormwatch", "skycast", "weatherly", "cloudpeek",
        "rainradar", "sunspotter", "frostline", "windvane", "barometra",
        "mistview", "heatindex"}},
      {"music",
       {"song", "playlist", "album", "jazz", "melody", "concert", "radio",
        "podcast", "symphony", "ballad", "chorus", "rhythm", "guitar",
        "piano", "drums", "lyrics"},
       {"play some {topic} from {place} {time}",
        "put on the {topic} station from {place} {time}",
        "queue a {topic} mix from {place} for {time}",
        "start a {topic} set from {place} {time}",
        "find a {topic} show near {place} {time}",
        "save that {topic} recording from {place} {time}"},
       {"tunebox", "melodia", "playwave", "discjoy", "soundloft", "trackmix",
        "vibeplay", "humcast", "notestream", "beatcrate", "chordly",
        "echotune"}},
      {"news",
       {"headlines", "politics", "economy", "elections", "markets", "scandal",
        "briefing", "bulletin", "coverage", "editorial", "analysis",
        "opinion", "summit", "treaty", "debate", "census"},
       {"read me the {topic} from {place} {time}",
        "what are the {topic} in {place} {time}",
        "brief me on {topic} from {place} {time}",
        "any {topic} updates from {place} {time}",
        "summarize the {topic} out of {place} {time}",
        "follow the {topic} story in {place} {time}"},
       {"dailybrief", "newswire", "headlinely", "pressroom", "scoopfeed",
        "bulletpost", "covergram", "editly", "wirecast", "factline",
        "reportly", "gazettea"}},
      {"timer",
       {"alarm", "countdown", "reminder", "stopwatch", "schedule",
        "appointment", "deadline", "session", "interval", "pause",
        "duration", "snooze", "calendar", "meeting", "notification",
        "clock"},
       {"set a {topic} for {time} before i leave {place}",
        "cancel my {topic} for the {place} trip {time}",
        "how long until my {topic} in {place} {time}",
        "move my {topic} in {place} to {time}",
        "add a {topic} for the {place} meeting {time}",
        "repeat my {topic} every {time} while in {place}"},
       {"tickly", "chronos", "alarmix", "remindly", "timekeep", "countly",
        "stopdash", "schedulo", "clockwise", "snoozely", "intervalo",
        "pausepad"}},
      {"shopping",
       {"order", "cart", "checkout", "delivery", "discount", "coupon",
        "basket", "refund", "wishlist", "voucher", "bargain", "sale",
        "inventory", "shipping", "receipt", "catalog"},
       {"track my {topic} from {place} {time}",
        "find a {topic} deal in {place} {time}",
        "apply the {topic} code in {place} {time}",
        "reorder my {topic} from {place} for {time}",
        "compare {topic} prices in {place} {time}",
        "schedule a {topic} pickup in {place} {time}"},
       {"cartly", "shopmate", "dealfox", "bargainly", "checkoutgo",
        "basketeer", "couponly", "pricepeek", "buymore", "marketo",
        "wishlane", "orderup"}},
      {"sports",
       {"score", "standings", "playoffs", "tournament", "roster", "trade",
        "fixture", "league", "championship", "highlights", "injury",
        "lineup", "stadium", "referee", "medal", "record"},
       {"what is the {topic} for {place} {time}",
        "show me the {topic} from {place} {time}",
        "update me on the {topic} in {place} {time}",
        "did the {place} team make the {topic} {time}",
        "stream the {topic} from {place} {time}",
        "recap the {topic} in {place} {time}"},
       {"scorely", "matchday", "leaguehub", "statszone", "playbook",
        "fieldpass", "goalcast", "courtside", "trackstat", "fanfeed",
        "arenax", "podiumly"}},
      {"travel",
       {"flight", "hotel", "itinerary", "luggage", "passport", "booking",
        "destination", "airport", "departure", "arrival", "visa", "cruise",
        "resort", "tour", "terminal", "layover"},
       {"book a {topic} to {place} {time}",
        "check my {topic} for {place} {time}",
        "find a {topic} near {place} {time}",
        "when is my {topic} to {place} {time}",
        "change my {topic} from {place} to {time}",
        "price a {topic} to {place} for {time}"},
       {"triply", "farefox", "jetsetter", "roamly", "packlight", "gatecheck",
        "voyagea", "transitgo", "nomadly", "skyfare", "portcall",
        "wanderix"}},
      {"food",
       {"recipe", "dinner", "breakfast", "dessert", "ingredients",
        "restaurant", "reservation", "takeout", "cuisine", "appetizer",
        "marinade", "roast", "salad", "smoothie", "casserole", "brunch"},
       {"find a {topic} spot in {place} {time}",
        "order {topic} from {place} {time}",
        "suggest a {topic} idea from {place} for {time}",
        "make a {topic} reservation in {place} {time}",
        "deliver a {topic} to {place} {time}",
        "rate the {topic} i had in {place} {time}"},
       {"cookly", "recipea", "tastebud", "chefmate", "forkful", "simmerly",
        "platefull", "snackbarn", "spicerack", "ovenly", "brunchly",
        "saucepanny"}},
      {"finance",
       {"balance", "portfolio", "dividend", "invoice", "budget", "savings",
        "mortgage", "expenses", "earnings", "taxes", "pension", "loan",
        "interest", "payroll", "audit", "stocks"},
       {"show my {topic} for {place} {time}",
        "check the {topic} on my {place} account {time}",
        "pay the {topic} from {place} {time}",
        "review my {topic} in {place} {time}",
        "transfer the {topic} to {place} {time}",
        "estimate my {topic} for {place} {time}"},
       {"centwise", "ledgerly", "coinpath", "vaultly", "budgeta",
        "stockpeek", "fundflow", "taxmate", "payfolio", "savewise",
        "investa", "billtrack"}},
      {"health",
       {"workout", "symptoms", "medication", "vitals", "hydration", "sleep",
        "calories", "steps", "heartrate", "allergy", "checkup", "pharmacy",
        "dosage", "therapy", "nutrition", "fitness"},
       {"log my {topic} from {place} {time}",
        "check my {topic} in {place} {time}",
        "remind me about my {topic} in {place} {time}",
        "track my {topic} progress in {place} {time}",
        "compare my {topic} from {place} {time}",
        "sync my {topic} readings from {place} {time}"},
       {"fitpulse", "medly", "wellcheck", "steptrack", "vitalsign",
        "caloria", "sleepwise", "pulsepad", "remedyly", "dosewise",
        "healthhub", "gymbuddy"}},
  };
  return specs;
}

const Words& places() {
  static const Words w = {
      "london",  "paris",    "tokyo",    "berlin",   "madrid",  "rome",
      "sydney",  "toronto",  "chicago",  "boston",   "seattle", "denver",
      "dublin",  "oslo",     "vienna",   "zurich",   "lisbon",  "prague",
      "athens",  "cairo",    "mumbai",   "seoul",    "osaka",   "lima",
      "bogota",  "quito",    "nairobi",  "lagos",    "miami",   "dallas",
      "phoenix", "portland", "austin",   "atlanta",  "houston", "detroit",
      "montreal", "vancouver", "brisbane", "auckland"};
  return w;
}

const Words& times() {
  static const Words w = {
      "today",    "tomorrow",  "tonight",   "monday",    "tuesday",
      "wednesday", "thursday", "friday",    "saturday",  "sunday",
      "morning",  "evening",   "noon",      "midnight",  "sunrise",
      "sunset",   "weeknights", "weekends", "january",   "february",
      "march",    "april",     "june",      "july",      "august",
      "september", "october",  "november",  "december",  "spring",
      "summer",   "autumn"};
  return w;
}

// App-agnostic content words. Utterances built from these could belong to any
// domain in the catalog, so the text alone carries no family signal — only
// the session's enabled set and the popularity prior say which app is meant.
const Words& generic_topics() {
  static const Words w = {
      "status",  "summary",     "history", "overview", "activity",
      "feed",    "dashboard",   "archive", "profile",  "preferences",
      "alerts",  "account",     "settings", "backup"};
  return w;
}

UtteranceTemplate parse_template(const std::string& pattern) {
  UtteranceTemplate t;
  t.tokens = split_tokens(pattern);
  return t;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Draws an index according to the cumulative popularity profile.
int sample_cumulative(const std::vector<double>& cumulative, Rng& rng) {
  const double x = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  int idx = static_cast<int>(it - cumulative.begin());
  if (idx >= static_cast<int>(cumulative.size()))
    idx = static_cast<int>(cumulative.size()) - 1;
  return idx;
}

std::vector<std::string> realize(const DomainCatalog& catalog, const Domain& d,
                                 Rng& rng) {
  const auto& tpl =
      d.templates[static_cast<size_t>(rng.below(d.templates.size()))];
  std::vector<std::string> out;
  out.reserve(tpl.tokens.size());
  const auto& topics = catalog.family_topics[static_cast<size_t>(d.family)];
  for (const auto& tok : tpl.tokens) {
    if (tok == "{topic}")
      out.push_back(topics[static_cast<size_t>(rng.below(topics.size()))]);
    else if (tok == "{gtopic}")
      out.push_back(
          generic_topics()[static_cast<size_t>(rng.below(generic_topics().size()))]);
    else if (tok == "{place}")
      out.push_back(places()[static_cast<size_t>(rng.below(places().size()))]);
    else if (tok == "{time}")
      out.push_back(times()[static_cast<size_t>(rng.below(times().size()))]);
    else if (tok == "{brand}")
      out.push_back(d.name);
    else
      out.push_back(tok);
  }
  return out;
}

SplitStats measure(std::span<const Example> split) {
  SplitStats s;
  s.count = static_cast<int>(split.size());
  if (split.empty()) return s;
  long included = 0;
  long total_enabled = 0;
  for (const auto& ex : split) {
    total_enabled += static_cast<long>(ex.enabled.size());
    if (std::binary_search(ex.enabled.begin(), ex.enabled.end(),
                           ex.ground_truth))
      ++included;
  }
  s.inclusion = static_cast<double>(included) / s.count;
  s.mean_enabled = static_cast<double>(total_enabled) / s.count;
  return s;
}

}  // namespace

int DomainCatalog::domain_id(const std::string& name) const {
  for (const auto& d : domains)
    if (d.name == name) return d.id;
  return -1;
}

DomainCatalog build_catalog(int n, std::uint64_t seed) {
  if (n < 2)
    throw std::invalid_argument("build_catalog: need at least 2 domains, got " +
                                std::to_string(n));
  const auto& specs = family_specs();
  const int n_families = static_cast<int>(specs.size());

  DomainCatalog cat;
  cat.family_topics.reserve(specs.size());
  for (const auto& f : specs) cat.family_topics.push_back(f.topics);

  static const std::vector<const char*> unique_shapes = {
      "ask {brand} about the {topic} in {place} {time}",
      "open {brand} and show the {topic} for {place} {time}",
      "use {brand} to check the {topic} in {place} {time}",
  };

  // Every domain also answers fully generic requests. These shapes and the
  // {gtopic} pool are identical across the whole catalog, so such utterances
  // are textually compatible with all 100 domains at once: the classifier can
  // resolve them only by reading the enabled set (weighted by popularity).
  // One quarter of traffic flowing through this channel keeps enablement
  // genuinely informative rather than a tie-break between siblings.
  static const std::vector<const char*> generic_shapes = {
      "pull up the {gtopic} for {place} {time}",
      "what does the {gtopic} for {place} say {time}",
      "refresh the {gtopic} for {place} {time}",
  };

  cat.domains.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int fam = i % n_families;
    const int slot = i / n_families;
    const FamilySpec& spec = specs[static_cast<size_t>(fam)];
    Domain d;
    d.id = i;
    d.family = fam;
    const int nb = static_cast<int>(spec.brands.size());
    d.name = slot < nb ? spec.brands[static_cast<size_t>(slot)]
                       : spec.brands[static_cast<size_t>(slot % nb)] +
                             std::to_string(slot / nb + 1);
    for (const char* p : spec.shared_templates)
      d.templates.push_back(parse_template(p));
    for (const char* p : unique_shapes) d.templates.push_back(parse_template(p));
    for (const char* p : generic_shapes)
      d.templates.push_back(parse_template(p));
    cat.domains.push_back(std::move(d));
  }

  // Zipf popularity over a seeded shuffle of the families (rank decoupled
  // from family index), split evenly among each family's members: popular
  // topic areas dominate traffic, but siblings inside a family stay equally
  // likely, so no popularity prior can separate them — only the enabled set
  // can.
  Rng rng(split_seed(seed, 0xCA7A));
  const int present = std::min(n, n_families);
  std::vector<int> fam_order(static_cast<size_t>(present));
  std::iota(fam_order.begin(), fam_order.end(), 0);
  rng.shuffle(fam_order);
  std::vector<double> fam_weight(static_cast<size_t>(present), 0.0);
  for (int rank = 0; rank < present; ++rank)
    fam_weight[static_cast<size_t>(fam_order[static_cast<size_t>(rank)])] =
        1.0 / (rank + 1.0);
  std::vector<int> fam_size(static_cast<size_t>(present), 0);
  for (const Domain& d : cat.domains)
    ++fam_size[static_cast<size_t>(d.family)];
  for (Domain& d : cat.domains)
    d.popularity = fam_weight[static_cast<size_t>(d.family)] /
                   static_cast<double>(fam_size[static_cast<size_t>(d.family)]);
  return cat;
}

Corpus generate_corpus(const DomainCatalog& catalog, const RegimeSpec& regime) {
  const int n = catalog.n();
  if (n < 2) throw std::invalid_argument("generate_corpus: catalog too small");
  if (regime.inclusion_ratio < 0.0 || regime.inclusion_ratio > 1.0)
    throw std::invalid_argument("generate_corpus: inclusion ratio outside [0,1]");
  if (regime.mean_enabled <= 0.0 || regime.mean_enabled > n)
    throw std::invalid_argument(
        "generate_corpus: mean enabled size " +
        std::to_string(regime.mean_enabled) + " unattainable with " +
        std::to_string(n) + " domains");
  if (regime.mean_enabled < regime.inclusion_ratio)
    throw std::invalid_argument(
        "generate_corpus: mean enabled size below the inclusion ratio");
  if (regime.train_size < 0 || regime.dev_size < 0 || regime.test_size < 0)
    throw std::invalid_argument("generate_corpus: negative split size");
  for (const auto& d : catalog.domains)
    if (d.templates.empty() || d.family < 0)
      throw std::invalid_argument(
          "generate_corpus: catalog lacks templates (thin catalog?)");

  std::vector<double> cumulative;
  cumulative.reserve(static_cast<size_t>(n));
  double acc = 0.0;
  for (const auto& d : catalog.domains) {
    if (d.popularity <= 0.0)
      throw std::invalid_argument("generate_corpus: non-positive popularity");
    acc += d.popularity;
    cumulative.push_back(acc);
  }

  const double distractor_mean = regime.mean_enabled - regime.inclusion_ratio;
  // Enabled-set sizes mix light and heavy enablement traffic: half the
  // examples draw a small distractor budget, half a large one, preserving
  // the requested mean. The wide spread keeps the evidence gain through the
  // attention summary varied from one example to the next instead of
  // hovering near a single typical set size.
  const double light_mean = 0.25 * distractor_mean;
  const double heavy_mean = 2.0 * distractor_mean - light_mean;

  auto sample_example = [&](Rng& rng) {
    Example ex;
    ex.ground_truth = sample_cumulative(cumulative, rng);
    ex.tokens =
        realize(catalog, catalog.domains[static_cast<size_t>(ex.ground_truth)], rng);
    const bool include = rng.bernoulli(regime.inclusion_ratio);
    int k = rng.poisson(rng.bernoulli(0.5) ? heavy_mean : light_mean);
    if (k > n - 1) k = n - 1;
    std::unordered_set<int> chosen;
    if (include) chosen.insert(ex.ground_truth);
    int added = 0;
    while (added < k) {
      const int d = sample_cumulative(cumulative, rng);
      if (d == ex.ground_truth) continue;  // distractors never add the truth
      if (chosen.insert(d).second) ++added;
    }
    ex.enabled.assign(chosen.begin(), chosen.end());
    std::sort(ex.enabled.begin(), ex.enabled.end());
    return ex;
  };

  Corpus corpus;
  std::unordered_set<std::string> seen;

  auto fill_split = [&](std::vector<Example>& split, int count,
                        std::uint64_t stream, bool must_be_new) {
    Rng rng(split_seed(regime.seed, stream));
    split.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
      Example ex;
      bool placed = false;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        ex = sample_example(rng);
        if (!must_be_new || !seen.count(join_tokens(ex.tokens))) {
          placed = true;
          break;
        }
      }
      if (!placed)
        throw std::runtime_error(
            "generate_corpus: could not draw a split-disjoint utterance after "
            "1000 attempts; template space too small for the requested sizes");
      split.push_back(std::move(ex));
    }
  };

  fill_split(corpus.train, regime.train_size, 1, false);
  for (const auto& ex : corpus.train) seen.insert(join_tokens(ex.tokens));
  fill_split(corpus.dev, regime.dev_size, 2, true);
  for (const auto& ex : corpus.dev) seen.insert(join_tokens(ex.tokens));
  fill_split(corpus.test, regime.test_size, 3, true);

  corpus.report.n_domains = n;
  corpus.report.target_inclusion = regime.inclusion_ratio;
  corpus.report.target_mean_enabled = regime.mean_enabled;
  corpus.report.seed = regime.seed;
  corpus.report.train = measure(corpus.train);
  corpus.report.dev = measure(corpus.dev);
  corpus.report.test = measure(corpus.test);
  return corpus;
}

std::string GenerationReport::to_string() const {
  char buf[512];
  auto line = [&](const char* name, const SplitStats& s) {
    std::snprintf(buf, sizeof buf, "%-5s count=%d inclusion=%.4f mean_enabled=%.4f\n",
                  name, s.count, s.inclusion, s.mean_enabled);
    return std::string(buf);
  };
  std::snprintf(buf, sizeof buf,
                "domains=%d seed=%llu target_inclusion=%.4f target_mean_enabled=%.4f\n",
                n_domains, static_cast<unsigned long long>(seed),
                target_inclusion, target_mean_enabled);
  std::string out(buf);
  out += line("train", train);
  out += line("dev", dev);
  out += line("test", test);
  return out;
}

void write_dataset(const std::string& path, std::span<const Example> examples,
                   const DomainCatalog& catalog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  for (const auto& ex : examples) {
    nlohmann::json j;
    j["text"] = join_tokens(ex.tokens);
    j["label"] = catalog.domains[static_cast<size_t>(ex.ground_truth)].name;
    nlohmann::json enabled = nlohmann::json::array();
    for (int e : ex.enabled)
      enabled.push_back(catalog.domains[static_cast<size_t>(e)].name);
    j["enabled"] = std::move(enabled);
    out << j.dump() << '\n';
  }
}

std::vector<Example> read_dataset(const std::string& path,
                                  const DomainCatalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_dataset: cannot open " + path);
  std::unordered_map<std::string, int> ids;
  for (const auto& d : catalog.domains) ids.emplace(d.name, d.id);

  std::vector<Example> out;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " +
                             msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed record: ") + e.what());
    }
    if (!j.contains("text") || !j["text"].is_string())
      fail("missing or non-string field 'text'");
    if (!j.contains("label") || !j["label"].is_string())
      fail("missing or non-string field 'label'");
    if (!j.contains("enabled") || !j["enabled"].is_array())
      fail("missing or non-array field 'enabled'");

    Example ex;
    ex.tokens = split_tokens(j["text"].get<std::string>());
    if (ex.tokens.empty()) fail("empty 'text'");
    const std::string label = j["label"].get<std::string>();
    auto it = ids.find(label);
    if (it == ids.end()) fail("unknown domain name '" + label + "'");
    ex.ground_truth = it->second;
    for (const auto& e : j["enabled"]) {
      if (!e.is_string()) fail("non-string entry in 'enabled'");
      auto eit = ids.find(e.get<std::string>());
      if (eit == ids.end())
        fail("unknown domain name '" + e.get<std::string>() + "' in 'enabled'");
      ex.enabled.push_back(eit->second);
    }
    std::sort(ex.enabled.begin(), ex.enabled.end());
    ex.enabled.erase(std::unique(ex.enabled.begin(), ex.enabled.end()),
                     ex.enabled.end());
    out.push_back(std::move(ex));
  }
  return out;
}

void save_catalog(const std::string& path, const DomainCatalog& catalog) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_catalog: cannot open " + path);
  out << "catalog v1 " << catalog.n() << '\n';
  char buf[64];
  for (const auto& d : catalog.domains) {
    std::snprintf(buf, sizeof buf, "%.17g", d.popularity);
    out << d.id << '\t' << d.name << '\t' << buf << '\n';
  }
}

DomainCatalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_catalog: cannot open " + path);
  std::string tag, version;
  int n = 0;
  in >> tag >> version >> n;
  if (tag != "catalog" || version != "v1" || n < 2)
    throw std::runtime_error("load_catalog: bad header in " + path);
  DomainCatalog cat;
  cat.domains.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Domain d;
    if (!(in >> d.id >> d.name >> d.popularity))
      throw std::runtime_error("load_catalog: truncated at domain " +
                               std::to_string(i));
    if (d.id != i)
      throw std::runtime_error("load_catalog: non-contiguous id " +
                               std::to_string(d.id));
    cat.domains.push_back(std::move(d));
  }
  return cat;
}

void write_corpus_dir(const std::string& dir, const Corpus& corpus,
                      const DomainCatalog& catalog) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_dataset((base / "train.jsonl").string(), corpus.train, catalog);
  write_dataset((base / "dev.jsonl").string(), corpus.dev, catalog);
  write_dataset((base / "test.jsonl").string(), corpus.test, catalog);
  save_catalog((base / "catalog.txt").string(), catalog);
  std::ofstream report((base / "report.txt").string(), std::ios::binary);
  report << corpus.report.to_string();
}

Vocabulary corpus_vocabulary(std::span<const Example> train) {
  std::vector<std::string> tokens;
  for (const auto& ex : train)
    tokens.insert(tokens.end(), ex.tokens.begin(), ex.tokens.end());
  return Vocabulary::build(tokens);
}

}  // namespace enatt
