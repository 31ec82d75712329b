#include "enatt/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace enatt {

namespace {

std::string dims_line(const ModelConfig& cfg, int variant) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "dims vocab %d domains %d emb %d hidden %d ff %d dropout %.17g "
                "dtype %s variant %d",
                cfg.vocab_size, cfg.n_domains, cfg.d_emb, cfg.d_hidden,
                cfg.d_ff, cfg.dropout_rate,
                cfg.dtype == Dtype::F32 ? "f32" : "f64", variant);
  return std::string(buf);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_doubles(std::ostream& out, std::span<const double> vals) {
  std::vector<char> buf;
  buf.reserve(vals.size() * 8);
  for (double d : vals) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int k = 0; k < 8; ++k)
      buf.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_doubles(std::istream& in, Array& a, const std::string& name) {
  std::vector<char> buf(static_cast<size_t>(a.size()) * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw std::runtime_error("load_checkpoint: truncated data for array " + name);
  auto vals = a.values();
  for (int i = 0; i < a.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(buf[static_cast<size_t>(i) * 8 + k]))
              << (8 * k);
    vals[static_cast<size_t>(i)] = std::bit_cast<double>(bits);
  }
}

}  // namespace

std::uint64_t config_fingerprint(const ModelConfig& cfg, int variant) {
  return fnv1a(dims_line(cfg, variant));
}

void save_checkpoint(const std::string& path, Checkpoint& ck) {
  if (static_cast<int>(ck.domain_names.size()) != ck.meta.config.n_domains)
    throw std::invalid_argument(
        "save_checkpoint: domain name count does not match the config");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);

  ck.meta.config_hash = config_fingerprint(ck.meta.config, ck.meta.variant);
  auto params = ck.params.all_params();

  char buf[256];
  out << "enatt-checkpoint v" << ck.meta.format_version << '\n';
  out << dims_line(ck.meta.config, ck.meta.variant) << '\n';
  std::snprintf(buf, sizeof buf, "epoch %d dev %.17g %.17g %.17g %d",
                ck.meta.epoch, ck.meta.dev.top1, ck.meta.dev.mrr,
                ck.meta.dev.top3, ck.meta.dev.count);
  out << buf << '\n';
  std::snprintf(buf, sizeof buf, "config_hash %016llx",
                static_cast<unsigned long long>(ck.meta.config_hash));
  out << buf << '\n';

  out << "arrays " << params.size() << '\n';
  for (const Param* p : params)
    out << p->name << ' ' << p->value.ndim() << ' ' << p->value.rows() << ' '
        << p->value.cols() << '\n';
  out << "vocab " << ck.vocab.size() << '\n';
  ck.vocab.save(out);
  out << "domains " << ck.domain_names.size() << '\n';
  for (const auto& n : ck.domain_names) out << n << '\n';
  out << "data\n";
  for (const Param* p : params) write_doubles(out, p->value.values());
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("load_checkpoint: " + msg + " in " + path);
  };

  std::string line;
  if (!std::getline(in, line) || line != "enatt-checkpoint v1")
    fail("unrecognized header");

  Checkpoint ck;
  ck.meta.format_version = 1;
  std::string word, dtype_word;
  {
    if (!std::getline(in, line)) fail("missing dims line");
    std::istringstream ss(line);
    std::string k1, k2, k3, k4, k5, k6, k7, k8;
    ss >> word >> k1 >> ck.meta.config.vocab_size >> k2 >>
        ck.meta.config.n_domains >> k3 >> ck.meta.config.d_emb >> k4 >>
        ck.meta.config.d_hidden >> k5 >> ck.meta.config.d_ff >> k6 >>
        ck.meta.config.dropout_rate >> k7 >> dtype_word >> k8 >>
        ck.meta.variant;
    if (!ss || word != "dims") fail("bad dims line");
    if (dtype_word != "f64" && dtype_word != "f32") fail("bad dtype");
    ck.meta.config.dtype = dtype_word == "f32" ? Dtype::F32 : Dtype::F64;
    ck.meta.config.flags = variant_flags(ck.meta.variant);
  }
  {
    if (!std::getline(in, line)) fail("missing epoch line");
    std::istringstream ss(line);
    std::string k;
    ss >> word >> ck.meta.epoch >> k >> ck.meta.dev.top1 >> ck.meta.dev.mrr >>
        ck.meta.dev.top3 >> ck.meta.dev.count;
    if (!ss || word != "epoch") fail("bad epoch line");
  }
  {
    if (!std::getline(in, line)) fail("missing config_hash line");
    std::istringstream ss(line);
    ss >> word >> std::hex >> ck.meta.config_hash;
    if (!ss || word != "config_hash") fail("bad config_hash line");
    if (ck.meta.config_hash != config_fingerprint(ck.meta.config, ck.meta.variant))
      fail("config hash mismatch");
  }

  size_t n_arrays = 0;
  {
    if (!std::getline(in, line)) fail("missing arrays line");
    std::istringstream ss(line);
    ss >> word >> n_arrays;
    if (!ss || word != "arrays") fail("bad arrays line");
  }
  struct ShapeRow {
    std::string name;
    int ndim, rows, cols;
  };
  std::vector<ShapeRow> shapes;
  for (size_t i = 0; i < n_arrays; ++i) {
    if (!std::getline(in, line)) fail("truncated shape table");
    std::istringstream ss(line);
    ShapeRow r;
    ss >> r.name >> r.ndim >> r.rows >> r.cols;
    if (!ss) fail("bad shape row '" + line + "'");
    shapes.push_back(std::move(r));
  }

  int vocab_count = 0;
  {
    if (!std::getline(in, line)) fail("missing vocab line");
    std::istringstream ss(line);
    ss >> word >> vocab_count;
    if (!ss || word != "vocab") fail("bad vocab line");
  }
  {
    std::string vocab_block;
    for (int i = 0; i < vocab_count; ++i) {
      if (!std::getline(in, line)) fail("truncated vocabulary");
      vocab_block += line;
      vocab_block += '\n';
    }
    std::istringstream vs(vocab_block);
    ck.vocab = Vocabulary::load(vs);
    if (ck.vocab.size() != ck.meta.config.vocab_size)
      fail("vocabulary size disagrees with dims");
  }

  int domain_count = 0;
  {
    if (!std::getline(in, line)) fail("missing domains line");
    std::istringstream ss(line);
    ss >> word >> domain_count;
    if (!ss || word != "domains" || domain_count != ck.meta.config.n_domains)
      fail("bad domains line");
  }
  for (int i = 0; i < domain_count; ++i) {
    if (!std::getline(in, line)) fail("truncated domain names");
    ck.domain_names.push_back(line);
  }
  if (!std::getline(in, line) || line != "data") fail("missing data marker");

  Rng rng(0);  // placeholder values, overwritten from the file below
  ck.params.init(ck.meta.config, rng);
  auto params = ck.params.all_params();
  if (params.size() != shapes.size()) fail("shape table size mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& s = shapes[i];
    Param* p = params[i];
    if (p->name != s.name || p->value.ndim() != s.ndim ||
        p->value.rows() != s.rows || p->value.cols() != s.cols)
      fail("shape row " + std::to_string(i) + " (" + s.name +
           ") disagrees with the configured dimensions");
    read_doubles(in, p->value, s.name);
  }
  return ck;
}

}  // namespace enatt
