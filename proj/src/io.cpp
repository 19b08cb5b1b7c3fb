#include "tripletnet/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tripletnet/errors.hpp"

namespace tripletnet {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("format_double failed");
  return {buf, ptr};
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("expected number, got \"" + s + "\" (" + context + ")");
  }
  return v;
}

namespace {

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << format_double(v[i]);
  }
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, Eigen::Index dim,
                            const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("model file truncated at " + what);
  std::istringstream row(line);
  Eigen::VectorXd v(dim);
  std::string tok;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(row >> tok)) throw FormatError("short row in " + what);
    v[i] = parse_double(tok, what);
  }
  if (row >> tok) throw FormatError("extra values in " + what);
  return v;
}

Eigen::MatrixXd read_matrix(std::istream& in, Eigen::Index dim,
                            const std::string& what) {
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    m.row(i) = read_vector(in, dim, what + " row " + std::to_string(i)).transpose();
  }
  return m;
}

// "key=value" tokens on the header and config lines.
std::string expect_kv(std::istringstream& in, const std::string& key,
                      const std::string& where) {
  std::string tok;
  if (!(in >> tok) || tok.rfind(key + "=", 0) != 0) {
    throw FormatError("expected " + key + "=... in " + where);
  }
  return tok.substr(key.size() + 1);
}

void write_binary(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ostream& out, T v) {
  write_binary(out, &v, sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("corpus file truncated at " + what);
  return v;
}

}  // namespace

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file: " + path);

  const NetworkParams& p = model.params;
  out << "TRIPLETNET v1 dim=" << p.dim() << " alpha=" << format_double(model.alpha)
      << " zscore=" << (model.zscore ? 1 : 0) << '\n';
  if (model.config) {
    const TrainConfig& c = *model.config;
    out << "config epochs=" << c.epochs << " epoch_size=" << c.triplets_per_epoch
        << " batch=" << c.batch_size << " lr=" << format_double(c.learning_rate)
        << " momentum=" << format_double(c.momentum)
        << " seed=" << c.seed << " strategy=" << strategy_name(c.strategy) << '\n';
  }
  if (model.zscore) {
    write_vector(out, model.zscore->mean);
    write_vector(out, model.zscore->stddev);
  }
  for (Eigen::Index i = 0; i < p.dim(); ++i) write_vector(out, p.W1.row(i).transpose());
  write_vector(out, p.b1);
  for (Eigen::Index i = 0; i < p.dim(); ++i) write_vector(out, p.W2.row(i).transpose());
  write_vector(out, p.b2);
  if (!out) throw FormatError("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file: " + path);
  std::istringstream header(line);
  std::string magic, version;
  header >> magic >> version;
  if (magic != "TRIPLETNET") throw FormatError(path + ": not a TRIPLETNET model file");
  if (version != "v1") {
    throw FormatError(path + ": unsupported model version \"" + version + "\"");
  }
  Eigen::Index dim =
      static_cast<Eigen::Index>(parse_double(expect_kv(header, "dim", "header"), "dim"));
  if (dim < 1) throw FormatError(path + ": bad dimension");
  double alpha = parse_double(expect_kv(header, "alpha", "header"), "alpha");
  int has_zscore =
      static_cast<int>(parse_double(expect_kv(header, "zscore", "header"), "zscore"));

  ModelFile model;
  model.alpha = alpha;

  // Optional config line; anything else is the first data row.
  std::streampos before = in.tellg();
  if (std::getline(in, line) && line.rfind("config ", 0) == 0) {
    std::istringstream cfg(line);
    std::string word;
    cfg >> word;
    TrainConfig c;
    c.epochs = static_cast<int>(parse_double(expect_kv(cfg, "epochs", "config"), "epochs"));
    c.triplets_per_epoch =
        static_cast<int>(parse_double(expect_kv(cfg, "epoch_size", "config"), "epoch_size"));
    c.batch_size = static_cast<int>(parse_double(expect_kv(cfg, "batch", "config"), "batch"));
    c.learning_rate = parse_double(expect_kv(cfg, "lr", "config"), "lr");
    c.momentum = parse_double(expect_kv(cfg, "momentum", "config"), "momentum");
    c.seed = static_cast<std::uint64_t>(
        std::stoull(expect_kv(cfg, "seed", "config")));
    c.margin = alpha;
    c.strategy = parse_strategy(expect_kv(cfg, "strategy", "config"));
    model.config = c;
  } else {
    in.clear();
    in.seekg(before);
  }

  if (has_zscore) {
    ZScoreStats stats;
    stats.mean = read_vector(in, dim, "zscore mean");
    stats.stddev = read_vector(in, dim, "zscore std");
    model.zscore = std::move(stats);
  }
  model.params.W1 = read_matrix(in, dim, "W1");
  model.params.b1 = read_vector(in, dim, "b1");
  model.params.W2 = read_matrix(in, dim, "W2");
  model.params.b2 = read_vector(in, dim, "b2");
  return model;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write corpus file: " + path);
  out << "CORPUS v1\n";

  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(corpus.dim));
  write_pod<std::uint64_t>(out, corpus.records.size());
  for (const TrackRecord& r : corpus.records) {
    write_pod<std::int64_t>(out, r.track_id);
    write_pod<std::int64_t>(out, r.artist_id);
    write_pod<std::uint8_t>(out, r.genre ? 1 : 0);
    if (r.genre) {
      write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(r.genre->size()));
      write_binary(out, r.genre->data(), r.genre->size());
    }
    write_binary(out, r.features.data(), sizeof(double) * static_cast<std::size_t>(corpus.dim));
  }
  write_pod<std::uint64_t>(out, corpus.split.size());
  for (const auto& [artist, split] : corpus.split) {
    write_pod<std::int64_t>(out, artist);
    write_pod<std::uint8_t>(out, split == Split::Train ? 0 : 1);
  }
  if (!out) throw FormatError("write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open corpus file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "CORPUS v1") {
    throw FormatError(path + ": not a CORPUS v1 file");
  }

  Corpus corpus;
  corpus.dim = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in, "dim"));
  std::uint64_t n_records = read_pod<std::uint64_t>(in, "record count");
  corpus.records.reserve(n_records);
  for (std::uint64_t i = 0; i < n_records; ++i) {
    TrackRecord r;
    r.track_id = read_pod<std::int64_t>(in, "track_id");
    r.artist_id = read_pod<std::int64_t>(in, "artist_id");
    if (read_pod<std::uint8_t>(in, "genre flag")) {
      std::uint32_t len = read_pod<std::uint32_t>(in, "genre length");
      std::string genre(len, '\0');
      in.read(genre.data(), len);
      if (!in) throw FormatError(path + ": truncated genre");
      r.genre = std::move(genre);
    }
    r.features.resize(corpus.dim);
    in.read(reinterpret_cast<char*>(r.features.data()),
            static_cast<std::streamsize>(sizeof(double) * corpus.dim));
    if (!in) throw FormatError(path + ": truncated features");
    corpus.records.push_back(std::move(r));
  }
  std::uint64_t n_artists = read_pod<std::uint64_t>(in, "artist count");
  for (std::uint64_t i = 0; i < n_artists; ++i) {
    std::int64_t artist = read_pod<std::int64_t>(in, "split artist");
    std::uint8_t tag = read_pod<std::uint8_t>(in, "split tag");
    corpus.split[artist] = tag == 0 ? Split::Train : Split::Eval;
  }
  corpus.check_invariants();
  return corpus;
}

}  // namespace tripletnet
