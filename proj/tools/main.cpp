#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "tripletnet/dataset.hpp"
#include "tripletnet/errors.hpp"
#include "tripletnet/evaluator.hpp"
#include "tripletnet/io.hpp"
#include "tripletnet/manifest.hpp"
#include "tripletnet/sampler.hpp"
#include "tripletnet/synthgen.hpp"
#include "tripletnet/trainer.hpp"
#include "tripletnet/transform.hpp"

using json = nlohmann::json;
namespace tn = tripletnet;

namespace {

struct IngestOpts {
  std::string features, metadata, format = "tsv", out;
  int min_songs = 2;
  double train_frac = 0.7;
  std::uint64_t seed = 0;
};

struct TrainOpts {
  std::string corpus, strategy = "random", out, log, dump_triplets;
  int epochs = 200, epoch_size = 512, batch = 32;
  double lr = 0.01, momentum = 0.9, alpha = 1.0;
  std::uint64_t seed = 0;
};

struct EvalOpts {
  std::string corpus, models, out, per_artist_dir;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct EmbedOpts {
  std::string corpus, model, out;
};

struct KnnOpts {
  std::string embeddings;
  std::int64_t query = 0;
  int k = 10;
};

struct SynthOpts {
  std::string features_out, metadata_out;
  int genres = 2, artists = 4, tracks = 4, dim = 8;
  double genre_spread = 3.0, artist_spread = 1.0, track_noise = 0.5;
  std::uint64_t seed = 0;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void run_ingest(const IngestOpts& o) {
  tn::FeatureFormat ff = o.format == "fma" ? tn::FeatureFormat::FmaFeatures
                                           : tn::FeatureFormat::PlainTsv;
  tn::MetadataFormat mf = o.format == "fma" ? tn::MetadataFormat::FmaTracks
                                            : tn::MetadataFormat::PlainTsv;
  if (o.format != "fma" && o.format != "tsv") {
    throw tn::DataError("unknown format: " + o.format);
  }

  tn::FeatureTable features = tn::load_feature_table(o.features, ff);
  tn::MetadataTable metadata = tn::load_metadata(o.metadata, mf);
  tn::JoinReport report;
  tn::Corpus corpus = tn::build_corpus(features, metadata, o.min_songs, &report);
  corpus = tn::split_by_artist(std::move(corpus), o.train_frac, o.seed);
  tn::save_corpus(corpus, o.out);

  std::size_t n_train_artists = 0, n_eval_artists = 0;
  for (const auto& [artist, split] : corpus.split) {
    (split == tn::Split::Train ? n_train_artists : n_eval_artists) += 1;
  }

  json manifest{
      {"subcommand", "ingest"},
      {"inputs", {{o.features, tn::file_digest_hex(o.features)},
                  {o.metadata, tn::file_digest_hex(o.metadata)}}},
      {"format", o.format},
      {"min_songs", o.min_songs},
      {"train_fraction", o.train_frac},
      {"seed", o.seed},
      {"artifact", o.out},
      {"tracks", corpus.records.size()},
      {"artists", corpus.split.size()},
      {"train_artists", n_train_artists},
      {"eval_artists", n_eval_artists},
      {"dropped_features_only", report.features_only},
      {"dropped_metadata_only", report.metadata_only},
      {"filtered_tracks", report.filtered_tracks},
  };
  tn::write_json_atomic(manifest, o.out + ".manifest.json");

  std::cout << "corpus: " << corpus.records.size() << " tracks, "
            << corpus.split.size() << " artists (" << n_train_artists << " train / "
            << n_eval_artists << " eval), dim " << corpus.dim << '\n'
            << "join drops: " << report.features_only << " features-only, "
            << report.metadata_only << " metadata-only, " << report.filtered_tracks
            << " filtered tracks\n";
}

void run_train(const TrainOpts& o) {
  tn::Corpus corpus = tn::load_corpus(o.corpus);

  tn::TrainConfig config;
  config.epochs = o.epochs;
  config.triplets_per_epoch = o.epoch_size;
  config.batch_size = o.batch;
  config.learning_rate = o.lr;
  config.momentum = o.momentum;
  config.margin = o.alpha;
  config.seed = o.seed;
  config.strategy = tn::parse_strategy(o.strategy);

  tn::TrainResult result = tn::train(corpus, config);
  tn::save_model({result.params, config.margin, result.zscore, config}, o.out);
  if (!o.log.empty()) tn::write_train_log(result.log, o.log);

  if (!o.dump_triplets.empty()) {
    // Resample the exact training stream; sample_epoch is pure per epoch.
    tn::TripletSampler sampler(corpus, {config.strategy, config.seed});
    std::vector<tn::Triplet> all;
    for (int e = 0; e < config.epochs; ++e) {
      auto epoch = sampler.sample_epoch(
          static_cast<std::size_t>(config.triplets_per_epoch),
          static_cast<std::uint64_t>(e));
      all.insert(all.end(), epoch.begin(), epoch.end());
    }
    tn::dump_triplets(corpus, all, o.dump_triplets);
  }

  std::uint64_t fallbacks = 0;
  for (const auto& e : result.log.epochs) fallbacks += e.fallbacks;

  json manifest{
      {"subcommand", "train"},
      {"inputs", {{o.corpus, tn::file_digest_hex(o.corpus)}}},
      {"strategy", o.strategy},
      {"epochs", o.epochs},
      {"epoch_size", o.epoch_size},
      {"batch", o.batch},
      {"lr", o.lr},
      {"momentum", o.momentum},
      {"alpha", o.alpha},
      {"seed", o.seed},
      {"artifact", o.out},
      {"fallbacks", fallbacks},
  };
  tn::write_json_atomic(manifest, o.out + ".manifest.json");

  if (!result.log.epochs.empty()) {
    std::cout << "trained " << result.log.epochs.size() << " epochs, first loss "
              << result.log.epochs.front().mean_loss << ", final loss "
              << result.log.epochs.back().mean_loss << ", fallbacks " << fallbacks
              << '\n';
  } else {
    std::cout << "wrote initialized model (0 epochs)\n";
  }
}

std::vector<tn::Embedder> build_embedders(const tn::Corpus& corpus,
                                          const std::string& spec_list) {
  std::vector<tn::Embedder> embedders;
  std::stringstream ss(spec_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "raw") {
      embedders.push_back(tn::make_raw_embedder());
    } else if (item == "zscore") {
      embedders.push_back(tn::make_zscore_embedder(tn::fit_zscore_train(corpus)));
    } else if (std::filesystem::exists(item)) {
      std::string name = std::filesystem::path(item).stem().string();
      embedders.push_back(tn::make_triplet_embedder(name, tn::load_model(item)));
    } else {
      throw tn::DataError("unknown model \"" + item +
                          "\" (expected raw, zscore, or a model file path)");
    }
  }
  if (embedders.empty()) throw tn::DataError("no models given");
  return embedders;
}

void run_eval(const EvalOpts& o) {
  tn::Corpus corpus = tn::load_corpus(o.corpus);
  std::vector<tn::Embedder> embedders = build_embedders(corpus, o.models);
  int threads = resolve_threads(o.threads);

  std::vector<std::pair<std::string, double>> rows;
  for (const tn::Embedder& e : embedders) {
    tn::AucReport report = tn::evaluate(corpus, e, o.seed, threads);
    rows.emplace_back(e.name, report.mean_auc);
    if (!o.per_artist_dir.empty()) {
      std::filesystem::create_directories(o.per_artist_dir);
      tn::write_auc_report(report, o.per_artist_dir + "/" + e.name + ".tsv");
    }
  }

  std::string table = tn::format_comparison(rows);
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw tn::DataError("cannot write report: " + o.out);
  out << table;
  out.close();
  std::cout << table;

  json manifest{
      {"subcommand", "eval"},
      {"inputs", {{o.corpus, tn::file_digest_hex(o.corpus)}}},
      {"models", o.models},
      {"seed", o.seed},
      {"artifact", o.out},
  };
  tn::write_json_atomic(manifest, o.out + ".manifest.json");
}

void run_embed(const EmbedOpts& o) {
  tn::Corpus corpus = tn::load_corpus(o.corpus);
  std::vector<tn::Embedder> embedders = build_embedders(corpus, o.model);
  if (embedders.size() != 1) throw tn::DataError("embed takes exactly one model");
  const tn::Embedder& embedder = embedders.front();

  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw tn::DataError("cannot write embeddings: " + o.out);
  Eigen::Index dim = embedder.embed(corpus.records.front().features).size();
  out << "track_id";
  for (Eigen::Index i = 0; i < dim; ++i) out << "\te" << i;
  out << '\n';
  for (const tn::TrackRecord& r : corpus.records) {
    Eigen::VectorXd e = embedder.embed(r.features);
    out << r.track_id;
    for (Eigen::Index i = 0; i < e.size(); ++i) out << '\t' << tn::format_double(e[i]);
    out << '\n';
  }
  out.close();

  json manifest{
      {"subcommand", "embed"},
      {"inputs", {{o.corpus, tn::file_digest_hex(o.corpus)}}},
      {"model", o.model},
      {"artifact", o.out},
  };
  tn::write_json_atomic(manifest, o.out + ".manifest.json");
}

void run_knn(const KnnOpts& o) {
  std::ifstream in(o.embeddings, std::ios::binary);
  if (!in) throw tn::ParseError("cannot open embeddings: " + o.embeddings);
  std::string line;
  if (!std::getline(in, line) || line.rfind("track_id", 0) != 0) {
    throw tn::ParseError(o.embeddings + ": missing embeddings header");
  }

  std::vector<std::pair<std::int64_t, Eigen::VectorXd>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, '\t');
    std::int64_t id = 0;
    auto [p1, ec1] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (ec1 != std::errc{}) throw tn::DataError("bad track id: " + tok);
    std::vector<double> vals;
    while (std::getline(ss, tok, '\t')) {
      vals.push_back(tn::parse_double(tok, "embedding of track " + std::to_string(id)));
    }
    rows.emplace_back(id, Eigen::VectorXd::Map(vals.data(),
                                               static_cast<Eigen::Index>(vals.size())));
  }

  auto query_it = std::find_if(rows.begin(), rows.end(),
                               [&](const auto& r) { return r.first == o.query; });
  if (query_it == rows.end()) {
    throw tn::DataError("query track " + std::to_string(o.query) +
                        " not found in embeddings");
  }

  std::vector<std::pair<double, std::int64_t>> hits;
  for (const auto& [id, v] : rows) {
    if (id == o.query) continue;
    hits.emplace_back((v - query_it->second).norm(), id);
  }
  // Ascending by distance, ties broken by track_id.
  std::sort(hits.begin(), hits.end());
  std::size_t k = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(o.k));
  for (std::size_t i = 0; i < k; ++i) {
    std::cout << hits[i].second << '\t' << tn::format_double(hits[i].first) << '\n';
  }
}

void run_synthgen(const SynthOpts& o) {
  tn::SynthSpec spec;
  spec.n_genres = o.genres;
  spec.artists_per_genre = o.artists;
  spec.tracks_per_artist = o.tracks;
  spec.dim = o.dim;
  spec.genre_spread = o.genre_spread;
  spec.artist_spread = o.artist_spread;
  spec.track_noise = o.track_noise;
  spec.seed = o.seed;
  tn::generate(spec, o.features_out, o.metadata_out);

  json manifest{
      {"subcommand", "synthgen"},
      {"genres", o.genres},
      {"artists_per_genre", o.artists},
      {"tracks_per_artist", o.tracks},
      {"dim", o.dim},
      {"genre_spread", o.genre_spread},
      {"artist_spread", o.artist_spread},
      {"track_noise", o.track_noise},
      {"seed", o.seed},
      {"artifacts", {o.features_out, o.metadata_out}},
  };
  tn::write_json_atomic(manifest, o.features_out + ".manifest.json");
  std::cout << "wrote " << o.features_out << " and " << o.metadata_out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-based music similarity: triplet-network embeddings "
               "over audio feature tables"};
  app.require_subcommand(1);

  IngestOpts ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Build a corpus artifact from feature and metadata files");
  cmd_ingest->add_option("--features", ingest.features, "Feature table path")->required();
  cmd_ingest->add_option("--metadata", ingest.metadata, "Metadata table path")->required();
  cmd_ingest->add_option("--format", ingest.format, "Input format: fma or tsv");
  cmd_ingest->add_option("--min-songs", ingest.min_songs, "Minimum tracks per artist");
  cmd_ingest->add_option("--train-frac", ingest.train_frac, "Fraction of artists in the train split");
  cmd_ingest->add_option("--seed", ingest.seed, "Split shuffle seed");
  cmd_ingest->add_option("--out", ingest.out, "Corpus artifact path")->required();
  cmd_ingest->callback([&] { run_ingest(ingest); });

  TrainOpts train;
  auto* cmd_train = app.add_subcommand("train", "Train a triplet network on a corpus");
  cmd_train->add_option("--corpus", train.corpus, "Corpus artifact")->required();
  cmd_train->add_option("--strategy", train.strategy, "Negative sampling: random or genre");
  cmd_train->add_option("--epochs", train.epochs, "Training epochs");
  cmd_train->add_option("--epoch-size", train.epoch_size, "Triplets per epoch");
  cmd_train->add_option("--batch", train.batch, "Mini-batch size");
  cmd_train->add_option("--lr", train.lr, "Learning rate");
  cmd_train->add_option("--momentum", train.momentum, "SGD momentum");
  cmd_train->add_option("--alpha", train.alpha, "Triplet-loss margin");
  cmd_train->add_option("--seed", train.seed, "Training seed");
  cmd_train->add_option("--out", train.out, "Model output path")->required();
  cmd_train->add_option("--log", train.log, "Per-epoch TSV log path");
  cmd_train->add_option("--dump-triplets", train.dump_triplets, "Audit dump of sampled triplets (TSV)");
  cmd_train->callback([&] { run_train(train); });

  EvalOpts evalo;
  auto* cmd_eval = app.add_subcommand("eval", "Artist-retrieval AUC comparison of embedders");
  cmd_eval->add_option("--corpus", evalo.corpus, "Corpus artifact")->required();
  cmd_eval->add_option("--models", evalo.models, "Comma list: raw, zscore, or model paths")->required();
  cmd_eval->add_option("--seed", evalo.seed, "Query selection seed");
  cmd_eval->add_option("--threads", evalo.threads, "Worker threads (default: all cores)");
  cmd_eval->add_option("--per-artist", evalo.per_artist_dir, "Directory for per-artist AUC TSVs");
  cmd_eval->add_option("--out", evalo.out, "Comparison table output path")->required();
  cmd_eval->callback([&] { run_eval(evalo); });

  EmbedOpts embed;
  auto* cmd_embed = app.add_subcommand("embed", "Export per-track embeddings as TSV");
  cmd_embed->add_option("--corpus", embed.corpus, "Corpus artifact")->required();
  cmd_embed->add_option("--model", embed.model, "raw, zscore, or a model path")->required();
  cmd_embed->add_option("--out", embed.out, "Embeddings TSV path")->required();
  cmd_embed->callback([&] { run_embed(embed); });

  KnnOpts knn;
  auto* cmd_knn = app.add_subcommand("knn", "Brute-force nearest neighbours in an embeddings file");
  cmd_knn->add_option("--embeddings", knn.embeddings, "Embeddings TSV")->required();
  cmd_knn->add_option("--query", knn.query, "Query track id")->required();
  cmd_knn->add_option("--k", knn.k, "Number of neighbours");
  cmd_knn->callback([&] { run_knn(knn); });

  SynthOpts synth;
  auto* cmd_synth = app.add_subcommand("synthgen", "Generate a synthetic hierarchical corpus");
  cmd_synth->add_option("--genres", synth.genres, "Number of genres");
  cmd_synth->add_option("--artists", synth.artists, "Artists per genre");
  cmd_synth->add_option("--tracks", synth.tracks, "Tracks per artist");
  cmd_synth->add_option("--dim", synth.dim, "Feature dimensionality");
  cmd_synth->add_option("--genre-spread", synth.genre_spread, "Genre center stddev");
  cmd_synth->add_option("--artist-spread", synth.artist_spread, "Artist center stddev");
  cmd_synth->add_option("--track-noise", synth.track_noise, "Track noise stddev");
  cmd_synth->add_option("--seed", synth.seed, "Generator seed");
  cmd_synth->add_option("--features-out", synth.features_out, "Feature TSV path")->required();
  cmd_synth->add_option("--metadata-out", synth.metadata_out, "Metadata TSV path")->required();
  cmd_synth->callback([&] { run_synthgen(synth); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const tn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
