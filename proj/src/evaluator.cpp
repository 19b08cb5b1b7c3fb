#include "tripletnet/evaluator.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "tripletnet/errors.hpp"
#include "tripletnet/network.hpp"
#include "tripletnet/rng.hpp"

namespace tripletnet {

Embedder make_raw_embedder() {
  return {"raw", [](const Eigen::VectorXd& v) { return v; }};
}

Embedder make_zscore_embedder(ZScoreStats stats) {
  return {"zscore", [stats = std::move(stats)](const Eigen::VectorXd& v) {
            return apply_zscore(stats, v);
          }};
}

Embedder make_triplet_embedder(std::string name, ModelFile model) {
  return {std::move(name),
          [model = std::move(model)](const Eigen::VectorXd& v) {
            Eigen::VectorXd x = model.zscore ? apply_zscore(*model.zscore, v) : v;
            return forward(model.params, x);
          }};
}

double auc(const std::vector<double>& scores, const std::vector<bool>& relevant) {
  if (scores.size() != relevant.size()) {
    throw EvalError("auc: scores and labels differ in length");
  }
  std::size_t n = scores.size();
  std::size_t pos = static_cast<std::size_t>(
      std::count(relevant.begin(), relevant.end(), true));
  std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    throw EvalError("auc: need at least one relevant and one irrelevant item");
  }

  // Mann-Whitney U via tie-averaged ranks: O(n log n).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (relevant[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j;
  }

  double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

AucReport evaluate(const Corpus& corpus, const Embedder& embedder,
                   std::uint64_t seed, int threads) {
  if (!corpus.has_split()) throw EvalError("evaluate: corpus has no split");
  std::vector<std::size_t> eval_tracks = corpus.indices_in(Split::Eval);
  if (eval_tracks.empty()) throw EvalError("evaluate: Eval split is empty");

  std::map<std::int64_t, std::vector<std::size_t>> by_artist;
  for (std::size_t i : eval_tracks) {
    by_artist[corpus.records[i].artist_id].push_back(i);
  }
  for (const auto& [artist, tracks] : by_artist) {
    if (tracks.size() < 2) {
      throw EvalError("evaluate: artist " + std::to_string(artist) +
                      " has a single Eval track; corpus is corrupt");
    }
  }
  if (by_artist.size() < 2) {
    throw EvalError("evaluate: need at least 2 Eval artists");
  }

  // Embed every Eval track once; per-artist work is then just distances.
  std::vector<Eigen::VectorXd> embedded(eval_tracks.size());
  std::vector<std::size_t> position(corpus.records.size(), 0);
  for (std::size_t k = 0; k < eval_tracks.size(); ++k) {
    position[eval_tracks[k]] = k;
  }

  int n_threads = std::max(1, threads);
  auto parallel_for = [&](std::size_t count, auto&& body) {
    if (n_threads == 1 || count < 2) {
      for (std::size_t i = 0; i < count; ++i) body(i);
      return;
    }
    std::vector<std::thread> pool;
    std::size_t per = (count + static_cast<std::size_t>(n_threads) - 1) /
                      static_cast<std::size_t>(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      std::size_t lo = static_cast<std::size_t>(t) * per;
      std::size_t hi = std::min(count, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      });
    }
    for (auto& th : pool) th.join();
  };

  parallel_for(eval_tracks.size(), [&](std::size_t k) {
    embedded[k] = embedder.embed(corpus.records[eval_tracks[k]].features);
  });

  std::vector<std::int64_t> artists;
  for (const auto& [artist, tracks] : by_artist) artists.push_back(artist);

  AucReport report;
  report.embedder = embedder.name;
  report.seed = seed;
  report.artists.resize(artists.size());

  parallel_for(artists.size(), [&](std::size_t a) {
    std::int64_t artist = artists[a];
    const std::vector<std::size_t>& own = by_artist.at(artist);

    // Query selection keyed on (seed, artist) so thread count and artist
    // iteration order cannot change it.
    std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(artist));
    std::size_t query = own[uniform_index(rng, own.size())];

    std::vector<double> scores;
    std::vector<bool> relevant;
    scores.reserve(eval_tracks.size() - 1);
    relevant.reserve(eval_tracks.size() - 1);
    const Eigen::VectorXd& q = embedded[position[query]];
    for (std::size_t idx : eval_tracks) {
      if (idx == query) continue;
      scores.push_back(-(embedded[position[idx]] - q).norm());
      relevant.push_back(corpus.records[idx].artist_id == artist);
    }

    ArtistAuc row;
    row.artist_id = artist;
    row.query_id = corpus.records[query].track_id;
    row.n_relevant = own.size() - 1;
    row.n_irrelevant = scores.size() - row.n_relevant;
    row.auc = auc(scores, relevant);
    report.artists[a] = row;
  });

  double total = 0.0;
  for (const ArtistAuc& row : report.artists) total += row.auc;
  report.mean_auc = total / static_cast<double>(report.artists.size());
  return report;
}

std::vector<std::pair<std::string, double>> compare(
    const Corpus& corpus, const std::vector<Embedder>& embedders,
    std::uint64_t seed, int threads) {
  if (embedders.empty()) throw EvalError("compare: no embedders given");
  std::vector<std::pair<std::string, double>> rows;
  for (const Embedder& e : embedders) {
    rows.emplace_back(e.name, evaluate(corpus, e, seed, threads).mean_auc);
  }
  return rows;
}

void write_auc_report(const AucReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write AUC report: " + path);
  out << "artist_id\tquery_id\tn_rel\tn_irr\tauc\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const ArtistAuc& row : report.artists) {
    out << row.artist_id << '\t' << row.query_id << '\t' << row.n_relevant << '\t'
        << row.n_irrelevant << '\t' << fmt(row.auc) << '\n';
  }
  out << "mean\t\t\t\t" << fmt(report.mean_auc) << '\n';
}

std::string format_comparison(const std::vector<std::pair<std::string, double>>& rows) {
  std::size_t width = 5;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::ostringstream out;
  out << "Model";
  out << std::string(width - 5, ' ') << "  AUC\n";
  char buf[32];
  for (const auto& [name, value] : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    out << name << std::string(width - name.size(), ' ') << "  " << buf << '\n';
  }
  return out.str();
}

}  // namespace tripletnet
