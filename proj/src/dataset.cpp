#include "tripletnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tripletnet/errors.hpp"
#include "tripletnet/rng.hpp"

namespace tripletnet {

namespace {

// Quote-aware CSV record reader. FMA metadata fields may contain embedded
// commas and newlines inside double quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char delim) : in_(in), delim_(delim) {}

  // Returns false at end of input. A record is a vector of unquoted fields.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (!peek_data()) return false;

    std::string field;
    bool in_quotes = false;
    int c;
    while ((c = in_.get()) != std::char_traits<char>::eof()) {
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(ch);
        }
      } else if (ch == '"') {
        in_quotes = true;
      } else if (ch == delim_) {
        fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\n') {
        break;
      } else if (ch != '\r') {
        field.push_back(ch);
      }
    }
    fields.push_back(std::move(field));
    ++record_no_;
    return true;
  }

  std::size_t record_no() const { return record_no_; }

 private:
  bool peek_data() { return in_.peek() != std::char_traits<char>::eof(); }

  std::istream& in_;
  char delim_;
  std::size_t record_no_ = 0;
};

std::int64_t parse_id(const std::string& s, const std::string& context) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("expected integer id, got \"" + s + "\" (" + context + ")");
  }
  return v;
}

double parse_feature(const std::string& s, std::int64_t track_id, std::size_t column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("non-numeric feature value \"" + s + "\" for track " +
                    std::to_string(track_id) + ", column " + std::to_string(column));
  }
  if (!std::isfinite(v)) {
    throw DataError("non-finite feature value for track " + std::to_string(track_id) +
                    ", column " + std::to_string(column));
  }
  return v;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

bool looks_like_index_row(const std::vector<std::string>& fields) {
  return !fields.empty() && fields[0] == "track_id";
}

FeatureTable read_feature_rows(CsvReader& reader, const std::string& path) {
  FeatureTable table;
  Eigen::Index dim = -1;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() < 2) {
      throw DataError(path + ": record " + std::to_string(reader.record_no()) +
                      " has no feature columns");
    }
    std::int64_t id = parse_id(fields[0], path + " record " +
                                          std::to_string(reader.record_no()));
    Eigen::Index row_dim = static_cast<Eigen::Index>(fields.size()) - 1;
    if (dim < 0) {
      dim = row_dim;
    } else if (row_dim != dim) {
      throw DataError(path + ": track " + std::to_string(id) + " has " +
                      std::to_string(row_dim) + " features, expected " +
                      std::to_string(dim));
    }
    Eigen::VectorXd v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      v[j] = parse_feature(fields[static_cast<std::size_t>(j) + 1], id,
                           static_cast<std::size_t>(j) + 1);
    }
    if (!table.emplace(id, std::move(v)).second) {
      throw DataError(path + ": duplicate track_id " + std::to_string(id));
    }
  }
  return table;
}

}  // namespace

FeatureTable load_feature_table(const std::string& path, FeatureFormat format) {
  std::ifstream in = open_or_throw(path);

  if (format == FeatureFormat::PlainTsv) {
    CsvReader reader(in, '\t');
    std::vector<std::string> header;
    if (!reader.next(header) || header.empty() || header[0] != "track_id") {
      throw ParseError(path + ": expected PLAIN_TSV header starting with track_id");
    }
    FeatureTable table = read_feature_rows(reader, path);
    Eigen::Index header_dim = static_cast<Eigen::Index>(header.size()) - 1;
    if (!table.empty() && table.begin()->second.size() != header_dim) {
      throw ParseError(path + ": header declares " + std::to_string(header_dim) +
                       " features but rows have " +
                       std::to_string(table.begin()->second.size()));
    }
    return table;
  }

  // FMA_FEATURES: three header rows (feature / statistic / number), then an
  // index row naming the track_id column in real exports.
  CsvReader reader(in, ',');
  std::vector<std::string> fields;
  for (int i = 0; i < 3; ++i) {
    if (!reader.next(fields)) {
      throw ParseError(path + ": truncated FMA feature header at row " +
                       std::to_string(i + 1));
    }
  }
  std::streampos before_index = in.tellg();
  if (reader.next(fields) && !looks_like_index_row(fields)) {
    in.seekg(before_index);
  }
  return read_feature_rows(reader, path);
}

MetadataTable load_metadata(const std::string& path, MetadataFormat format) {
  std::ifstream in = open_or_throw(path);
  MetadataTable table;

  auto insert = [&](std::int64_t id, TrackMeta meta) {
    if (!table.emplace(id, std::move(meta)).second) {
      throw DataError(path + ": duplicate track_id " + std::to_string(id));
    }
  };

  if (format == MetadataFormat::PlainTsv) {
    CsvReader reader(in, '\t');
    std::vector<std::string> header;
    if (!reader.next(header) || header.size() < 2 || header[0] != "track_id" ||
        header[1] != "artist_id") {
      throw ParseError(path + ": expected PLAIN_TSV header track_id, artist_id, genre");
    }
    std::vector<std::string> fields;
    while (reader.next(fields)) {
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() < 2) {
        throw ParseError(path + ": record " + std::to_string(reader.record_no()) +
                         " is missing the artist column");
      }
      std::int64_t id = parse_id(fields[0], path);
      if (fields[1].empty()) {
        throw DataError(path + ": empty artist_id for track " + std::to_string(id));
      }
      TrackMeta meta;
      meta.artist_id = parse_id(fields[1], path + " artist of track " + std::to_string(id));
      if (fields.size() > 2 && !fields[2].empty()) meta.genre = fields[2];
      insert(id, std::move(meta));
    }
    return table;
  }

  // FMA_TRACKS: two-level column header; we need (artist, id) and
  // (track, genre_top), located by name.
  CsvReader reader(in, ',');
  std::vector<std::string> level0, level1;
  if (!reader.next(level0) || !reader.next(level1)) {
    throw ParseError(path + ": truncated FMA tracks header");
  }
  std::size_t n_cols = std::min(level0.size(), level1.size());
  std::size_t artist_col = n_cols, genre_col = n_cols;
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (level0[j] == "artist" && level1[j] == "id") artist_col = j;
    if (level0[j] == "track" && level1[j] == "genre_top") genre_col = j;
  }
  if (artist_col == n_cols) {
    throw ParseError(path + ": missing (artist, id) column in FMA tracks header");
  }

  std::vector<std::string> fields;
  std::streampos before_index = in.tellg();
  if (reader.next(fields) && !looks_like_index_row(fields)) {
    in.seekg(before_index);
  }
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() <= artist_col) {
      throw ParseError(path + ": record " + std::to_string(reader.record_no()) +
                       " has too few columns");
    }
    std::int64_t id = parse_id(fields[0], path);
    if (fields[artist_col].empty()) {
      throw DataError(path + ": empty artist id for track " + std::to_string(id));
    }
    TrackMeta meta;
    meta.artist_id = parse_id(fields[artist_col], path + " artist of track " + std::to_string(id));
    if (genre_col < fields.size() && !fields[genre_col].empty()) {
      meta.genre = fields[genre_col];
    }
    insert(id, std::move(meta));
  }
  return table;
}

Corpus build_corpus(const FeatureTable& features, const MetadataTable& metadata,
                    int min_songs, JoinReport* report) {
  if (min_songs < 2) throw DataError("min_songs must be >= 2");

  JoinReport local;
  std::unordered_map<std::int64_t, std::size_t> artist_counts;
  for (const auto& [id, feat] : features) {
    auto it = metadata.find(id);
    if (it == metadata.end()) {
      ++local.features_only;
    } else {
      ++artist_counts[it->second.artist_id];
    }
  }
  for (const auto& [id, meta] : metadata) {
    if (!features.count(id)) ++local.metadata_only;
  }

  Corpus corpus;
  for (const auto& [id, feat] : features) {
    auto it = metadata.find(id);
    if (it == metadata.end()) continue;
    if (artist_counts[it->second.artist_id] < static_cast<std::size_t>(min_songs)) {
      ++local.filtered_tracks;
      continue;
    }
    if (corpus.dim == 0) {
      corpus.dim = feat.size();
    } else if (feat.size() != corpus.dim) {
      throw DataError("inconsistent feature dimension for track " + std::to_string(id));
    }
    corpus.records.push_back({id, it->second.artist_id, it->second.genre, feat});
  }
  if (report) *report = local;
  if (corpus.records.empty()) {
    throw DataError("corpus is empty after join and min-songs filter");
  }
  return corpus;
}

Corpus split_by_artist(Corpus corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train_fraction must be in (0, 1)");
  }
  std::vector<std::int64_t> artists = corpus.artist_ids();
  if (artists.size() < 2) {
    throw DataError("need at least 2 artists to split, have " +
                    std::to_string(artists.size()));
  }

  std::mt19937_64 rng{mix64(seed)};
  std::shuffle(artists.begin(), artists.end(), rng);

  // Round half up.
  std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(artists.size()) + 0.5));

  corpus.split.clear();
  for (std::size_t i = 0; i < artists.size(); ++i) {
    corpus.split[artists[i]] = i < n_train ? Split::Train : Split::Eval;
  }
  corpus.check_invariants();
  return corpus;
}

std::vector<std::size_t> Corpus::indices_in(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = split.find(records[i].artist_id);
    if (it != split.end() && it->second == s) out.push_back(i);
  }
  return out;
}

std::vector<std::int64_t> Corpus::artist_ids() const {
  std::set<std::int64_t> ids;
  for (const auto& r : records) ids.insert(r.artist_id);
  return {ids.begin(), ids.end()};
}

void Corpus::check_invariants() const {
  std::unordered_map<std::int64_t, std::size_t> artist_counts;
  std::set<std::int64_t> track_ids;
  for (const auto& r : records) {
    if (r.features.size() != dim) {
      throw DataError("corpus record with mismatched dimension, track " +
                      std::to_string(r.track_id));
    }
    if (!r.features.allFinite()) {
      throw DataError("non-finite features for track " + std::to_string(r.track_id));
    }
    if (!track_ids.insert(r.track_id).second) {
      throw DataError("duplicate track_id " + std::to_string(r.track_id));
    }
    ++artist_counts[r.artist_id];
  }
  for (const auto& [artist, count] : artist_counts) {
    if (count < 2) {
      throw DataError("artist " + std::to_string(artist) + " has fewer than 2 tracks");
    }
    if (has_split() && !split.count(artist)) {
      throw DataError("artist " + std::to_string(artist) + " missing from split");
    }
  }
}

}  // namespace tripletnet
