#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "tripletnet/dataset.hpp"
#include "tripletnet/synthgen.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 1000; ++i) {
      auto candidate = base / ("tripletnet_test_" + std::to_string(std::rand()) +
                               "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Split synthetic corpus straight from in-memory tables.
inline tripletnet::Corpus make_corpus(const tripletnet::SynthSpec& spec,
                                      double train_fraction = 0.7,
                                      std::uint64_t split_seed = 1) {
  auto [features, metadata] = tripletnet::generate_tables(spec);
  tripletnet::Corpus corpus = tripletnet::build_corpus(features, metadata);
  return tripletnet::split_by_artist(std::move(corpus), train_fraction, split_seed);
}

}  // namespace testutil
