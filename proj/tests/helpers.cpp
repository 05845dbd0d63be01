/*
 *   Copyright 2026 The tabkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "helpers.hpp"

#include <fstream>
#include <sstream>

namespace testkit {

tabkit::data::Dataset blobs(std::size_t n, std::size_t d, std::size_t K, double gap,
                            std::uint64_t seed) {
  tabkit::Rng rng(seed);
  tabkit::Matrix X(n, d);
  std::vector<int> y(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  std::vector<std::string> classes;
  for (std::size_t k = 0; k < K; ++k) classes.push_back("c" + std::to_string(k));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % K);
    y[i] = c;
    for (std::size_t j = 0; j < d; ++j) X(i, j) = rng.normal();
    X(i, 0) += gap * c;
  }
  return tabkit::data::make_dataset(std::move(X), std::move(y), names, classes);
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tabkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testkit
