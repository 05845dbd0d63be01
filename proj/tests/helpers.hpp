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

#ifndef TABKIT_TESTS_HELPERS_HPP_
#define TABKIT_TESTS_HELPERS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabkit/data.hpp"
#include "tabkit/numkit.hpp"

namespace testkit {

/// K Gaussian blobs in d dimensions, centers spaced `gap` apart on the
/// first coordinate.
tabkit::data::Dataset blobs(std::size_t n, std::size_t d, std::size_t K, double gap,
                            std::uint64_t seed);

/// Fresh empty directory under the system temp path.
std::filesystem::path temp_dir(const std::string& name);

std::string slurp(const std::filesystem::path& path);

}  // namespace testkit

#endif  // TABKIT_TESTS_HELPERS_HPP_
