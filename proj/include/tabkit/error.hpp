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

#ifndef TABKIT_ERROR_HPP_
#define TABKIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tabkit {

/// Base of every error thrown by the library. `category()` picks the CLI
/// exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { usage = 2, data = 3, model = 4, transport = 5 };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(Category::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(Category::model, what) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what)
      : Error(Category::transport, what) {}
};

}  // namespace tabkit

#endif  // TABKIT_ERROR_HPP_
