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

#ifndef TABKIT_TOOLS_CLI_HPP_
#define TABKIT_TOOLS_CLI_HPP_

#include <iosfwd>

namespace tabkit::cli {

/// Runs one tabkit invocation. Returns the process exit code: 0 ok,
/// 2 usage, 3 data, 4 model, 5 transport, 1 internal. Failures print one
/// JSON object {"error": {...}} to err.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace tabkit::cli

#endif  // TABKIT_TOOLS_CLI_HPP_
