/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PIA_TOOLS_CLI_H_
#define PIA_TOOLS_CLI_H_

#include <ostream>

namespace pia::cli {

// Entry point of the `pia` tool. Returns the process exit code:
// 0 success, 1 usage, 2 data, 3 numeric or training failure.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace pia::cli

#endif  // PIA_TOOLS_CLI_H_
