// Copyright 2026 The qecest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QECEST_ERRORS_HPP
#define QECEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qecest {

/// Caller passed arguments that violate a precondition (size mismatch, out-of-range knob).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input data (a code file, a channel, a dataset) failed a structural check.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The request needs an exhaustive enumeration larger than this build supports.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Process exit codes used by the command line tool.
enum ExitCode : int {
    EXIT_OK = 0,
    EXIT_FAILURE_GENERIC = 1,
    EXIT_VALIDATION = 2,
    EXIT_CAPACITY = 3,
};

}  // namespace qecest

#endif
