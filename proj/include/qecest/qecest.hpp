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

#ifndef QECEST_QECEST_HPP
#define QECEST_QECEST_HPP

#include "qecest/channels.hpp"
#include "qecest/code.hpp"
#include "qecest/decoder.hpp"
#include "qecest/engine.hpp"
#include "qecest/errors.hpp"
#include "qecest/estimator.hpp"
#include "qecest/harness.hpp"
#include "qecest/pauli.hpp"
#include "qecest/rng.hpp"
#include "qecest/sampler.hpp"

#endif
