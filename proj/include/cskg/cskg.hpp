// Copyright 2026 The cskg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef CSKG_CSKG_HPP_
#define CSKG_CSKG_HPP_

#include "cskg/anno.hpp"
#include "cskg/common.hpp"
#include "cskg/compare.hpp"
#include "cskg/genmetrics.hpp"
#include "cskg/ingest.hpp"
#include "cskg/kg_core.hpp"
#include "cskg/normalize.hpp"
#include "cskg/resources.hpp"
#include "cskg/split.hpp"
#include "cskg/stats.hpp"
#include "cskg/text.hpp"
#include "cskg/verbalize.hpp"

#endif  // CSKG_CSKG_HPP_
