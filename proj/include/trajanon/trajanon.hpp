//
// Copyright 2026 The Trajanon Authors
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
//

// Umbrella header for the library (the CLI lives in trajanon/cli.hpp).

#ifndef TRAJANON_TRAJANON_HPP_
#define TRAJANON_TRAJANON_HPP_

#include "trajanon/align.hpp"
#include "trajanon/cluster.hpp"
#include "trajanon/dgh.hpp"
#include "trajanon/error.hpp"
#include "trajanon/ingest.hpp"
#include "trajanon/kmeans.hpp"
#include "trajanon/metrics.hpp"
#include "trajanon/model.hpp"
#include "trajanon/pipeline.hpp"
#include "trajanon/random.hpp"
#include "trajanon/synth.hpp"

#endif  // TRAJANON_TRAJANON_HPP_
