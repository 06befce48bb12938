// Copyright 2026 The uavmatch Authors
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

#pragma once

#include "uavmatch/error.hpp"
#include "uavmatch/rng.hpp"
#include "uavmatch/model.hpp"
#include "uavmatch/preferences.hpp"
#include "uavmatch/knapsack.hpp"
#include "uavmatch/matching.hpp"
#include "uavmatch/deferred_acceptance.hpp"
#include "uavmatch/resource_acceptance.hpp"
#include "uavmatch/exchange_search.hpp"
#include "uavmatch/stability.hpp"
#include "uavmatch/baselines.hpp"
#include "uavmatch/multilevel.hpp"
#include "uavmatch/trajectory.hpp"
#include "uavmatch/dynamics.hpp"
#include "uavmatch/scenario.hpp"
#include "uavmatch/experiment.hpp"
