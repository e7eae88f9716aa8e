// Copyright 2026 The coflow-dag Authors
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

#ifndef COFLOW_COFLOW_HPP_
#define COFLOW_COFLOW_HPP_

#include "coflow/baseline.hpp"
#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/dma.hpp"
#include "coflow/gdm.hpp"
#include "coflow/grouping.hpp"
#include "coflow/json_io.hpp"
#include "coflow/model.hpp"
#include "coflow/oracle.hpp"
#include "coflow/ordering.hpp"
#include "coflow/rng.hpp"
#include "coflow/rooted.hpp"
#include "coflow/verify.hpp"
#include "coflow/workload.hpp"

#endif  // COFLOW_COFLOW_HPP_
