// Copyright 2026 The gosh-cpu Authors
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

#pragma once

#include "gosh/bigtrain.hpp"
#include "gosh/bounded_queue.hpp"
#include "gosh/coarsen.hpp"
#include "gosh/config.hpp"
#include "gosh/embedding.hpp"
#include "gosh/error.hpp"
#include "gosh/eval.hpp"
#include "gosh/graph.hpp"
#include "gosh/graph_io.hpp"
#include "gosh/kernels.hpp"
#include "gosh/multilevel.hpp"
#include "gosh/parallel.hpp"
#include "gosh/random.hpp"
#include "gosh/schedule.hpp"
#include "gosh/split.hpp"
#include "gosh/trainer.hpp"
