// Copyright 2026 The hegram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hegram/bench.hpp"
#include "hegram/detector.hpp"
#include "hegram/errors.hpp"
#include "hegram/eval_context.hpp"
#include "hegram/histogram.hpp"
#include "hegram/lookup_table.hpp"
#include "hegram/op_counter.hpp"
#include "hegram/pipeline.hpp"
#include "hegram/scenario.hpp"
#include "hegram/serialization.hpp"
#include "hegram/simulated.hpp"
