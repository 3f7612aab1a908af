// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "lumen/core.hpp"
#include "lumen/errors.hpp"
#include "lumen/grid.hpp"
#include "lumen/lfio.hpp"
#include "lumen/metrics.hpp"
#include "lumen/pipeline.hpp"
#include "lumen/postproc.hpp"
#include "lumen/resample.hpp"
#include "lumen/solver.hpp"
#include "lumen/synth.hpp"
#include "lumen/tensor.hpp"
